#include "snapshot/verifier.hpp"

#include <algorithm>

#include "snapshot/rules.hpp"

namespace snapshot {

namespace {

DenialReason malformed(ParseError error)
{
    DenialReason reason;
    reason.kind = DenialKind::ManifestMalformed;
    reason.parse_error = error;
    return reason;
}

DenialReason denial(DenialKind kind, std::optional<std::uint32_t> partition = std::nullopt, std::string path = {})
{
    DenialReason reason;
    reason.kind = kind;
    reason.partition = partition;
    reason.path = std::move(path);
    return reason;
}

bool rule_matches(const StorageAclRecord& acl, std::string_view rule, std::string_view relative_path)
{
    return acl.regex() ? glob_match(rule, relative_path) : rule == relative_path;
}

/// Lowest index whose non-zero unique GUID already appeared earlier.
std::optional<std::uint32_t> first_duplicate_guid(const std::vector<StoragePartitionRecord>& partitions)
{
    std::vector<std::pair<Guid, std::uint32_t>> keyed;
    keyed.reserve(partitions.size());
    for (std::uint32_t i = 0; i < partitions.size(); ++i) {
        if (!partitions[i].unique_partition_guid.is_zero())
            keyed.emplace_back(partitions[i].unique_partition_guid, i);
    }
    std::sort(keyed.begin(), keyed.end());
    std::optional<std::uint32_t> first;
    for (std::size_t k = 1; k < keyed.size(); ++k) {
        if (keyed[k].first == keyed[k - 1].first && (!first || keyed[k].second < *first))
            first = keyed[k].second;
    }
    return first;
}

}  // namespace

std::string_view to_string(DenialKind kind) noexcept
{
    switch (kind) {
    case DenialKind::ManifestMalformed: return "ManifestMalformed";
    case DenialKind::DuplicateUniqueGuid: return "DuplicateUniqueGuid";
    case DenialKind::PartitionNotFound: return "PartitionNotFound";
    case DenialKind::TypeGuidMismatch: return "TypeGuidMismatch";
    case DenialKind::FileMissing: return "FileMissing";
    case DenialKind::HashMismatch: return "HashMismatch";
    case DenialKind::AclViolation: return "AclViolation";
    case DenialKind::BooterUnresolvable: return "BooterUnresolvable";
    }
    return "Unknown";
}

std::string DenialReason::to_string() const
{
    std::string out(snapshot::to_string(kind));
    if (parse_error)
        out += " error=" + std::string(snapshot::to_string(*parse_error));
    if (partition)
        out += " partition=" + std::to_string(*partition);
    if (guid)
        out += " guid=" + guid->to_string();
    if (kind == DenialKind::AclViolation)
        out += " directory=" + directory;
    if (!path.empty() || kind == DenialKind::AclViolation)
        out += " path=" + path;
    return out;
}

std::string BootDecision::verdict_line() const
{
    switch (outcome) {
    case Outcome::Allowed:
        return "ALLOW " + std::to_string(target->partition) + " " + target->booter_path;
    case Outcome::AllowedNoBoot:
        return "ALLOW none";
    case Outcome::Denied:
        break;
    }
    return "DENY " + denial->to_string();
}

std::optional<DenialReason> check_file_hashes(const StoragePartitionRecord& partition, PartitionProvider& provider,
                                              ByteSpan blob, const VerifiedFileCallback& on_verified)
{
    for (const StorageFileEntry& entry : partition.files) {
        auto path = read_string(blob, entry.path_offset);
        if (!path)
            return malformed(path.error());

        // Single read; everything below operates on this buffer only.
        const std::optional<std::vector<std::uint8_t>> content = provider.read_file(*path);
        if (!content)
            return denial(DenialKind::FileMissing, std::nullopt, std::string(*path));
        if (sha384(*content) != entry.hash)
            return denial(DenialKind::HashMismatch, std::nullopt, std::string(*path));
        if (on_verified)
            on_verified(*path, *content);
    }
    return std::nullopt;
}

std::optional<DenialReason> check_acl(const StorageAclRecord& acl, PartitionProvider& provider, ByteSpan blob,
                                      const VerifyPolicy& policy)
{
    auto directory = read_string(blob, acl.directory_offset);
    if (!directory)
        return malformed(directory.error());
    std::vector<std::string_view> rules;
    rules.reserve(acl.rule_offsets.size());
    for (std::uint32_t offset : acl.rule_offsets) {
        auto rule = read_string(blob, offset);
        if (!rule)
            return malformed(rule.error());
        rules.push_back(*rule);
    }

    auto violation = [&](std::string offending) {
        DenialReason reason = denial(DenialKind::AclViolation, std::nullopt, std::move(offending));
        reason.directory = std::string(*directory);
        return reason;
    };

    std::optional<std::vector<std::string>> entries = provider.walk(*directory);
    if (!entries) {
        if (policy.missing_acl_directory_is_violation)
            return violation({});
        return std::nullopt;
    }
    std::sort(entries->begin(), entries->end(),
              [](const std::string& a, const std::string& b) { return compare_paths(a, b) < 0; });

    for (const std::string& entry : *entries) {
        const bool matched = std::any_of(rules.begin(), rules.end(),
                                         [&](std::string_view rule) { return rule_matches(acl, rule, entry); });
        if (acl.whitelist() != matched)
            return violation(entry);
    }
    return std::nullopt;
}

std::optional<Digest> lookup_file_hash(const StoragePartitionRecord& partition, std::string_view path,
                                       ByteSpan blob)
{
    std::size_t low = 0;
    std::size_t high = partition.files.size();
    while (low < high) {
        const std::size_t mid = low + (high - low) / 2;
        auto candidate = read_string(blob, partition.files[mid].path_offset);
        if (!candidate)
            return std::nullopt;
        const int order = compare_paths(*candidate, path);
        if (order == 0)
            return partition.files[mid].hash;
        if (order < 0)
            low = mid + 1;
        else
            high = mid;
    }
    return std::nullopt;
}

Expected<BootTarget, DenialReason> resolve_boot_target(const ManifestView& view,
                                                       std::optional<std::vector<std::uint8_t>> verified_image)
{
    const StorageSetHeader& header = view.header();
    if (!header.boot_used() || header.boot_partition_index >= view.partitions().size())
        return unexpected(denial(DenialKind::BooterUnresolvable));

    const std::uint32_t index = header.boot_partition_index;
    std::string path(header.booter_path);
    if (!lookup_file_hash(view.partitions()[index], path, view.bytes()) || !verified_image)
        return unexpected(denial(DenialKind::BooterUnresolvable, index, std::move(path)));
    return BootTarget{index, std::move(path), std::move(*verified_image)};
}

BootDecision verify_system(ByteSpan blob, std::span<PartitionProvider* const> providers, const VerifyPolicy& policy)
{
    BootDecision decision;
    auto deny = [&](DenialReason reason) {
        decision.outcome = BootDecision::Outcome::Denied;
        decision.denial = std::move(reason);
        return decision;
    };

    auto view = ManifestView::parse(blob);
    if (!view)
        return deny(malformed(view.error()));
    decision.completed_stages.push_back(Stage::Header);

    const auto& partitions = view->partitions();
    const auto partition_count = static_cast<std::uint32_t>(partitions.size());

    if (auto duplicate = first_duplicate_guid(partitions)) {
        DenialReason reason = denial(DenialKind::DuplicateUniqueGuid, *duplicate);
        reason.guid = partitions[*duplicate].unique_partition_guid;
        return deny(std::move(reason));
    }
    // A cloned identifier on the disk side would make binding ambiguous.
    for (std::size_t i = 0; i < providers.size(); ++i) {
        const Guid guid = providers[i]->unique_partition_guid();
        if (guid.is_zero())
            continue;
        for (std::size_t j = 0; j < i; ++j) {
            if (providers[j]->unique_partition_guid() == guid) {
                DenialReason reason = denial(DenialKind::DuplicateUniqueGuid);
                reason.guid = guid;
                return deny(std::move(reason));
            }
        }
    }
    decision.completed_stages.push_back(Stage::GuidUniqueness);

    std::vector<PartitionProvider*> bound(partitions.size(), nullptr);
    for (std::uint32_t i = 0; i < partition_count; ++i) {
        const StoragePartitionRecord& record = partitions[i];
        if (record.unique_partition_guid.is_zero()) {
            if (i < providers.size())
                bound[i] = providers[i];
        } else {
            for (PartitionProvider* provider : providers) {
                if (provider->unique_partition_guid() == record.unique_partition_guid) {
                    bound[i] = provider;
                    break;
                }
            }
        }
        if (bound[i] == nullptr) {
            DenialReason reason = denial(DenialKind::PartitionNotFound, i);
            reason.guid = record.unique_partition_guid;
            return deny(std::move(reason));
        }
        if (bound[i]->partition_type_guid() != record.partition_type_guid)
            return deny(denial(DenialKind::TypeGuidMismatch, i));
    }
    decision.completed_stages.push_back(Stage::PartitionBinding);

    const StorageSetHeader& header = view->header();
    std::optional<std::vector<std::uint8_t>> booter_image;
    for (std::uint32_t i = 0; i < partition_count; ++i) {
        VerifiedFileCallback keep_booter;
        if (header.boot_used() && header.boot_partition_index == i) {
            keep_booter = [&](std::string_view path, std::span<const std::uint8_t> content) {
                if (path == header.booter_path)
                    booter_image.emplace(content.begin(), content.end());
            };
        }
        if (auto reason = check_file_hashes(partitions[i], *bound[i], blob, keep_booter)) {
            reason->partition = i;
            return deny(std::move(*reason));
        }
    }
    decision.completed_stages.push_back(Stage::FileHashes);

    for (std::uint32_t i = 0; i < partition_count; ++i) {
        for (const StorageAclRecord& acl : partitions[i].acls) {
            if (auto reason = check_acl(acl, *bound[i], blob, policy)) {
                reason->partition = i;
                return deny(std::move(*reason));
            }
        }
    }
    decision.completed_stages.push_back(Stage::Acls);

    if (!header.boot_used()) {
        decision.outcome = BootDecision::Outcome::AllowedNoBoot;
        decision.completed_stages.push_back(Stage::BootTarget);
        return decision;
    }
    auto target = resolve_boot_target(*view, std::move(booter_image));
    if (!target)
        return deny(target.error());
    decision.outcome = BootDecision::Outcome::Allowed;
    decision.target = std::move(*target);
    decision.completed_stages.push_back(Stage::BootTarget);
    return decision;
}

}  // namespace snapshot
