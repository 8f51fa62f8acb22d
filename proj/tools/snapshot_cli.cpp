// snapshot: compile trusted filesystem state into a binary manifest, verify
// a tree against it, and inspect manifests.
//
// Exit codes:
//   build    0 ok, 2 input parse error, 3 I/O error, 4 invariant violation
//   verify   0 allowed, 1 denied, 2 usage/descriptor error, 3 I/O error
//   inspect  0 ok, 1 manifest parse error, 3 I/O error
//   corpus   0 ok, 3 I/O error

#include <CLI11.hpp>

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "snapshot/builder.hpp"
#include "snapshot/corpus.hpp"
#include "snapshot/inspect.hpp"
#include "snapshot/providers.hpp"
#include "snapshot/rules.hpp"
#include "snapshot/verifier.hpp"

namespace fs = std::filesystem;
using namespace snapshot;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDenied = 1;
constexpr int kExitParse = 2;
constexpr int kExitIo = 3;
constexpr int kExitInvariant = 4;

struct BuildArgs {
    std::vector<std::string> files;
    std::vector<std::string> type_guids;
    std::vector<std::string> unique_guids;
    std::vector<std::string> rules;
    std::vector<std::string> roots;
    std::vector<std::string> prefixes;
    std::string boot_index = "none";
    std::string booter;
    std::string output;
};

struct VerifyArgs {
    std::string manifest;
    std::vector<std::string> roots;
    std::vector<std::string> descriptors;
    bool strict_acl_dirs = false;
};

struct InspectArgs {
    std::string manifest;
};

struct CorpusArgs {
    std::string output_dir;
    std::uint64_t seed = 0x5EED;
};

std::optional<std::string> read_text(const fs::path& path)
{
    auto bytes = read_whole_file(path);
    if (!bytes)
        return std::nullopt;
    return std::string(bytes->begin(), bytes->end());
}

bool write_atomically(const fs::path& target, const ManifestBlob& blob)
{
    fs::path temp = target;
    temp += ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out)
            return false;
        out.write(reinterpret_cast<const char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(temp, ec);
            return false;
        }
    }
    std::error_code ec;
    fs::rename(temp, target, ec);
    if (ec) {
        fs::remove(temp, ec);
        return false;
    }
    return true;
}

void report_rules_error(const std::string& file, const RulesError& error)
{
    std::cerr << file;
    if (error.line != 0)
        std::cerr << ":" << error.line;
    std::cerr << ": " << to_string(error.code) << ": " << error.detail << "\n";
}

int run_build(const BuildArgs& args)
{
    const std::size_t groups = args.files.size();
    if (groups == 0 || args.type_guids.size() != groups || args.unique_guids.size() != groups ||
        args.rules.size() != groups || args.roots.size() != groups) {
        std::cerr << "error: every partition needs --files, --type-guid, --unique-guid, --rules and --root "
                     "(got "
                  << args.files.size() << ", " << args.type_guids.size() << ", " << args.unique_guids.size()
                  << ", " << args.rules.size() << ", " << args.roots.size() << ")\n";
        return kExitParse;
    }
    if (!args.prefixes.empty() && args.prefixes.size() != groups) {
        std::cerr << "error: --prefix must be given for every partition or for none\n";
        return kExitParse;
    }

    BuildRequest request;
    if (args.boot_index != "none") {
        try {
            std::size_t used = 0;
            const unsigned long index = std::stoul(args.boot_index, &used);
            if (used != args.boot_index.size() || index >= 0xFFFFFFFFUL)
                throw std::out_of_range("boot index");
            request.boot_partition_index = static_cast<std::uint32_t>(index);
        } catch (const std::exception&) {
            std::cerr << "error: --boot-index must be a partition number or \"none\"\n";
            return kExitParse;
        }
    }
    request.booter_path = args.booter;

    std::size_t total_files = 0;
    std::size_t total_acls = 0;
    for (std::size_t g = 0; g < groups; ++g) {
        PartitionSpec spec;
        auto type = Guid::parse(args.type_guids[g]);
        auto unique = Guid::parse(args.unique_guids[g]);
        if (!type || !unique) {
            std::cerr << "error: partition " << g << ": malformed GUID \""
                      << (type ? args.unique_guids[g] : args.type_guids[g]) << "\"\n";
            return kExitParse;
        }
        spec.partition_type_guid = *type;
        spec.unique_partition_guid = *unique;

        auto files_text = read_text(args.files[g]);
        if (!files_text) {
            std::cerr << args.files[g] << ": cannot read\n";
            return kExitIo;
        }
        auto paths = parse_files_list(*files_text);
        if (!paths) {
            report_rules_error(args.files[g], paths.error());
            return kExitParse;
        }

        auto rules_text = read_text(args.rules[g]);
        if (!rules_text) {
            std::cerr << args.rules[g] << ": cannot read\n";
            return kExitIo;
        }
        auto acls = parse_rules_file(*rules_text);
        if (!acls) {
            report_rules_error(args.rules[g], acls.error());
            return kExitParse;
        }
        spec.acl_specs = std::move(*acls);

        ProviderDescriptor descriptor{*type, *unique, args.prefixes.empty() ? std::string() : args.prefixes[g]};
        DirectoryProvider source(args.roots[g], descriptor);
        for (const std::string& path : *paths) {
            auto content = source.read_file(path);
            if (!content) {
                const auto host = source.host_path(path);
                std::cerr << args.files[g] << ": cannot read listed file \"" << path << "\""
                          << (host ? " at " + host->string() : std::string(" (outside prefix)")) << "\n";
                return kExitIo;
            }
            spec.hashed_files.push_back({path, hash_source_file(*content)});
        }
        total_files += spec.hashed_files.size();
        total_acls += spec.acl_specs.size();
        request.partitions.push_back(std::move(spec));
    }

    auto blob = compile_manifest(request);
    if (!blob) {
        std::cerr << "error: " << to_string(blob.error().code) << ": " << blob.error().detail << "\n";
        return kExitInvariant;
    }
    if (!write_atomically(args.output, *blob)) {
        std::cerr << args.output << ": cannot write manifest\n";
        return kExitIo;
    }
    std::cout << "partitions: " << groups << " files: " << total_files << " acls: " << total_acls
              << " size: " << blob->size() << " bytes\n";
    return kExitOk;
}

int run_verify(const VerifyArgs& args)
{
    if (args.roots.size() != args.descriptors.size()) {
        std::cerr << "error: every --root needs a matching --descriptor\n";
        return kExitParse;
    }
    auto blob = read_whole_file(args.manifest);
    if (!blob) {
        std::cerr << args.manifest << ": cannot read manifest\n";
        return kExitIo;
    }

    std::vector<std::unique_ptr<DirectoryProvider>> owned;
    for (std::size_t i = 0; i < args.roots.size(); ++i) {
        auto text = read_text(args.descriptors[i]);
        if (!text) {
            std::cerr << args.descriptors[i] << ": cannot read descriptor\n";
            return kExitIo;
        }
        auto descriptor = parse_descriptor(*text);
        if (!descriptor) {
            std::cerr << args.descriptors[i] << ": " << descriptor.error() << "\n";
            return kExitParse;
        }
        owned.push_back(std::make_unique<DirectoryProvider>(args.roots[i], std::move(*descriptor)));
    }
    std::vector<PartitionProvider*> providers;
    for (auto& provider : owned)
        providers.push_back(provider.get());

    VerifyPolicy policy;
    policy.missing_acl_directory_is_violation = args.strict_acl_dirs;
    const BootDecision decision = verify_system(*blob, providers, policy);
    std::cout << decision.verdict_line() << "\n";
    if (!decision.allowed()) {
        std::cerr << "boot denied: " << decision.denial->to_string() << "\n";
        return kExitDenied;
    }
    return kExitOk;
}

int run_inspect(const InspectArgs& args)
{
    auto blob = read_whole_file(args.manifest);
    if (!blob) {
        std::cerr << args.manifest << ": cannot read manifest\n";
        return kExitIo;
    }
    auto view = ManifestView::parse(*blob);
    if (!view) {
        std::cerr << "error: " << to_string(view.error()) << "\n";
        return kExitDenied;
    }
    std::cout << format_manifest_dump(*view);
    return kExitOk;
}

std::string file_safe(const std::string& name)
{
    std::string out = name;
    for (char& c : out) {
        const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_' ||
                          c == '=' || c == '@';
        if (!keep)
            c = '_';
    }
    return out;
}

int run_corpus(const CorpusArgs& args)
{
    std::error_code ec;
    fs::create_directories(args.output_dir, ec);
    if (ec) {
        std::cerr << args.output_dir << ": " << ec.message() << "\n";
        return kExitIo;
    }
    const auto corpus = make_seed_corpus(args.seed);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        char index[16];
        std::snprintf(index, sizeof index, "%05zu-", i);
        const fs::path path = fs::path(args.output_dir) / (index + file_safe(corpus[i].name) + ".bin");
        std::ofstream out(path, std::ios::binary);
        out.write(reinterpret_cast<const char*>(corpus[i].bytes.data()),
                  static_cast<std::streamsize>(corpus[i].bytes.size()));
        if (!out) {
            std::cerr << path.string() << ": cannot write\n";
            return kExitIo;
        }
    }
    std::cout << "wrote " << corpus.size() << " seeds to " << args.output_dir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Compile, verify and inspect filesystem integrity manifests"};
    app.require_subcommand(1);

    BuildArgs build;
    auto* build_cmd = app.add_subcommand("build", "Hash listed files and compile rules into a manifest");
    build_cmd->add_option("--files", build.files, "partN_files.txt: full paths to hash (once per partition)")
        ->allow_extra_args(false);
    build_cmd->add_option("--type-guid", build.type_guids, "PartitionTypeGUID (once per partition)")
        ->allow_extra_args(false);
    build_cmd->add_option("--unique-guid", build.unique_guids, "UniquePartitionGUID (once per partition)")
        ->allow_extra_args(false);
    build_cmd->add_option("--rules", build.rules, "partN_rules.txt (once per partition)")->allow_extra_args(false);
    build_cmd->add_option("--root", build.roots, "host directory holding the partition's files")
        ->allow_extra_args(false);
    build_cmd->add_option("--prefix", build.prefixes, "manifest path prefix mapped onto --root")
        ->allow_extra_args(false);
    build_cmd->add_option("--boot-index", build.boot_index, "partition holding the booter, or \"none\"");
    build_cmd->add_option("--booter", build.booter, "full path of the booter within the boot partition");
    build_cmd->add_option("-o,--output", build.output, "manifest file to write")->required();

    VerifyArgs verify;
    auto* verify_cmd = app.add_subcommand("verify", "Check directory trees against a manifest");
    verify_cmd->add_option("manifest", verify.manifest, "manifest file")->required();
    verify_cmd->add_option("--root", verify.roots, "host directory standing in for a partition")
        ->allow_extra_args(false);
    verify_cmd->add_option("--descriptor", verify.descriptors,
                           "descriptor for the matching --root: type GUID, unique GUID, prefix")
        ->allow_extra_args(false);
    verify_cmd->add_flag("--strict-acl-dirs", verify.strict_acl_dirs,
                         "treat a missing ACL base directory as a violation");

    InspectArgs inspect;
    auto* inspect_cmd = app.add_subcommand("inspect", "Print a manifest in readable form");
    inspect_cmd->add_option("manifest", inspect.manifest, "manifest file")->required();

    CorpusArgs corpus;
    auto* corpus_cmd = app.add_subcommand("corpus", "Write seed manifests (valid and corrupted) for fuzzing");
    corpus_cmd->add_option("output_dir", corpus.output_dir, "directory to fill")->required();
    corpus_cmd->add_option("--seed", corpus.seed, "seed for randomized field values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitParse;
    }

    if (build_cmd->parsed())
        return run_build(build);
    if (verify_cmd->parsed())
        return run_verify(verify);
    if (inspect_cmd->parsed())
        return run_inspect(inspect);
    return run_corpus(corpus);
}
