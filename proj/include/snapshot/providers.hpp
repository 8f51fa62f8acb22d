#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "snapshot/expected.hpp"
#include "snapshot/verifier.hpp"

namespace snapshot {

/// Partition held entirely in memory; used by tests and fuzz targets.
class MemoryProvider final : public PartitionProvider {
public:
    MemoryProvider() = default;
    MemoryProvider(Guid type, Guid unique) : type_(type), unique_(unique) {}

    void add_file(std::string path, std::vector<std::uint8_t> content);
    void add_file(std::string path, std::string_view content);
    bool remove_file(std::string_view path);
    /// Directories exist implicitly when a file lies beneath them; this adds
    /// an empty one.
    void add_directory(std::string path);

    [[nodiscard]] std::map<std::string, std::vector<std::uint8_t>, std::less<>>& files() noexcept { return files_; }
    [[nodiscard]] const std::map<std::string, std::vector<std::uint8_t>, std::less<>>& files() const noexcept
    {
        return files_;
    }

    void set_partition_type_guid(Guid guid) noexcept { type_ = guid; }
    void set_unique_partition_guid(Guid guid) noexcept { unique_ = guid; }

    [[nodiscard]] Guid partition_type_guid() const override { return type_; }
    [[nodiscard]] Guid unique_partition_guid() const override { return unique_; }
    std::optional<std::vector<std::uint8_t>> read_file(std::string_view path) override;
    std::optional<std::vector<std::string>> walk(std::string_view base_directory) override;

private:
    Guid type_;
    Guid unique_;
    std::map<std::string, std::vector<std::uint8_t>, std::less<>> files_;
    std::vector<std::string> directories_;
};

/// Identity and path mapping of a host directory standing in for a partition.
/// Text form, three lines: type GUID, unique GUID, path prefix.
struct ProviderDescriptor {
    Guid partition_type_guid;
    Guid unique_partition_guid;
    std::string prefix;
};

Expected<ProviderDescriptor, std::string> parse_descriptor(std::string_view text);

/// Maps manifest path "<prefix>a\b\c" to "<root>/a/b/c". Paths outside the
/// prefix, or with empty, "." or ".." components, resolve to nothing.
class DirectoryProvider final : public PartitionProvider {
public:
    DirectoryProvider(std::filesystem::path root, ProviderDescriptor descriptor);

    [[nodiscard]] Guid partition_type_guid() const override { return descriptor_.partition_type_guid; }
    [[nodiscard]] Guid unique_partition_guid() const override { return descriptor_.unique_partition_guid; }
    std::optional<std::vector<std::uint8_t>> read_file(std::string_view path) override;
    std::optional<std::vector<std::string>> walk(std::string_view base_directory) override;

    [[nodiscard]] std::optional<std::filesystem::path> host_path(std::string_view manifest_path) const;

private:
    std::filesystem::path root_;
    ProviderDescriptor descriptor_;
};

std::optional<std::vector<std::uint8_t>> read_whole_file(const std::filesystem::path& path);

}  // namespace snapshot
