#include "snapshot/providers.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <system_error>

#include "snapshot/rules.hpp"

namespace snapshot {

namespace fs = std::filesystem;

namespace {

std::string_view strip_cr(std::string_view line)
{
    if (!line.empty() && line.back() == '\r')
        line.remove_suffix(1);
    return line;
}

std::vector<std::string_view> split_components(std::string_view path)
{
    std::vector<std::string_view> parts;
    while (true) {
        const std::size_t sep = path.find(kPathSeparator);
        parts.push_back(path.substr(0, sep));
        if (sep == std::string_view::npos)
            break;
        path.remove_prefix(sep + 1);
    }
    return parts;
}

}  // namespace

void MemoryProvider::add_file(std::string path, std::vector<std::uint8_t> content)
{
    files_[std::move(path)] = std::move(content);
}

void MemoryProvider::add_file(std::string path, std::string_view content)
{
    add_file(std::move(path), std::vector<std::uint8_t>(content.begin(), content.end()));
}

bool MemoryProvider::remove_file(std::string_view path)
{
    auto it = files_.find(path);
    if (it == files_.end())
        return false;
    files_.erase(it);
    return true;
}

void MemoryProvider::add_directory(std::string path)
{
    directories_.push_back(std::move(path));
}

std::optional<std::vector<std::uint8_t>> MemoryProvider::read_file(std::string_view path)
{
    auto it = files_.find(path);
    if (it == files_.end())
        return std::nullopt;
    return it->second;
}

std::optional<std::vector<std::string>> MemoryProvider::walk(std::string_view base_directory)
{
    std::string prefix(base_directory);
    prefix += kPathSeparator;

    bool exists = std::find(directories_.begin(), directories_.end(), base_directory) != directories_.end();
    std::vector<std::string> entries;
    for (auto it = files_.lower_bound(prefix); it != files_.end(); ++it) {
        if (it->first.compare(0, prefix.size(), prefix) != 0)
            break;
        entries.push_back(it->first.substr(prefix.size()));
        exists = true;
    }
    if (!exists) {
        for (const auto& dir : directories_) {
            if (dir.compare(0, prefix.size(), prefix) == 0)
                exists = true;
        }
    }
    if (!exists)
        return std::nullopt;
    return entries;
}

Expected<ProviderDescriptor, std::string> parse_descriptor(std::string_view text)
{
    std::vector<std::string_view> lines;
    while (!text.empty()) {
        const std::size_t end = text.find('\n');
        lines.push_back(strip_cr(text.substr(0, end)));
        if (end == std::string_view::npos)
            break;
        text.remove_prefix(end + 1);
    }
    if (lines.size() < 2 || lines.size() > 3)
        return unexpected(std::string("descriptor must have 2 or 3 lines: type GUID, unique GUID, prefix"));

    ProviderDescriptor descriptor;
    auto type = Guid::parse(lines[0]);
    if (!type)
        return unexpected("line 1: malformed type GUID \"" + std::string(lines[0]) + "\"");
    auto unique = Guid::parse(lines[1]);
    if (!unique)
        return unexpected("line 2: malformed unique GUID \"" + std::string(lines[1]) + "\"");
    descriptor.partition_type_guid = *type;
    descriptor.unique_partition_guid = *unique;
    if (lines.size() == 3)
        descriptor.prefix = std::string(lines[2]);
    return descriptor;
}

std::optional<std::vector<std::uint8_t>> read_whole_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::vector<std::uint8_t> content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        return std::nullopt;
    return content;
}

DirectoryProvider::DirectoryProvider(fs::path root, ProviderDescriptor descriptor)
    : root_(std::move(root)), descriptor_(std::move(descriptor))
{
}

std::optional<fs::path> DirectoryProvider::host_path(std::string_view manifest_path) const
{
    if (!manifest_path.starts_with(descriptor_.prefix))
        return std::nullopt;
    manifest_path.remove_prefix(descriptor_.prefix.size());

    fs::path host = root_;
    if (manifest_path.empty())
        return host;
    for (std::string_view part : split_components(manifest_path)) {
        if (part.empty() || part == "." || part == ".." || part.find('/') != std::string_view::npos ||
            part.find('\0') != std::string_view::npos)
            return std::nullopt;
        host /= std::string(part);
    }
    return host;
}

std::optional<std::vector<std::uint8_t>> DirectoryProvider::read_file(std::string_view path)
{
    auto host = host_path(path);
    if (!host)
        return std::nullopt;
    std::error_code ec;
    if (!fs::is_regular_file(*host, ec))
        return std::nullopt;
    return read_whole_file(*host);
}

std::optional<std::vector<std::string>> DirectoryProvider::walk(std::string_view base_directory)
{
    auto host = host_path(base_directory);
    if (!host)
        return std::nullopt;
    std::error_code ec;
    if (!fs::is_directory(fs::symlink_status(*host, ec)))
        return std::nullopt;

    std::vector<std::string> entries;
    fs::recursive_directory_iterator it(*host, fs::directory_options::none, ec);
    if (ec)
        return std::nullopt;
    for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec)
            return std::nullopt;
        // Symlinks are reported but never followed, so nothing escapes the walk.
        if (it->is_directory(ec) && !it->is_symlink(ec))
            continue;
        std::string relative;
        for (const auto& part : it->path().lexically_relative(*host)) {
            if (!relative.empty())
                relative += kPathSeparator;
            relative += part.string();
        }
        entries.push_back(std::move(relative));
    }
    std::sort(entries.begin(), entries.end());
    return entries;
}

}  // namespace snapshot
