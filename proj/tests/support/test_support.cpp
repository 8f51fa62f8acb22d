#include "test_support.hpp"

#include <sys/mman.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <set>
#include <stdexcept>

namespace snapshot::testing {

GuardedBuffer::GuardedBuffer(std::span<const std::uint8_t> bytes)
{
    const auto page = static_cast<std::size_t>(sysconf(_SC_PAGESIZE));
    const std::size_t data_pages = (bytes.size() + page - 1) / page;
    mapping_size_ = (data_pages + 1) * page;
    void* mapping = mmap(nullptr, mapping_size_, PROT_READ | PROT_WRITE, MAP_PRIVATE | MAP_ANONYMOUS, -1, 0);
    if (mapping == MAP_FAILED)
        throw std::runtime_error("mmap failed");
    mapping_ = static_cast<std::uint8_t*>(mapping);
    std::uint8_t* guard = mapping_ + data_pages * page;
    if (mprotect(guard, page, PROT_NONE) != 0)
        throw std::runtime_error("mprotect failed");
    std::uint8_t* data = guard - bytes.size();
    if (!bytes.empty())
        std::memcpy(data, bytes.data(), bytes.size());
    data_ = data;
    size_ = bytes.size();
}

GuardedBuffer::~GuardedBuffer()
{
    munmap(mapping_, mapping_size_);
}

namespace {

bool matches_one(char c)
{
    return c != '\\' && c != '\0' && c != '\n';
}

}  // namespace

bool naive_glob_match(std::string_view pattern, std::string_view candidate)
{
    if (pattern.empty())
        return candidate.empty();
    const char head = pattern.front();
    if (head == '*') {
        if (naive_glob_match(pattern.substr(1), candidate))
            return true;
        return !candidate.empty() && matches_one(candidate.front()) && naive_glob_match(pattern, candidate.substr(1));
    }
    if (candidate.empty())
        return false;
    if (head == '?')
        return matches_one(candidate.front()) && naive_glob_match(pattern.substr(1), candidate.substr(1));
    return head == candidate.front() && naive_glob_match(pattern.substr(1), candidate.substr(1));
}

namespace {

constexpr std::string_view kNameChars = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789._- ~$";

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi)
{
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::string random_component(std::mt19937_64& rng)
{
    std::string out;
    const std::size_t length = uniform(rng, 1, 10);
    for (std::size_t i = 0; i < length; ++i)
        out += kNameChars[uniform(rng, 0, kNameChars.size() - 1)];
    return out;
}

std::string random_pattern(std::mt19937_64& rng, bool allow_meta)
{
    std::string out;
    const std::size_t length = uniform(rng, 1, 8);
    for (std::size_t i = 0; i < length; ++i) {
        const std::size_t pick = uniform(rng, 0, 9);
        if (allow_meta && pick == 0)
            out += '*';
        else if (allow_meta && pick == 1)
            out += '?';
        else if (pick == 2 && i > 0 && i + 1 < length && out.back() != '\\')
            out += '\\';
        else
            out += kNameChars[uniform(rng, 0, kNameChars.size() - 1)];
    }
    return out;
}

}  // namespace

std::string random_path(std::mt19937_64& rng, std::size_t max_components)
{
    std::string out;
    const std::size_t parts = uniform(rng, 1, max_components);
    for (std::size_t i = 0; i < parts; ++i) {
        if (i > 0)
            out += '\\';
        out += random_component(rng);
    }
    return out;
}

Guid random_guid(std::mt19937_64& rng)
{
    Guid guid;
    for (auto& byte : guid.bytes)
        byte = static_cast<std::uint8_t>(rng());
    return guid;
}

BuildRequest random_build_request(std::mt19937_64& rng, std::size_t max_partitions)
{
    BuildRequest request;
    const std::size_t partitions = uniform(rng, 0, max_partitions);
    for (std::size_t p = 0; p < partitions; ++p) {
        PartitionSpec spec;
        spec.partition_type_guid = random_guid(rng);
        // Occasionally a template partition bound by position.
        spec.unique_partition_guid = uniform(rng, 0, 5) == 0 ? Guid{} : random_guid(rng);

        std::set<std::string, std::less<>> paths;
        const std::size_t files = uniform(rng, 0, 50);
        while (paths.size() < files)
            paths.insert(random_path(rng));
        std::vector<std::string> sorted(paths.begin(), paths.end());
        std::sort(sorted.begin(), sorted.end(),
                  [](const std::string& a, const std::string& b) { return compare_paths(a, b) < 0; });
        for (const std::string& path : sorted) {
            Digest digest;
            for (auto& byte : digest)
                byte = static_cast<std::uint8_t>(rng());
            spec.hashed_files.push_back({path, digest});
        }

        std::set<std::string, std::less<>> directories;
        const std::size_t acls = uniform(rng, 0, 8);
        while (directories.size() < acls)
            directories.insert(random_path(rng, 3));
        for (const std::string& directory : directories) {
            AclSpec acl;
            acl.base_directory = directory;
            acl.mode = uniform(rng, 0, 1) ? AclMode::Whitelist : AclMode::Blacklist;
            acl.kind = uniform(rng, 0, 1) ? AclKind::Regex : AclKind::Literal;
            const std::size_t patterns = uniform(rng, 1, 5);
            for (std::size_t i = 0; i < patterns; ++i)
                acl.patterns.push_back(random_pattern(rng, acl.kind == AclKind::Regex));
            spec.acl_specs.push_back(std::move(acl));
        }
        request.partitions.push_back(std::move(spec));
    }

    if (!request.partitions.empty() && uniform(rng, 0, 3) != 0) {
        const auto index = static_cast<std::uint32_t>(uniform(rng, 0, request.partitions.size() - 1));
        request.boot_partition_index = index;
        const auto& files = request.partitions[index].hashed_files;
        request.booter_path = files.empty() ? random_path(rng) : files[uniform(rng, 0, files.size() - 1)].path;
    }
    return request;
}

std::optional<std::vector<std::uint8_t>> CountingProvider::read_file(std::string_view path)
{
    ++reads[std::string(path)];
    return inner_.read_file(path);
}

std::optional<std::vector<std::string>> CountingProvider::walk(std::string_view base_directory)
{
    ++walks[std::string(base_directory)];
    return inner_.walk(base_directory);
}

TempDir::TempDir()
{
    std::string templ = (std::filesystem::temp_directory_path() / "snapshot-test-XXXXXX").string();
    if (mkdtemp(templ.data()) == nullptr)
        throw std::runtime_error("mkdtemp failed");
    path_ = templ;
}

TempDir::~TempDir()
{
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

void TempDir::write(const std::filesystem::path& relative, std::string_view content) const
{
    const std::filesystem::path target = path_ / relative;
    std::filesystem::create_directories(target.parent_path());
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw std::runtime_error("cannot write " + target.string());
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

namespace {

std::string shell_quote(std::string_view arg)
{
    std::string out = "'";
    for (char c : arg) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    return out + "'";
}

}  // namespace

CommandResult run_command(const std::vector<std::string>& argv)
{
    const TempDir capture;
    const auto out_path = capture.path() / "out";
    const auto err_path = capture.path() / "err";
    std::string command;
    for (const std::string& arg : argv)
        command += shell_quote(arg) + " ";
    command += ">" + shell_quote(out_path.string()) + " 2>" + shell_quote(err_path.string());

    CommandResult result;
    const int status = std::system(command.c_str());
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_text_file(out_path);
    result.err = read_text_file(err_path);
    return result;
}

}  // namespace snapshot::testing
