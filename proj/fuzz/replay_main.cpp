// Runs a fuzz target without libFuzzer: over the built-in seed corpus when
// given --seeds, and over every file or directory named on the command line.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <vector>

#include "snapshot/corpus.hpp"
#include "snapshot/providers.hpp"

extern "C" int LLVMFuzzerTestOneInput(const std::uint8_t* data, std::size_t size);

namespace fs = std::filesystem;

namespace {

std::size_t replay_path(const fs::path& path)
{
    if (fs::is_directory(path)) {
        std::size_t count = 0;
        for (const auto& entry : fs::recursive_directory_iterator(path)) {
            if (entry.is_regular_file())
                count += replay_path(entry.path());
        }
        return count;
    }
    auto bytes = snapshot::read_whole_file(path);
    if (!bytes) {
        std::fprintf(stderr, "cannot read %s\n", path.c_str());
        return 0;
    }
    LLVMFuzzerTestOneInput(bytes->data(), bytes->size());
    return 1;
}

}  // namespace

int main(int argc, char** argv)
{
    std::size_t count = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--seeds") == 0) {
            for (const auto& seed : snapshot::make_seed_corpus()) {
                LLVMFuzzerTestOneInput(seed.bytes.data(), seed.bytes.size());
                ++count;
            }
        } else {
            count += replay_path(argv[i]);
        }
    }
    std::printf("replayed %zu inputs\n", count);
    return 0;
}
