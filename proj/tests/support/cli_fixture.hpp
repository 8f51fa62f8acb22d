#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "test_support.hpp"

namespace snapshot::testing {

/// Two host trees standing in for a system volume (prefix "C:\") and an EFI
/// system partition, plus the files lists, rules and descriptors the CLI
/// consumes.
class CliTree {
public:
    CliTree();

    [[nodiscard]] std::filesystem::path path(std::string_view relative) const { return dir_.path() / relative; }
    void write(std::string_view relative, std::string_view content) const { dir_.write(relative, content); }

    [[nodiscard]] std::vector<std::string> build_args(const std::string& cli, const std::string& output) const;
    [[nodiscard]] std::vector<std::string> verify_args(const std::string& cli, const std::string& manifest) const;

private:
    TempDir dir_;
};

inline constexpr std::string_view kSystemType = "ebd0a0a2-b9e5-4433-87c0-68b6b72699c7";
inline constexpr std::string_view kSystemUnique = "6a1c3f52-0d7e-4b1a-9c55-2f0e8d4b7a10";
inline constexpr std::string_view kEspType = "c12a7328-f81f-11d2-ba4b-00a0c93ec93b";
inline constexpr std::string_view kEspUnique = "3f2a9d7e-51c4-4e8b-a0d6-7b19c2e84f35";

inline constexpr std::string_view kMsadcRules =
    "#WR\n"
    "C:\\Program Files\\Common Files\\System\\msadc\n"
    "*.dll\n"
    "*.inc\n"
    "*.reg\n"
    "ru-RU\\*.dll.mui\n"
    "#BN\n"
    "C:\\Windows\\Boot\\PCAT\n"
    "DtcInstall.log\n";

}  // namespace snapshot::testing
