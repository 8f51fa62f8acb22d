#include <doctest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "cli_fixture.hpp"
#include "snapshot/builder.hpp"
#include "snapshot/providers.hpp"

using namespace snapshot;
using namespace snapshot::testing;
namespace fs = std::filesystem;

namespace {

const std::string kCli = SNAPSHOT_CLI_PATH;

CommandResult run(std::vector<std::string> args)
{
    args.insert(args.begin(), kCli);
    return run_command(args);
}

CommandResult build_and_verify(const CliTree& tree, const std::string& manifest)
{
    const CommandResult built = run_command(tree.build_args(kCli, manifest));
    REQUIRE_MESSAGE(built.exit_code == 0, built.err);
    return run_command(tree.verify_args(kCli, manifest));
}

}  // namespace

TEST_SUITE("cli")
{
    TEST_CASE("help exits 0 and a missing subcommand exits 2")
    {
        CHECK(run({"--help"}).exit_code == 0);
        CHECK(run({}).exit_code == 2);
        CHECK(run({"frobnicate"}).exit_code == 2);
    }

    TEST_CASE("single partition build with the msadc rules")
    {
        CliTree tree;
        const std::string manifest = tree.path("out.bin").string();
        const CommandResult built = run({"build", "--files", tree.path("part0_files.txt").string(), "--type-guid",
                                         std::string(kSystemType), "--unique-guid", std::string(kSystemUnique),
                                         "--rules", tree.path("part0_rules.txt").string(), "--root",
                                         tree.path("sys").string(), "--prefix", "C:\\", "-o", manifest});
        REQUIRE_MESSAGE(built.exit_code == 0, built.err);
        CHECK(built.out.find("partitions: 1 files: 2 acls: 2") != std::string::npos);
        const auto blob = read_whole_file(manifest);
        REQUIRE(blob);
        auto request = decompile_manifest(*blob);
        REQUIRE(request);
        CHECK(request->partitions[0].hashed_files.size() == 2);
        CHECK(request->partitions[0].acl_specs.size() == 2);
        CHECK_FALSE(request->boot_partition_index);

        const CommandResult verified =
            run({"verify", manifest, "--root", tree.path("sys").string(), "--descriptor", tree.path("sys.desc").string()});
        CHECK_MESSAGE(verified.exit_code == 0, verified.err);
        CHECK(verified.out == "ALLOW none\n");
    }

    TEST_CASE("two partitions with a boot target")
    {
        CliTree tree;
        const CommandResult verified = build_and_verify(tree, tree.path("m.bin").string());
        CHECK_MESSAGE(verified.exit_code == 0, verified.err);
        CHECK(verified.out == "ALLOW 0 C:\\Windows\\Boot\\PCAT\\bootmgr\n");
    }

    TEST_CASE("build input errors exit 2 and name the file and line")
    {
        CliTree tree;
        const std::string manifest = tree.path("m.bin").string();
        tree.write("part0_rules.txt", "#WB\nC:\\x\nfoo\n");
        const CommandResult conflict = run_command(tree.build_args(kCli, manifest));
        CHECK(conflict.exit_code == 2);
        CHECK(conflict.err.find("part0_rules.txt:1:") != std::string::npos);
        CHECK(conflict.err.find("BadFlagLine") != std::string::npos);
        CHECK_FALSE(fs::exists(manifest));

        tree.write("part0_rules.txt", kMsadcRules);
        tree.write("part0_files.txt", "a\nb\na\n");
        const CommandResult duplicate = run_command(tree.build_args(kCli, manifest));
        CHECK(duplicate.exit_code == 2);
        CHECK(duplicate.err.find("part0_files.txt:3:") != std::string::npos);
    }

    TEST_CASE("incomplete argument group exits 2")
    {
        CliTree tree;
        std::vector<std::string> args = tree.build_args(kCli, tree.path("m.bin").string());
        // Drop the second --rules.
        const auto second_rules = std::find(std::find(args.begin(), args.end(), "--rules") + 1, args.end(), "--rules");
        args.erase(second_rules, second_rules + 2);
        const CommandResult result = run_command(args);
        CHECK(result.exit_code == 2);
        CHECK(result.err.find("--rules") != std::string::npos);
    }

    TEST_CASE("malformed GUID and boot index exit 2")
    {
        CliTree tree;
        std::vector<std::string> args = tree.build_args(kCli, tree.path("m.bin").string());
        auto bad_guid = args;
        *std::find(bad_guid.begin(), bad_guid.end(), std::string(kEspType)) = "not-a-guid";
        CHECK(run_command(bad_guid).exit_code == 2);

        auto bad_index = args;
        *(std::find(bad_index.begin(), bad_index.end(), "--boot-index") + 1) = "zero";
        CHECK(run_command(bad_index).exit_code == 2);
    }

    TEST_CASE("missing listed file exits 3")
    {
        CliTree tree;
        tree.write("part1_files.txt", "EFI\\BOOT\\absent.efi\n");
        const CommandResult result = run_command(tree.build_args(kCli, tree.path("m.bin").string()));
        CHECK(result.exit_code == 3);
        CHECK(result.err.find("absent.efi") != std::string::npos);
    }

    TEST_CASE("unwritable output exits 3")
    {
        CliTree tree;
        const CommandResult result = run_command(tree.build_args(kCli, tree.path("no/such/dir/m.bin").string()));
        CHECK(result.exit_code == 3);
    }

    TEST_CASE("builder invariant violations exit 4")
    {
        CliTree tree;
        std::vector<std::string> args = tree.build_args(kCli, tree.path("m.bin").string());
        *(std::find(args.begin(), args.end(), "--boot-index") + 1) = "7";
        const CommandResult result = run_command(args);
        CHECK(result.exit_code == 4);
        CHECK_FALSE(fs::exists(tree.path("m.bin")));

        auto no_booter = tree.build_args(kCli, tree.path("m.bin").string());
        no_booter.erase(std::find(no_booter.begin(), no_booter.end(), "--booter"),
                        std::find(no_booter.begin(), no_booter.end(), "--booter") + 2);
        CHECK(run_command(no_booter).exit_code == 4);
    }

    TEST_CASE("verify exit codes")
    {
        CliTree tree;
        const std::string manifest = tree.path("m.bin").string();
        REQUIRE(build_and_verify(tree, manifest).exit_code == 0);

        CHECK(run_command(tree.verify_args(kCli, tree.path("absent.bin").string())).exit_code == 3);

        tree.write("sys/Program Files/Common Files/System/msadc/evil.exe", "x");
        const CommandResult planted = run_command(tree.verify_args(kCli, manifest));
        CHECK(planted.exit_code == 1);
        CHECK(planted.out.rfind("DENY AclViolation partition=0", 0) == 0);
        CHECK(planted.out.find("path=evil.exe") != std::string::npos);
        CHECK(planted.err.find("AclViolation") != std::string::npos);

        tree.write("sys.desc", "garbage\n");
        CHECK(run_command(tree.verify_args(kCli, manifest)).exit_code == 2);

        auto unpaired = tree.verify_args(kCli, manifest);
        unpaired.pop_back();
        unpaired.pop_back();
        CHECK(run_command(unpaired).exit_code == 2);
    }

    TEST_CASE("strict policy flags a missing ACL directory")
    {
        CliTree tree;
        const std::string manifest = tree.path("m.bin").string();
        REQUIRE(build_and_verify(tree, manifest).exit_code == 0);
        fs::remove_all(tree.path("sys/Program Files"));
        CHECK(run_command(tree.verify_args(kCli, manifest)).exit_code == 0);
        auto strict = tree.verify_args(kCli, manifest);
        strict.push_back("--strict-acl-dirs");
        const CommandResult result = run_command(strict);
        CHECK(result.exit_code == 1);
        CHECK(result.out.find("AclViolation") != std::string::npos);
    }

    TEST_CASE("inspect")
    {
        CliTree tree;
        const fs::path minimal = tree.path("minimal.bin");
        const ManifestBlob blob = *compile_manifest({});
        tree.write("minimal.bin", std::string_view(reinterpret_cast<const char*>(blob.data()), blob.size()));
        const CommandResult dump = run({"inspect", minimal.string()});
        CHECK(dump.exit_code == 0);
        CHECK(dump.out.find("boot: unused\n") != std::string::npos);
        CHECK(dump.out.find("partitions: 0\n") != std::string::npos);

        const std::string manifest = tree.path("m.bin").string();
        REQUIRE(run_command(tree.build_args(kCli, manifest)).exit_code == 0);
        const CommandResult full = run({"inspect", manifest});
        CHECK(full.out.find("acl: whitelist,regex C:\\Program Files") != std::string::npos);
        CHECK(full.out.find("acl: blacklist,literal C:\\Windows\\Boot\\PCAT") != std::string::npos);

        ManifestBlob corrupted = blob;
        corrupted[0] = 0x54;
        tree.write("bad.bin", std::string_view(reinterpret_cast<const char*>(corrupted.data()), corrupted.size()));
        const CommandResult bad = run({"inspect", tree.path("bad.bin").string()});
        CHECK(bad.exit_code == 1);
        CHECK(bad.err.find("BadMagic") != std::string::npos);

        CHECK(run({"inspect", tree.path("absent.bin").string()}).exit_code == 3);
    }

    TEST_CASE("corpus writes seed files")
    {
        TempDir dir;
        const CommandResult result = run({"corpus", (dir.path() / "seeds").string()});
        REQUIRE(result.exit_code == 0);
        std::size_t count = 0;
        for ([[maybe_unused]] const auto& entry : fs::directory_iterator(dir.path() / "seeds"))
            ++count;
        CHECK(count > 100);
        CHECK(fs::exists(dir.path() / "seeds" / "00000-valid.bin"));
    }
}
