// Coverage-guided target: arbitrary bytes through the manifest reader, the
// full verifier against an in-memory installation, and the inspection
// round-trip for whatever parses.

#include <cstdint>
#include <cstdlib>
#include <vector>

#include "snapshot/builder.hpp"
#include "snapshot/corpus.hpp"
#include "snapshot/inspect.hpp"
#include "snapshot/verifier.hpp"

namespace {

snapshot::ReferenceFixture& fixture()
{
    static snapshot::ReferenceFixture instance = snapshot::make_reference_fixture();
    return instance;
}

void require(bool condition)
{
    if (!condition)
        std::abort();
}

}  // namespace

extern "C" int LLVMFuzzerTestOneInput(const std::uint8_t* data, std::size_t size)
{
    using namespace snapshot;
    const ByteSpan blob(data, size);

    std::vector<PartitionProvider*> providers;
    for (auto& provider : fixture().providers)
        providers.push_back(&provider);
    const BootDecision decision = verify_system(blob, providers);
    require(decision.allowed() != decision.denial.has_value());
    (void)decision.verdict_line();

    auto view = ManifestView::parse(blob);
    if (!view) {
        require(decision.denial->kind == DenialKind::ManifestMalformed);
        return 0;
    }

    const BuildRequest request = to_build_request(*view);
    auto reparsed = parse_manifest_dump(format_manifest_dump(*view));
    require(reparsed.has_value() && *reparsed == request);

    // Accepted blobs need not be canonical, but whatever the builder emits
    // for their content must decode to the same content.
    if (auto rebuilt = compile_manifest(request)) {
        auto again = decompile_manifest(*rebuilt);
        require(again.has_value() && *again == request);
    }
    return 0;
}
