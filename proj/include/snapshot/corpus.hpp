#pragma once

// Seed material for robustness testing: a reference installation and its
// manifest, plus systematic corruptions of that manifest.

#include <cstdint>
#include <string>
#include <vector>

#include "snapshot/builder.hpp"
#include "snapshot/manifest_format.hpp"
#include "snapshot/providers.hpp"

namespace snapshot {

struct ReferenceFixture {
    BuildRequest request;
    ManifestBlob blob;
    std::vector<MemoryProvider> providers;  // one per manifest partition, in order
};

/// Two partitions: a Windows-style system volume carrying the booter and the
/// msadc/PCAT rules, and an EFI system partition bound by position (zero
/// unique GUID). Verifies as Allowed.
ReferenceFixture make_reference_fixture();

struct FieldLocation {
    std::string name;
    std::uint32_t offset = 0;
    bool holds_offset = false;  // value is a blob-relative offset
};

/// Every u32 field of a validated manifest, in file order of discovery.
std::vector<FieldLocation> enumerate_fields(const ManifestView& view);

struct NamedBlob {
    std::string name;
    ManifestBlob bytes;
};

/// Each field set to 0, 1, 0xFFFFFFFF and a seeded random value; offset
/// fields additionally redirected to the blob end and its last byte.
std::vector<NamedBlob> field_mutations(const ManifestBlob& blob, std::uint64_t seed);

/// Prefixes of the blob cut at every 4-byte boundary below its length.
std::vector<NamedBlob> truncations(const ManifestBlob& blob);

/// The valid blob followed by all field mutations and truncations.
std::vector<NamedBlob> make_seed_corpus(std::uint64_t seed = 0x5EED);

}  // namespace snapshot
