#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cosmea/generators.hpp"

namespace cosmea::io {

// Corpus layout: <root>/<set_type>/<dimension>/<modifier>.json, where the
// JSON document carries "matrix" (n rows of k numbers; entry [i][j] is
// coordinate i of vector j), "solution" (the cosine measure, or null when
// unknown) and an optional "meta" object with family, parameters, seeds and
// the transform log. Loaders ignore unknown keys, so two-key files without
// "meta" interoperate.

struct ManifestEntry {
    std::string path;   // relative to the corpus root
    Family family = Family::canonical_min;
    int n = 0;
    std::string params;                  // JSON-encoded parameter object
    std::optional<std::uint64_t> seed;
};

/// Write one case; returns the file path. Numbers are serialized with 17
/// significant digits so a reload is bit-exact.
std::filesystem::path save_case(const TestCase& tc, const std::filesystem::path& root);

/// Load a stored case. Columns are renormalized on load (tolerating up to
/// 1e-6 drift from unit norm); "solution" becomes known_cm.
TestCase load_case(const std::filesystem::path& file);

/// The benchmark grid for a list of dimensions: one canonical-minimal case,
/// shift families over delta in {0, 1/(2n), 2/(3n)}, three instances of the
/// augmented maximal shift family and of the random spanning sets, and the
/// two orthogonal-block sizes floor(1.25 n) and floor(1.75 n) (clamped into
/// the valid range [n+1, 2n] for small n).
std::vector<GeneratorSpec> default_grid_plan(const std::vector<int>& dims,
                                             std::uint64_t master_seed);

/// Generate and store every case in the plan; writes <root>/manifest.json
/// last and returns its path.
std::filesystem::path build_corpus(const std::vector<GeneratorSpec>& plan,
                                   const std::filesystem::path& root);

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& manifest_file);

}  // namespace cosmea::io
