#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cosmea/core.hpp"

namespace cosmea {

enum class Family {
    canonical_min,
    canonical_max,
    uniform_simplex,
    min_delta_shift,
    max_delta_shift,
    aug_max_delta_shift,
    optimal_orthogonal,
    random_pss,
};

const char* family_name(Family f);
std::optional<Family> family_from_name(const std::string& name);

struct GeneratorSpec {
    Family family = Family::canonical_min;
    int dim = 2;
    std::optional<double> delta;              // shift families
    std::optional<int> size;                  // optimal_orthogonal: s in [n+1, 2n]
    std::optional<int> augment_count;         // aug_max_delta_shift
    std::optional<std::uint64_t> seed;        // randomized families
    std::optional<int> instance;              // instance index within a corpus
};

struct TransformEntry {
    std::string kind;          // "rotate", "permute", "augment"
    std::uint64_t seed = 0;
    int count = 0;             // augment only
};

/// A benchmark instance: the set, its closed-form cosine measure when the
/// family has one, and provenance.
struct TestCase {
    VectorSet set;
    std::optional<double> known_cm;
    std::optional<GeneratorSpec> spec;
    std::vector<TransformEntry> transform_log;
};

// --- families --------------------------------------------------------------

/// {e_1, ..., e_n, -e/sqrt(n)}; cm = 1/sqrt(n^2 + 2(n-1) sqrt(n)).
TestCase canonical_minimal(int n);

/// {+-e_1, ..., +-e_n}; cm = 1/sqrt(n).
TestCase canonical_maximal(int n);

/// The n x (n+1) matrix whose columns are unit and pairwise at dot -1/n.
Eigen::MatrixXd uniform_simplex(int n);

/// Uniform simplex with columns 2..n+1 shifted by delta along e_1 and
/// renormalized; cm = (1 - delta n)/sqrt(n^2 delta^2 - 2 n delta + n^2),
/// strictly decreasing in delta on [0, 1/n).
TestCase minimal_delta_shift(int n, double delta);

/// Shift achieving a target cosine measure c in (0, 1/n] for the minimal
/// shift family.
double delta_for_target_min(int n, double c);

/// Columns of +-alpha (I - delta J), alpha = 1/sqrt(delta^2 n - 2 delta + 1);
/// cm = (1 - delta n)/sqrt(n (delta^2 n - 2 delta + 1)).
TestCase maximal_delta_shift(int n, double delta);

/// Shift achieving a target cosine measure c in (0, 1/sqrt(n)] for the
/// maximal shift family.
double delta_for_target_max(int n, double c);

/// Orthogonal coordinate blocks each carrying a uniform simplex; s vectors,
/// n+1 <= s <= 2n. cm = 1/sqrt((s-n-r) floor(n/(s-n))^2 + r ceil(n/(s-n))^2)
/// with r = n mod (s-n).
TestCase optimal_orthogonal(int n, int s);

/// Basis of a random strictly diagonally dominant matrix plus negated random
/// column-subset sums. Positive spanning by construction, cosine measure
/// unknown.
TestCase random_pss(int n, std::uint64_t seed);

/// Append `count` random unit vectors that keep the cosine measure unchanged
/// (each satisfies u* . v <= cm - eq_tol for a cosine vector u*).
TestCase augment(const TestCase& tc, int count, std::uint64_t seed);

// --- measure-preserving transformations ------------------------------------

/// Haar-uniform rotation in SO(n): QR of a standard normal matrix with the
/// R-diagonal sign convention, then determinant fixed to +1.
Eigen::MatrixXd random_rotation(int n, std::uint64_t seed);

TestCase rotate(const TestCase& tc, std::uint64_t seed);

/// Uniformly random reordering of the vectors.
TestCase permute(const TestCase& tc, std::uint64_t seed);

// --- dispatch ---------------------------------------------------------------

TestCase make_case(const GeneratorSpec& spec);

/// Closed-form cosine measure of a family spec; nullopt for random_pss.
std::optional<double> family_known_cm(const GeneratorSpec& spec);

}  // namespace cosmea
