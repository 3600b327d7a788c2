#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace cosmea {

// ---------------------------------------------------------------------------
// Error types
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZeroVectorError : Error { using Error::Error; };
struct SingularBasisError : Error { using Error::Error; };
struct UpdateSingularError : Error { using Error::Error; };
struct NotPositiveSpanningError : Error { using Error::Error; };
struct NoCandidateFoundError : Error { using Error::Error; };
struct UnboundedPolytopeError : Error { using Error::Error; };
struct InvalidDeltaError : Error { using Error::Error; };
struct TargetOutOfRangeError : Error { using Error::Error; };
struct InvalidSizeError : Error { using Error::Error; };
struct AugmentationStalledError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct DimensionError : Error { using Error::Error; };
struct EmptyUniverseError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Tolerances
// ---------------------------------------------------------------------------

/// Numerical tolerances shared by all operations. Defaults are sized for
/// double precision arithmetic on sets of unit vectors with n <= 100.
struct Tolerances {
    double unit_tol = 1e-12;  ///< allowed deviation of a unit norm from 1
    double eq_tol   = 1e-9;   ///< equality / active-set comparisons
    double rank_tol = 1e-10;  ///< relative singular-value rank threshold
    double cone_tol = 1e-9;   ///< strict cone-membership margin

    void validate() const {
        if (unit_tol <= 0 || eq_tol <= 0 || rank_tol <= 0 || cone_tol <= 0)
            throw Error("Tolerances: all tolerances must be strictly positive");
    }
};

// ---------------------------------------------------------------------------
// Deterministic random numbers
// ---------------------------------------------------------------------------

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seeded RNG with hand-rolled uniform/normal transforms. mt19937_64 output
/// is pinned by the standard, so sequences are identical across compilers;
/// std::*_distribution is not, which is why we do not use it.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(mix64(seed)) {}

    /// Independent stream derived from (seed, stream_id); used for per-round
    /// and per-case RNGs so results do not depend on execution order.
    static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
        return Rng(mix64(seed) ^ mix64(mix64(stream_id) + 0x632BE59BD9B4E019ull));
    }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform01();  // (0, 1]
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Unbiased uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) throw Error("Rng::uniform_int: n must be positive");
        std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t r;
        do {
            r = next_u64();
        } while (r >= limit);
        return r % n;
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace cosmea
