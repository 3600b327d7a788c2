#pragma once

#include <chrono>
#include <optional>
#include <string>

#include "cosmea/core.hpp"
#include "cosmea/polytope.hpp"

namespace cosmea {

enum class Method { basis_enum, kkt_enum, vertex_enum, random_lp };

const char* to_string(Method m);
std::optional<Method> method_from_name(const std::string& name);

struct SolverConfig {
    Tolerances tolerances;
    std::optional<std::chrono::duration<double>> time_budget;  ///< wall-clock cap
    std::uint64_t rng_seed = 0;          ///< random_lp sampling seed
    std::uint64_t lp_iterations = 1000;  ///< random_lp round count
    int max_reported_vectors = 64;       ///< cap on the reported cosine vector list
};

struct SolverReport {
    CosineResult result;
    Method method = Method::basis_enum;
    bool completed = true;  ///< false iff the run stopped on the time budget
};

/// Exhaustive search over all C(k, n) sub-bases; each nonsingular basis
/// yields a Gram candidate (u, gamma), admissible iff no element of the set
/// lies strictly inside the minimum cosine cone of (u, gamma). Returns the
/// smallest admissible gamma. Requires a positive spanning input.
SolverReport basis_enumeration(const VectorSet& s, const SolverConfig& cfg = {});

/// Enumeration of KKT candidates over all subsets of size 2..n+1. Works for
/// arbitrary finite sets (no positive-spanning requirement); the returned
/// value can be zero or negative for non-spanning inputs.
SolverReport kkt_enumeration(const VectorSet& s, const SolverConfig& cfg = {});

/// Streams the vertices of P = {x : x . d <= 1} and returns 1 / max |v|,
/// with the normalized furthest vertices as cosine vectors.
SolverReport vertex_enum_solver(const VectorSet& s, const SolverConfig& cfg = {});

/// Heuristic: repeatedly maximize a uniformly random linear objective over P
/// and keep the furthest optimal vertex. The returned value can only
/// overestimate the exact cosine measure.
SolverReport random_lp_solver(const VectorSet& s, const SolverConfig& cfg = {});

SolverReport run_method(Method m, const VectorSet& s, const SolverConfig& cfg = {});

/// Uniform sample on the unit sphere in R^n (normalized standard normal).
Eigen::VectorXd sample_unit_sphere(Rng& rng, int n);

namespace detail {
/// Reference implementation of basis_enumeration with a fresh rank test and
/// solve per subset. The public entry point accelerates adjacent subsets with
/// Sherman-Morrison inverse updates; results must match bitwise.
SolverReport basis_enumeration_naive(const VectorSet& s, const SolverConfig& cfg = {});
}  // namespace detail

}  // namespace cosmea
