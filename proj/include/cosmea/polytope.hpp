#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "cosmea/core.hpp"
#include "cosmea/lp.hpp"

namespace cosmea {

/// The polytope P = {x in R^n : x . d <= 1 for every d in the source set}.
/// Constraints are ordered exactly like the source vectors. P always contains
/// the origin in its interior and is bounded iff the source set is positive
/// spanning.
struct PolytopeP {
    VectorSet source;

    int dim() const { return source.dim(); }
    int num_constraints() const { return source.size(); }
    /// Constraint matrix A (k x n, rows are the source vectors transposed).
    Eigen::MatrixXd constraint_matrix() const { return source.matrix().transpose(); }
};

PolytopeP build_polytope(const VectorSet& s);

struct Vertex {
    Eigen::VectorXd point;
    std::vector<int> tight_set;        ///< all i with d_i . point = 1 within eq_tol
    std::vector<int> defining_basis;   ///< lexicographically smallest rank-n subset of tight_set
};

enum class LpStatus { optimal, unbounded };

struct LpOutcome {
    LpStatus status = LpStatus::optimal;
    std::optional<Vertex> vertex;   ///< present when the optimal face contains a vertex
    double objective = 0.0;
    Eigen::VectorXd point;          ///< an optimal point (equals vertex->point when set)
    Eigen::VectorXd recession;      ///< improving recession direction when unbounded
};

/// Maximize c^T x over P with a deterministic dense simplex. Unboundedness is
/// reported as a status, not an error: it certifies that the source set is
/// not positive spanning.
LpOutcome solve_lp(const PolytopeP& p, const Eigen::VectorXd& c,
                   const Tolerances& tol = {});

/// Streaming vertex enumeration by lexicographic reverse search over simplex
/// dictionaries (Avis-Fukuda). Every vertex is produced exactly once, in a
/// deterministic order; the caller may stop consuming at any time. Throws
/// UnboundedPolytopeError when a recession direction is detected during
/// initialization.
class VertexEnumerator {
public:
    explicit VertexEnumerator(const PolytopeP& p, const Tolerances& tol = {});
    ~VertexEnumerator();
    VertexEnumerator(VertexEnumerator&&) noexcept;
    VertexEnumerator& operator=(VertexEnumerator&&) noexcept;

    /// Next vertex, or nullopt when the traversal is exhausted.
    std::optional<Vertex> next();

    /// Number of simplex bases visited so far (>= number of vertices).
    std::uint64_t bases_visited() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Convenience: materialize the full vertex list.
std::vector<Vertex> all_vertices(const PolytopeP& p, const Tolerances& tol = {});

/// Test oracle: enumerate vertices by brute force over all C(k, n) constraint
/// subsets. Intended for small instances (n <= 5 or so).
std::vector<Vertex> brute_force_vertices(const PolytopeP& p, const Tolerances& tol = {});

/// Map a vertex of build_polytope(s) to its Gram candidate:
/// u = point/|point|, gamma = 1/|point|, basis = the vertex's defining basis.
GramInfo vertex_to_gram(const VectorSet& s, const Vertex& v);

}  // namespace cosmea
