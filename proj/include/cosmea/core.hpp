#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "cosmea/common.hpp"

namespace cosmea {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// An ordered collection of k unit vectors in R^n, stored as the columns of
/// an n x k matrix. Duplicates are allowed (the structure is an ordered
/// multiset). Construction validates that every column is unit within
/// unit_tol; use normalize_set() to build one from arbitrary nonzero input.
class VectorSet {
public:
    VectorSet(Eigen::MatrixXd unit_columns,
              std::vector<std::string> labels = {},
              const Tolerances& tol = {});

    int dim() const { return static_cast<int>(mat_.rows()); }
    int size() const { return static_cast<int>(mat_.cols()); }
    const Eigen::MatrixXd& matrix() const { return mat_; }
    Eigen::MatrixXd::ConstColXpr vector(int i) const { return mat_.col(i); }
    const std::vector<std::string>& labels() const { return labels_; }

private:
    Eigen::MatrixXd mat_;
    std::vector<std::string> labels_;
};

/// A sub-basis of a VectorSet together with its Gram vector u and Gram value
/// gamma: u is the unique unit vector with u . d_i = gamma > 0 for every
/// basis member d_i.
struct GramInfo {
    std::vector<int> basis_indices;  ///< n indices into the source set
    Eigen::VectorXd gram_vector;     ///< unit vector u
    double gram_value = 0.0;         ///< gamma in (0, 1]
};

enum class SolveStatus { exact, heuristic, timeout_incumbent };

const char* to_string(SolveStatus s);

struct SolveStats {
    std::uint64_t candidates_examined = 0;
    std::uint64_t lps_solved = 0;
    double wall_seconds = 0.0;
};

/// Outcome of a cosine-measure computation.
struct CosineResult {
    double value = std::numeric_limits<double>::quiet_NaN();
    std::vector<Eigen::VectorXd> cosine_vectors;  ///< minimizing unit vectors
    bool vectors_truncated = false;               ///< list capped at the configured limit
    std::vector<std::vector<int>> active_sets;    ///< per cosine vector, indices attaining value
    SolveStatus status = SolveStatus::exact;
    SolveStats stats;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Scale every column of `raw` to unit norm, preserving order and duplicates.
/// Throws ZeroVectorError if any column has norm <= rank_tol.
VectorSet normalize_set(const Eigen::MatrixXd& raw, const Tolerances& tol = {});

/// Gram matrix of the indexed columns: entry (i, j) = d_{idx[i]} . d_{idx[j]}.
Eigen::MatrixXd gram_matrix(const VectorSet& s, const std::vector<int>& indices);

/// Gram vector and value of an indexed basis of size n. Solves B^T w = e and
/// returns u = w/|w|, gamma = 1/|w|. Throws SingularBasisError when the
/// indexed matrix is rank-deficient under the relative singular-value test.
GramInfo gram_vector(const VectorSet& s, const std::vector<int>& basis_indices,
                     const Tolerances& tol = {});

/// Sherman-Morrison: given A^{-1}, returns (A + u v^T)^{-1}. Throws
/// UpdateSingularError when 1 + v^T A^{-1} u vanishes within rank_tol.
Eigen::MatrixXd rank1_update_inverse(const Eigen::MatrixXd& a_inv,
                                     const Eigen::VectorXd& u,
                                     const Eigen::VectorXd& v,
                                     const Tolerances& tol = {});

/// Indices i with d_i . y > alpha + cone_tol, i.e. the elements of s lying
/// strictly inside the minimum cosine cone of (y, alpha). An empty result is
/// the optimality certificate used by the enumeration solvers.
std::vector<int> cone_violators(const VectorSet& s, const Eigen::VectorXd& y,
                                double alpha, const Tolerances& tol = {});

struct CosineAlong {
    double value = 0.0;          ///< max_i d_i . v
    std::vector<int> active;     ///< indices within eq_tol of the max
};

CosineAlong cosine_along(const VectorSet& s, const Eigen::VectorXd& v,
                         const Tolerances& tol = {});

/// True iff the set positively spans R^n: rank(S) = n and the system
/// {S lambda = 0, lambda >= 1} is feasible.
bool is_positive_spanning(const VectorSet& s, const Tolerances& tol = {});

}  // namespace cosmea
