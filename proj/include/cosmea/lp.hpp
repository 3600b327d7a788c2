#pragma once

#include <Eigen/Dense>
#include <optional>
#include <variant>
#include <vector>

#include "cosmea/common.hpp"

namespace cosmea::lp {

// Dense simplex machinery for polyhedra of the form P = {x : A x <= b}.
//
// A "basis" is a sorted set of n constraint indices whose rows are linearly
// independent; it determines the point x(B) = A_B^{-1} b_B. Degeneracy is
// resolved by the standard lexicographic (symbolic) perturbation
// b(eps) = b + (eps, eps^2, ..., eps^k), under which every basis corresponds
// to a unique vertex of the perturbed (simple) polytope. All ratio tests and
// feasibility checks below are carried out on the perturbation expansion,
// represented as a vector [constant, coeff of eps^1, ..., coeff of eps^k].

/// Sign of the leading entry of a perturbation expansion; entries with
/// magnitude <= tol are treated as zero.
int lex_sign(const Eigen::VectorXd& v, double tol);

/// Lexicographic a < b comparison with per-entry tolerance.
bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol);

/// Basis snapshot: the index set, A_B^{-1}, and the basic point.
struct Dictionary {
    std::vector<int> basis;   // sorted constraint indices, size n
    Eigen::MatrixXd binv;     // inverse of the n x n matrix of basis rows
    Eigen::VectorXd point;    // A_B^{-1} b_B
};

/// Build the dictionary for a candidate basis; nullopt if the selected rows
/// are numerically singular (relative pivot test against rank_tol).
std::optional<Dictionary> make_dictionary(const Eigen::MatrixXd& a,
                                          const Eigen::VectorXd& b,
                                          std::vector<int> basis,
                                          double rank_tol);

/// Perturbation expansion of slack j at the given dictionary.
Eigen::VectorXd perturbed_slack(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                const Dictionary& dict, int j);

/// A basis is lex-feasible iff every non-basic perturbed slack is
/// lexicographically positive; such bases are exactly the vertices of the
/// perturbed polytope.
bool lex_feasible(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                  const Dictionary& dict, double tol);

struct PivotResult {
    bool unbounded = false;      // no blocking constraint along the edge
    Eigen::VectorXd direction;   // improving edge direction when unbounded
    std::vector<int> basis;      // successor basis otherwise
};

/// One simplex step releasing basis position `leave_pos` (edge direction
/// -binv.col(leave_pos)), with the lexicographic ratio test selecting the
/// entering constraint.
PivotResult pivot_edge(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                       const Dictionary& dict, int leave_pos, double tol);

/// Deterministic parent map of the reverse-search tree: one lexicographic
/// simplex step for the objective maximizing (x_1, ..., x_n) lexicographically
/// (i.e. perturbed objective with zero base term). Returns nullopt at the
/// unique root basis.
std::optional<std::vector<int>> reverse_search_parent(const Eigen::MatrixXd& a,
                                                      const Eigen::VectorXd& b,
                                                      const Dictionary& dict,
                                                      double tol);

struct CrashResult {
    bool found_vertex = false;
    Dictionary dict;             // valid when found_vertex
    Eigen::VectorXd recession;   // a feasible line direction otherwise
};

/// Phase 1 "crash": starting from a strictly interior point (requires b > 0),
/// walks to a vertex by tightening one independent constraint at a time.
/// Detects free lines, which certify that P is unbounded / not pointed.
CrashResult find_initial_vertex(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                const Tolerances& tol);

struct MaximizeResult {
    bool unbounded = false;
    Eigen::VectorXd direction;   // recession direction with c . dir > 0
    Dictionary dict;             // optimal basis otherwise
    std::uint64_t pivots = 0;
};

/// Phase 2: maximize c^T x from a vertex dictionary. Dantzig entering rule
/// with smallest-index tie break, lexicographic ratio test as the primary
/// anti-cycling rule, Bland's rule as fallback after a stall.
MaximizeResult maximize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                        const Eigen::VectorXd& c, Dictionary dict,
                        const Tolerances& tol);

/// Repair an arbitrary feasible vertex basis into a lex-feasible one for the
/// same vertex (searches the rank-n subsets of the tight set).
std::optional<Dictionary> lex_feasible_basis_at(const Eigen::MatrixXd& a,
                                                const Eigen::VectorXd& b,
                                                const Eigen::VectorXd& point,
                                                const Tolerances& tol);

// ---------------------------------------------------------------------------
// Equality-form phase 1
// ---------------------------------------------------------------------------

/// Feasibility of {M lambda = q, lambda >= 0} via a phase-1 simplex with
/// artificial variables and Bland's rule. `tol` bounds the residual objective
/// accepted as zero.
bool equality_system_feasible(const Eigen::MatrixXd& m, const Eigen::VectorXd& q,
                              double tol);

}  // namespace cosmea::lp
