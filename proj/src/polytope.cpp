#include "cosmea/polytope.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace cosmea {

namespace {

constexpr double kVertexDedupTol = 1e-8;

bool next_combination(std::vector<int>& c, int k) {
    const int n = static_cast<int>(c.size());
    for (int i = n - 1; i >= 0; --i) {
        if (c[i] < k - (n - i)) {
            ++c[i];
            for (int j = i + 1; j < n; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

// Lexicographically smallest subset of `candidates` whose rows of `a` have
// rank n; greedy selection is optimal here (linear matroid).
std::vector<int> greedy_lex_min_basis(const Eigen::MatrixXd& a,
                                      const std::vector<int>& candidates,
                                      double rank_tol) {
    const int n = static_cast<int>(a.cols());
    std::vector<int> sel;
    Eigen::MatrixXd rows(n, n);
    int cur_rank = 0;
    for (int j : candidates) {
        if (cur_rank == n) break;
        rows.row(cur_rank) = a.row(j);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(rows.topRows(cur_rank + 1));
        lu.setThreshold(rank_tol);
        if (lu.rank() == cur_rank + 1) {
            sel.push_back(j);
            ++cur_rank;
        }
    }
    if (cur_rank != n) throw Error("greedy_lex_min_basis: tight set is rank-deficient");
    return sel;
}

Vertex make_vertex(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                   const Eigen::VectorXd& x, const Tolerances& tol) {
    Vertex v;
    v.point = x;
    for (int j = 0; j < a.rows(); ++j)
        if (std::abs(b(j) - a.row(j).dot(x)) <= tol.eq_tol) v.tight_set.push_back(j);
    v.defining_basis = greedy_lex_min_basis(a, v.tight_set, tol.rank_tol);
    return v;
}

}  // namespace

PolytopeP build_polytope(const VectorSet& s) { return PolytopeP{s}; }

LpOutcome solve_lp(const PolytopeP& p, const Eigen::VectorXd& c, const Tolerances& tol) {
    const int n = p.dim();
    if (c.size() != n) throw Error("solve_lp: objective dimension mismatch");
    if (c.norm() <= tol.rank_tol) throw Error("solve_lp: objective must be nonzero");
    Eigen::MatrixXd a = p.constraint_matrix();
    Eigen::VectorXd b = Eigen::VectorXd::Ones(p.num_constraints());

    // Quotient out the lineality space {v : A v = 0} so the reduced problem
    // is pointed and the simplex can run vertex to vertex.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sigma.size(); ++i)
        if (sigma(i) > tol.rank_tol * sigma(0)) ++rank;
    Eigen::MatrixXd basis_range = svd.matrixV().leftCols(rank);

    LpOutcome out;
    if (rank < n) {
        Eigen::MatrixXd basis_null = svd.matrixV().rightCols(n - rank);
        Eigen::VectorXd cn = basis_null.transpose() * c;
        if (cn.lpNorm<Eigen::Infinity>() > tol.eq_tol * c.norm()) {
            out.status = LpStatus::unbounded;
            out.objective = std::numeric_limits<double>::infinity();
            out.recession = (basis_null * cn).normalized();
            return out;
        }
    }
    Eigen::MatrixXd ar = rank < n ? Eigen::MatrixXd(a * basis_range) : a;
    Eigen::VectorXd cr = rank < n ? Eigen::VectorXd(basis_range.transpose() * c) : c;

    lp::CrashResult crash = lp::find_initial_vertex(ar, b, tol);
    if (!crash.found_vertex) {
        out.status = LpStatus::unbounded;
        out.objective = std::numeric_limits<double>::infinity();
        out.recession = rank < n ? Eigen::VectorXd(basis_range * crash.recession)
                                 : crash.recession;
        // A free line without objective progress cannot occur here: any line
        // lies in the lineality space, which was quotiented away unless the
        // objective moves along it.
        return out;
    }
    lp::MaximizeResult mx = lp::maximize(ar, b, cr, std::move(crash.dict), tol);
    if (mx.unbounded) {
        out.status = LpStatus::unbounded;
        out.objective = std::numeric_limits<double>::infinity();
        out.recession = rank < n ? Eigen::VectorXd(basis_range * mx.direction)
                                 : mx.direction;
        return out;
    }
    out.status = LpStatus::optimal;
    out.point = rank < n ? Eigen::VectorXd(basis_range * mx.dict.point) : mx.dict.point;
    out.objective = c.dot(out.point);
    if (rank == n) out.vertex = make_vertex(a, b, out.point, tol);
    return out;
}

// ---------------------------------------------------------------------------
// Reverse-search vertex enumeration
// ---------------------------------------------------------------------------

struct VertexEnumerator::Impl {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    Tolerances tol;

    struct Frame {
        std::vector<int> basis;
        int enter_cursor = 0;  // candidate constraint to swap in
        int leave_cursor = 0;  // basis position to swap out
    };
    std::vector<Frame> stack;
    std::vector<Eigen::VectorXd> emitted;
    std::uint64_t bases_visited = 0;
    bool root_pending = true;

    Impl(const PolytopeP& p, const Tolerances& t)
        : a(p.constraint_matrix()), b(Eigen::VectorXd::Ones(p.num_constraints())), tol(t) {
        const int n = static_cast<int>(a.cols());
        const int k = static_cast<int>(a.rows());
        if (k < n + 1)
            throw UnboundedPolytopeError("enumerate_vertices: fewer than n+1 constraints");
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
        const auto& sigma = svd.singularValues();
        if (sigma(sigma.size() - 1) <= tol.rank_tol * sigma(0))
            throw UnboundedPolytopeError("enumerate_vertices: constraint normals are rank-deficient");
        // P is bounded iff the normals positively span: some lambda >= 1 with
        // sum lambda_i a_i = 0.
        Eigen::MatrixXd at = a.transpose();
        if (!lp::equality_system_feasible(at, -at * Eigen::VectorXd::Ones(k), tol.eq_tol))
            throw UnboundedPolytopeError("enumerate_vertices: recession direction exists");
        lp::CrashResult crash = lp::find_initial_vertex(a, b, tol);
        if (!crash.found_vertex)
            throw UnboundedPolytopeError("enumerate_vertices: recession direction found");
        lp::Dictionary dict = std::move(crash.dict);
        if (!lp::lex_feasible(a, b, dict, 1e-11)) {
            auto repaired = lp::lex_feasible_basis_at(a, b, dict.point, tol);
            if (!repaired)
                throw Error("enumerate_vertices: no lex-feasible basis at the initial vertex");
            dict = std::move(*repaired);
        }
        // Walk the parent map to its fixed point: the unique root basis.
        std::uint64_t guard = 0;
        while (auto parent = lp::reverse_search_parent(a, b, dict, tol.rank_tol)) {
            auto next = lp::make_dictionary(a, b, *parent, tol.rank_tol);
            if (!next) throw Error("enumerate_vertices: singular parent basis");
            dict = std::move(*next);
            if (++guard > 10'000'000) throw Error("enumerate_vertices: root search did not terminate");
        }
        stack.push_back(Frame{dict.basis, 0, 0});
        bases_visited = 1;
    }

    bool in_basis(const std::vector<int>& basis, int j) const {
        return std::binary_search(basis.begin(), basis.end(), j);
    }

    std::optional<Vertex> emit_if_new(const Eigen::VectorXd& x) {
        for (const auto& seen : emitted)
            if ((seen - x).lpNorm<Eigen::Infinity>() <= kVertexDedupTol) return std::nullopt;
        emitted.push_back(x);
        return make_vertex(a, b, x, tol);
    }

    std::optional<Vertex> next() {
        const int n = static_cast<int>(a.cols());
        const int k = static_cast<int>(a.rows());
        if (root_pending) {
            root_pending = false;
            auto root_dict = lp::make_dictionary(a, b, stack.back().basis, tol.rank_tol);
            auto v = emit_if_new(root_dict->point);
            if (v) return v;
        }
        while (!stack.empty()) {
            Frame& f = stack.back();
            bool pushed = false;
            while (f.enter_cursor < k) {
                if (in_basis(f.basis, f.enter_cursor)) {
                    ++f.enter_cursor;
                    f.leave_cursor = 0;
                    continue;
                }
                if (f.leave_cursor >= n) {
                    ++f.enter_cursor;
                    f.leave_cursor = 0;
                    continue;
                }
                const int enter = f.enter_cursor;
                const int leave_pos = f.leave_cursor++;
                std::vector<int> child = f.basis;
                child[leave_pos] = enter;
                std::sort(child.begin(), child.end());
                auto dict = lp::make_dictionary(a, b, child, tol.rank_tol);
                if (!dict) continue;
                if (!lp::lex_feasible(a, b, *dict, 1e-11)) continue;
                auto parent = lp::reverse_search_parent(a, b, *dict, tol.rank_tol);
                if (!parent || *parent != f.basis) continue;
                ++bases_visited;
                stack.push_back(Frame{std::move(child), 0, 0});
                pushed = true;
                auto v = emit_if_new(dict->point);
                if (v) return v;
                break;  // explore the new frame before resuming this one
            }
            if (!pushed && stack.back().enter_cursor >= k) stack.pop_back();
        }
        return std::nullopt;
    }
};

VertexEnumerator::VertexEnumerator(const PolytopeP& p, const Tolerances& tol)
    : impl_(std::make_unique<Impl>(p, tol)) {}
VertexEnumerator::~VertexEnumerator() = default;
VertexEnumerator::VertexEnumerator(VertexEnumerator&&) noexcept = default;
VertexEnumerator& VertexEnumerator::operator=(VertexEnumerator&&) noexcept = default;

std::optional<Vertex> VertexEnumerator::next() { return impl_->next(); }
std::uint64_t VertexEnumerator::bases_visited() const { return impl_->bases_visited; }

std::vector<Vertex> all_vertices(const PolytopeP& p, const Tolerances& tol) {
    VertexEnumerator en(p, tol);
    std::vector<Vertex> out;
    while (auto v = en.next()) out.push_back(std::move(*v));
    return out;
}

std::vector<Vertex> brute_force_vertices(const PolytopeP& p, const Tolerances& tol) {
    const int n = p.dim();
    const int k = p.num_constraints();
    Eigen::MatrixXd a = p.constraint_matrix();
    Eigen::VectorXd b = Eigen::VectorXd::Ones(k);
    std::vector<Vertex> out;
    std::vector<Eigen::VectorXd> points;
    if (k < n) return out;
    std::vector<int> combo(n);
    for (int i = 0; i < n; ++i) combo[i] = i;
    do {
        auto dict = lp::make_dictionary(a, b, combo, tol.rank_tol);
        if (!dict) continue;
        const Eigen::VectorXd& x = dict->point;
        if (((a * x).array() - b.array()).maxCoeff() > tol.eq_tol) continue;
        bool dup = false;
        for (const auto& seen : points)
            if ((seen - x).lpNorm<Eigen::Infinity>() <= kVertexDedupTol) {
                dup = true;
                break;
            }
        if (dup) continue;
        points.push_back(x);
        out.push_back(make_vertex(a, b, x, tol));
    } while (next_combination(combo, k));
    return out;
}

GramInfo vertex_to_gram(const VectorSet& s, const Vertex& v) {
    double nrm = v.point.norm();
    if (nrm <= 0) throw Error("vertex_to_gram: vertex at the origin");
    GramInfo info;
    info.basis_indices = v.defining_basis;
    info.gram_vector = v.point / nrm;
    info.gram_value = 1.0 / nrm;
    (void)s;
    return info;
}

}  // namespace cosmea
