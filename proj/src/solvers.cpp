#include "cosmea/solvers.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cmath>

namespace cosmea {

namespace {

using Clock = std::chrono::steady_clock;

struct Budget {
    std::optional<Clock::time_point> deadline;

    explicit Budget(const SolverConfig& cfg) {
        if (cfg.time_budget) {
            if (cfg.time_budget->count() <= 0)
                throw Error("SolverConfig: time budget must be positive");
            deadline = Clock::now() +
                       std::chrono::duration_cast<Clock::duration>(*cfg.time_budget);
        }
    }
    bool exceeded() const { return deadline && Clock::now() > *deadline; }
};

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

bool lex_vec_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (int i = 0; i < a.size(); ++i)
        if (a(i) != b(i)) return a(i) < b(i);
    return false;
}

// Tracks the running minimum objective together with every candidate within
// eq_tol of it. Entries that can no longer tie are pruned lazily.
struct TiePool {
    double best = std::numeric_limits<double>::infinity();
    double tol;
    std::vector<std::pair<double, Eigen::VectorXd>> pool;

    explicit TiePool(double t) : tol(t) {}

    void offer(double value, const Eigen::VectorXd& v) {
        if (value < best) best = value;
        if (value <= best + tol) {
            pool.emplace_back(value, v);
            if (pool.size() > 4096) prune();
        }
    }
    void prune() {
        std::erase_if(pool, [&](const auto& e) { return e.first > best + tol; });
    }
    bool empty() const { return pool.empty(); }
};

CosineResult assemble_result(double value, std::vector<Eigen::VectorXd> vectors,
                             const VectorSet& s, const SolverConfig& cfg,
                             SolveStatus status, SolveStats stats) {
    const Tolerances& tol = cfg.tolerances;
    std::sort(vectors.begin(), vectors.end(), lex_vec_less);
    std::vector<Eigen::VectorXd> unique;
    for (auto& v : vectors) {
        bool dup = false;
        for (const auto& u : unique)
            if ((u - v).lpNorm<Eigen::Infinity>() <= tol.eq_tol) {
                dup = true;
                break;
            }
        if (!dup) unique.push_back(std::move(v));
    }
    CosineResult res;
    res.value = value;
    res.status = status;
    res.stats = stats;
    if (static_cast<int>(unique.size()) > cfg.max_reported_vectors) {
        unique.resize(cfg.max_reported_vectors);
        res.vectors_truncated = true;
    }
    for (const auto& v : unique) res.active_sets.push_back(cosine_along(s, v, tol).active);
    res.cosine_vectors = std::move(unique);
    return res;
}

CosineResult finalize_min(TiePool& ties, const VectorSet& s, const SolverConfig& cfg,
                          SolveStatus status, SolveStats stats) {
    ties.prune();
    std::vector<Eigen::VectorXd> vecs;
    vecs.reserve(ties.pool.size());
    for (auto& e : ties.pool) vecs.push_back(std::move(e.second));
    return assemble_result(ties.best, std::move(vecs), s, cfg, status, stats);
}

CosineResult empty_incumbent(SolveStats stats) {
    CosineResult res;
    res.status = SolveStatus::timeout_incumbent;
    res.stats = stats;
    return res;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

enum class BasisEngine { naive, accelerated };

SolverReport basis_enumeration_impl(const VectorSet& s, const SolverConfig& cfg,
                                    BasisEngine engine) {
    const Tolerances& tol = cfg.tolerances;
    if (!is_positive_spanning(s, tol))
        throw NotPositiveSpanningError("basis_enumeration: input does not positively span");
    const int n = s.dim();
    const int k = s.size();
    auto start = Clock::now();
    Budget budget(cfg);
    SolveStats stats;
    TiePool ties(tol.eq_tol);
    bool completed = true;

    std::vector<int> combo(n);
    for (int i = 0; i < n; ++i) combo[i] = i;

    // Accelerated state: inverse of B^T maintained in place by Sherman-Morrison
    // column swaps across adjacent combinations, with periodic rebuilds to
    // bound drift. Exact values of surviving candidates are always recomputed
    // with the plain solve, so both engines produce bitwise-identical results.
    Eigen::MatrixXd binv_t(n, n), bt(n, n);
    Eigen::VectorXd w(n), delta(n), ku(n), vk(n);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(n, n);
    std::vector<int> binv_combo;
    bool binv_valid = false;
    int updates_since_rebuild = 0;

    auto rebuild_inverse = [&]() -> bool {
        for (int i = 0; i < n; ++i) bt.row(i) = s.vector(combo[i]).transpose();
        lu.compute(bt);
        lu.setThreshold(tol.rank_tol);
        if (!lu.isInvertible()) {
            binv_valid = false;
            return false;
        }
        binv_t = lu.inverse();
        binv_combo = combo;
        binv_valid = true;
        updates_since_rebuild = 0;
        return true;
    };

    do {
        ++stats.candidates_examined;
        if (budget.exceeded()) {
            completed = false;
            break;
        }
        double gamma_estimate;
        if (engine == BasisEngine::accelerated) {
            bool ok = true;
            int changed = -1, nchanged = 0;
            if (binv_valid && updates_since_rebuild < 32) {
                for (int i = 0; i < n; ++i)
                    if (binv_combo[i] != combo[i]) {
                        changed = i;
                        ++nchanged;
                    }
            } else {
                nchanged = -1;  // force a rebuild
            }
            if (nchanged == 1) {
                // Row `changed` of B^T moves by delta^T; Sherman-Morrison on
                // the maintained inverse.
                delta = s.vector(combo[changed]) - s.vector(binv_combo[changed]);
                vk.noalias() = binv_t.transpose() * delta;
                double denom = 1.0 + vk(changed);
                if (std::abs(denom) <= 1e-13) {
                    binv_valid = false;
                    ok = false;  // singular swap: prune this subset
                } else {
                    ku = binv_t.col(changed);
                    binv_t.noalias() -= ku * (vk.transpose() / denom);
                    binv_combo[changed] = combo[changed];
                    ++updates_since_rebuild;
                }
            } else if (nchanged != 0) {
                ok = rebuild_inverse();
            }
            if (!ok) continue;
            w = binv_t.rowwise().sum();
            double wn = w.norm();
            if (wn <= tol.rank_tol || !std::isfinite(wn)) continue;
            gamma_estimate = 1.0 / wn;
            if (gamma_estimate > ties.best + tol.eq_tol) continue;
            // w is the point with B^T w = e; the candidate is admissible only
            // if that point is feasible. Screen with the raw inequality before
            // paying for the exact solve (margins make the screen agree with
            // the exact cone check).
            bool infeasible = false;
            const double cap = 1.0 + tol.cone_tol * wn;
            for (int i = 0; i < k; ++i) {
                if (s.matrix().col(i).dot(w) > cap) {
                    infeasible = true;
                    break;
                }
            }
            if (infeasible) continue;
        } else {
            try {
                gamma_estimate = gram_vector(s, combo, tol).gram_value;
            } catch (const SingularBasisError&) {
                continue;
            }
            if (gamma_estimate > ties.best + tol.eq_tol) continue;
        }
        GramInfo info;
        try {
            info = gram_vector(s, combo, tol);
        } catch (const SingularBasisError&) {
            continue;
        }
        if (cone_violators(s, info.gram_vector, info.gram_value, tol).empty())
            ties.offer(info.gram_value, info.gram_vector);
    } while (next_combination(combo, k));

    stats.wall_seconds = seconds_since(start);
    SolverReport rep;
    rep.method = Method::basis_enum;
    rep.completed = completed;
    if (ties.empty()) {
        if (completed)
            throw NoCandidateFoundError("basis_enumeration: no admissible Gram candidate");
        rep.result = empty_incumbent(stats);
        return rep;
    }
    rep.result = finalize_min(ties, s, cfg, completed ? SolveStatus::exact
                                                      : SolveStatus::timeout_incumbent,
                              stats);
    return rep;
}

}  // namespace

const char* to_string(Method m) {
    switch (m) {
        case Method::basis_enum: return "basis_enum";
        case Method::kkt_enum: return "kkt_enum";
        case Method::vertex_enum: return "vertex_enum";
        case Method::random_lp: return "random_lp";
    }
    return "?";
}

std::optional<Method> method_from_name(const std::string& name) {
    for (Method m : {Method::basis_enum, Method::kkt_enum, Method::vertex_enum,
                     Method::random_lp})
        if (name == to_string(m)) return m;
    return std::nullopt;
}

SolverReport basis_enumeration(const VectorSet& s, const SolverConfig& cfg) {
    return basis_enumeration_impl(s, cfg, BasisEngine::accelerated);
}

SolverReport detail::basis_enumeration_naive(const VectorSet& s, const SolverConfig& cfg) {
    return basis_enumeration_impl(s, cfg, BasisEngine::naive);
}

SolverReport kkt_enumeration(const VectorSet& s, const SolverConfig& cfg) {
    const Tolerances& tol = cfg.tolerances;
    const int n = s.dim();
    const int k = s.size();
    if (k < 2) throw Error("kkt_enumeration: need at least two vectors");
    auto start = Clock::now();
    Budget budget(cfg);
    SolveStats stats;
    TiePool ties(tol.eq_tol);
    bool completed = true;

    for (int m = 2; m <= n + 1 && completed; ++m) {
        if (m > k) break;
        std::vector<int> combo(m);
        for (int i = 0; i < m; ++i) combo[i] = i;
        do {
            ++stats.candidates_examined;
            if (budget.exceeded()) {
                completed = false;
                break;
            }
            Eigen::MatrixXd t(n, m);
            for (int j = 0; j < m; ++j) t.col(j) = s.vector(combo[j]);
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(t, Eigen::ComputeFullU);
            const auto& sigma = svd.singularValues();
            int rank = 0;
            for (int i = 0; i < sigma.size(); ++i)
                if (sigma(i) > tol.rank_tol * sigma(0)) ++rank;

            if (rank == n) {
                // Equal-angle direction: minimum-norm solution of Gram(T) beta = e,
                // candidate x = T beta normalized.
                Eigen::MatrixXd gram = t.transpose() * t;
                Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(gram);
                cod.setThreshold(tol.rank_tol);
                Eigen::VectorXd beta = cod.solve(Eigen::VectorXd::Ones(m));
                Eigen::VectorXd z = t * beta;
                double zn = z.norm();
                if (zn <= 1e-12) continue;
                Eigen::VectorXd x = z / zn;
                for (double sign : {1.0, -1.0}) {
                    Eigen::VectorXd y = sign * x;
                    double gamma = y.dot(s.vector(combo[0]));
                    if (gamma > ties.best + tol.eq_tol) continue;
                    if (cone_violators(s, y, gamma, tol).empty()) ties.offer(gamma, y);
                }
            } else {
                // Zero-value candidates in the orthogonal complement of T:
                // require rank [T^T | -e] = n and 0 in conv(T).
                Eigen::MatrixXd aug(m, n + 1);
                aug.leftCols(n) = t.transpose();
                aug.col(n) = -Eigen::VectorXd::Ones(m);
                Eigen::JacobiSVD<Eigen::MatrixXd> svd2(aug);
                const auto& sg2 = svd2.singularValues();
                int rank2 = 0;
                for (int i = 0; i < sg2.size(); ++i)
                    if (sg2(i) > tol.rank_tol * sg2(0)) ++rank2;
                if (rank2 != n) continue;
                Eigen::MatrixXd hull(n + 1, m);
                hull.topRows(n) = t;
                hull.row(n).setOnes();
                Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
                rhs(n) = 1.0;
                if (!lp::equality_system_feasible(hull, rhs, tol.eq_tol)) continue;
                Eigen::VectorXd x = svd.matrixU().col(n - 1);  // T-perp is one-dimensional
                for (double sign : {1.0, -1.0}) {
                    Eigen::VectorXd y = sign * x;
                    if (0.0 > ties.best + tol.eq_tol) continue;
                    if (cone_violators(s, y, 0.0, tol).empty()) ties.offer(0.0, y);
                }
            }
        } while (next_combination(combo, k));
    }

    stats.wall_seconds = seconds_since(start);
    SolverReport rep;
    rep.method = Method::kkt_enum;
    rep.completed = completed;
    if (ties.empty()) {
        if (completed)
            throw NoCandidateFoundError(
                "kkt_enumeration: no subset produced an admissible candidate");
        rep.result = empty_incumbent(stats);
        return rep;
    }
    rep.result = finalize_min(ties, s, cfg, completed ? SolveStatus::exact
                                                      : SolveStatus::timeout_incumbent,
                              stats);
    return rep;
}

SolverReport vertex_enum_solver(const VectorSet& s, const SolverConfig& cfg) {
    const Tolerances& tol = cfg.tolerances;
    if (!is_positive_spanning(s, tol))
        throw NotPositiveSpanningError("vertex_enum_solver: input does not positively span");
    auto start = Clock::now();
    Budget budget(cfg);
    SolveStats stats;
    bool completed = true;

    PolytopeP p = build_polytope(s);
    VertexEnumerator en(p, tol);
    double best_norm = 0.0;
    std::vector<std::pair<double, Eigen::VectorXd>> pool;  // (norm, point)
    while (auto v = en.next()) {
        ++stats.candidates_examined;
        double nrm = v->point.norm();
        if (nrm > best_norm) best_norm = nrm;
        if (nrm >= best_norm - tol.eq_tol) pool.emplace_back(nrm, v->point);
        if (budget.exceeded()) {
            completed = false;
            break;
        }
    }
    stats.wall_seconds = seconds_since(start);
    SolverReport rep;
    rep.method = Method::vertex_enum;
    rep.completed = completed;
    if (pool.empty()) {
        if (completed) throw Error("vertex_enum_solver: bounded polytope with no vertices");
        rep.result = empty_incumbent(stats);
        return rep;
    }
    std::vector<Eigen::VectorXd> vecs;
    for (auto& e : pool)
        if (e.first >= best_norm - tol.eq_tol) vecs.push_back(e.second / e.first);
    rep.result = assemble_result(1.0 / best_norm, std::move(vecs), s, cfg,
                                 completed ? SolveStatus::exact
                                           : SolveStatus::timeout_incumbent,
                                 stats);
    return rep;
}

SolverReport random_lp_solver(const VectorSet& s, const SolverConfig& cfg) {
    const Tolerances& tol = cfg.tolerances;
    if (cfg.lp_iterations < 1) throw Error("random_lp_solver: lp_iterations must be >= 1");
    if (!is_positive_spanning(s, tol))
        throw NotPositiveSpanningError("random_lp_solver: input does not positively span");
    auto start = Clock::now();
    Budget budget(cfg);
    SolveStats stats;
    bool completed = true;

    PolytopeP p = build_polytope(s);
    const int n = s.dim();
    double best_norm = 0.0;
    std::vector<std::pair<double, Eigen::VectorXd>> pool;
    for (std::uint64_t round = 0; round < cfg.lp_iterations; ++round) {
        if (budget.exceeded()) {
            completed = false;
            break;
        }
        Rng rng = Rng::stream(cfg.rng_seed, round);
        Eigen::VectorXd c = sample_unit_sphere(rng, n);
        LpOutcome out = solve_lp(p, c, tol);
        ++stats.lps_solved;
        ++stats.candidates_examined;
        if (out.status == LpStatus::unbounded)
            throw NotPositiveSpanningError("random_lp_solver: unbounded LP round");
        if (!out.vertex) throw Error("random_lp_solver: LP returned no vertex");
        double nrm = out.vertex->point.norm();
        if (nrm > best_norm) best_norm = nrm;
        if (nrm >= best_norm - tol.eq_tol) pool.emplace_back(nrm, out.vertex->point);
    }
    stats.wall_seconds = seconds_since(start);
    SolverReport rep;
    rep.method = Method::random_lp;
    rep.completed = completed;
    if (pool.empty()) {
        rep.result = empty_incumbent(stats);
        return rep;
    }
    std::vector<Eigen::VectorXd> vecs;
    for (auto& e : pool)
        if (e.first >= best_norm - tol.eq_tol) vecs.push_back(e.second / e.first);
    rep.result = assemble_result(1.0 / best_norm, std::move(vecs), s, cfg,
                                 completed ? SolveStatus::heuristic
                                           : SolveStatus::timeout_incumbent,
                                 stats);
    return rep;
}

SolverReport run_method(Method m, const VectorSet& s, const SolverConfig& cfg) {
    switch (m) {
        case Method::basis_enum: return basis_enumeration(s, cfg);
        case Method::kkt_enum: return kkt_enumeration(s, cfg);
        case Method::vertex_enum: return vertex_enum_solver(s, cfg);
        case Method::random_lp: return random_lp_solver(s, cfg);
    }
    throw Error("run_method: unknown method");
}

Eigen::VectorXd sample_unit_sphere(Rng& rng, int n) {
    if (n < 1) throw Error("sample_unit_sphere: dimension must be positive");
    Eigen::VectorXd v(n);
    while (true) {
        for (int i = 0; i < n; ++i) v(i) = rng.normal();
        double nrm = v.norm();
        if (nrm > 1e-12) return v / nrm;
    }
}

}  // namespace cosmea
