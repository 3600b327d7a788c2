#include "cosmea/lp.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

namespace cosmea::lp {

namespace {

// Absolute tolerance for treating perturbation-expansion entries as zero.
constexpr double kLexTol = 1e-11;
constexpr std::uint64_t kMaxPivots = 10'000'000;

// Advance a sorted index combination in lexicographic order.
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

}  // namespace

int lex_sign(const Eigen::VectorXd& v, double tol) {
    for (int i = 0; i < v.size(); ++i) {
        if (v(i) > tol) return 1;
        if (v(i) < -tol) return -1;
    }
    return 0;
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
    const int m = static_cast<int>(std::min(a.size(), b.size()));
    for (int i = 0; i < m; ++i) {
        double d = a(i) - b(i);
        if (d < -tol) return true;
        if (d > tol) return false;
    }
    return false;
}

std::optional<Dictionary> make_dictionary(const Eigen::MatrixXd& a,
                                          const Eigen::VectorXd& b,
                                          std::vector<int> basis,
                                          double rank_tol) {
    const int n = static_cast<int>(a.cols());
    Eigen::MatrixXd ab(n, n);
    Eigen::VectorXd bb(n);
    for (int i = 0; i < n; ++i) {
        ab.row(i) = a.row(basis[i]);
        bb(i) = b(basis[i]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(ab);
    lu.setThreshold(rank_tol);
    if (!lu.isInvertible()) return std::nullopt;
    Dictionary d;
    d.basis = std::move(basis);
    d.binv = lu.inverse();
    d.point = d.binv * bb;
    return d;
}

Eigen::VectorXd perturbed_slack(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                const Dictionary& dict, int j) {
    const int k = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(k + 1);
    v(0) = b(j) - a.row(j).dot(dict.point);
    v(1 + j) += 1.0;
    Eigen::RowVectorXd coef = a.row(j) * dict.binv;
    for (int pos = 0; pos < n; ++pos) v(1 + dict.basis[pos]) -= coef(pos);
    return v;
}

bool lex_feasible(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                  const Dictionary& dict, double tol) {
    const int k = static_cast<int>(a.rows());
    int pos = 0;
    for (int j = 0; j < k; ++j) {
        if (pos < static_cast<int>(dict.basis.size()) && dict.basis[pos] == j) {
            ++pos;
            continue;
        }
        if (lex_sign(perturbed_slack(a, b, dict, j), tol) <= 0) return false;
    }
    return true;
}

PivotResult pivot_edge(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                       const Dictionary& dict, int leave_pos, double tol) {
    const int k = static_cast<int>(a.rows());
    Eigen::VectorXd dir = -dict.binv.col(leave_pos);
    PivotResult res;
    int enter = -1;
    Eigen::VectorXd best_ratio;
    int pos = 0;
    for (int j = 0; j < k; ++j) {
        if (pos < static_cast<int>(dict.basis.size()) && dict.basis[pos] == j) {
            ++pos;
            continue;
        }
        double av = a.row(j).dot(dir);
        if (av <= tol) continue;
        Eigen::VectorXd ratio = perturbed_slack(a, b, dict, j) / av;
        if (enter < 0 || lex_less(ratio, best_ratio, kLexTol)) {
            enter = j;
            best_ratio = std::move(ratio);
        }
    }
    if (enter < 0) {
        res.unbounded = true;
        res.direction = std::move(dir);
        return res;
    }
    res.basis = dict.basis;
    res.basis[leave_pos] = enter;
    std::sort(res.basis.begin(), res.basis.end());
    return res;
}

std::optional<std::vector<int>> reverse_search_parent(const Eigen::MatrixXd& a,
                                                      const Eigen::VectorXd& b,
                                                      const Dictionary& dict,
                                                      double tol) {
    const int n = static_cast<int>(a.cols());
    for (int p = 0; p < n; ++p) {
        if (lex_sign(dict.binv.col(p), kLexTol) < 0) {
            PivotResult res = pivot_edge(a, b, dict, p, tol);
            if (res.unbounded)
                throw Error("reverse_search_parent: improving edge is unbounded");
            return res.basis;
        }
    }
    return std::nullopt;  // root: all columns lexicographically positive
}

CrashResult find_initial_vertex(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                const Tolerances& tol) {
    const int n = static_cast<int>(a.cols());
    const int k = static_cast<int>(a.rows());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<int> tight;
    while (static_cast<int>(tight.size()) < n) {
        // Pick a direction in the null space of the rows collected so far.
        Eigen::VectorXd v;
        if (tight.empty()) {
            v = Eigen::VectorXd::Unit(n, 0);
        } else {
            Eigen::MatrixXd at(static_cast<int>(tight.size()), n);
            for (int i = 0; i < static_cast<int>(tight.size()); ++i)
                at.row(i) = a.row(tight[i]);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(at);
            lu.setThreshold(tol.rank_tol);
            Eigen::MatrixXd ker = lu.kernel();
            v = ker.col(0).normalized();
        }
        // Walk to the first blocking constraint along +v, falling back to -v.
        auto ratio_along = [&](const Eigen::VectorXd& dir) -> std::pair<int, double> {
            int arg = -1;
            double best = 0.0;
            for (int j = 0; j < k; ++j) {
                if (std::find(tight.begin(), tight.end(), j) != tight.end()) continue;
                double av = a.row(j).dot(dir);
                if (av <= tol.rank_tol) continue;
                double t = (b(j) - a.row(j).dot(x)) / av;
                if (arg < 0 || t < best) {
                    arg = j;
                    best = t;
                }
            }
            return {arg, best};
        };
        auto [jp, tp] = ratio_along(v);
        if (jp >= 0) {
            x += std::max(tp, 0.0) * v;
            tight.push_back(jp);
            continue;
        }
        auto [jm, tm] = ratio_along(-v);
        if (jm >= 0) {
            x -= std::max(tm, 0.0) * v;
            tight.push_back(jm);
            continue;
        }
        CrashResult res;
        res.recession = v;
        return res;
    }
    std::sort(tight.begin(), tight.end());
    auto dict = make_dictionary(a, b, tight, tol.rank_tol);
    if (!dict)
        throw Error("find_initial_vertex: collected constraints are singular");
    CrashResult res;
    res.found_vertex = true;
    res.dict = std::move(*dict);
    return res;
}

MaximizeResult maximize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                        const Eigen::VectorXd& c, Dictionary dict,
                        const Tolerances& tol) {
    const int n = static_cast<int>(a.cols());
    MaximizeResult out;
    double last_obj = c.dot(dict.point);
    int stall = 0;
    const int stall_limit = 50;
    while (true) {
        Eigen::VectorXd y = dict.binv.transpose() * c;
        int enter_pos = -1;
        if (stall < stall_limit) {
            double most = -tol.eq_tol;
            for (int p = 0; p < n; ++p) {
                if (y(p) < most) {
                    most = y(p);
                    enter_pos = p;
                }
            }
        } else {
            for (int p = 0; p < n; ++p) {
                if (y(p) < -tol.eq_tol) {
                    enter_pos = p;
                    break;
                }
            }
        }
        if (enter_pos < 0) {
            out.dict = std::move(dict);
            return out;
        }
        PivotResult piv = pivot_edge(a, b, dict, enter_pos, tol.rank_tol);
        if (piv.unbounded) {
            out.unbounded = true;
            out.direction = std::move(piv.direction);
            return out;
        }
        auto next = make_dictionary(a, b, piv.basis, tol.rank_tol);
        if (!next) throw Error("maximize: pivot produced a singular basis");
        dict = std::move(*next);
        ++out.pivots;
        if (out.pivots > kMaxPivots) throw Error("maximize: pivot limit exceeded");
        double obj = c.dot(dict.point);
        if (obj > last_obj + 1e-13 * (1.0 + std::abs(last_obj)))
            stall = 0;
        else
            ++stall;
        last_obj = obj;
    }
}

std::optional<Dictionary> lex_feasible_basis_at(const Eigen::MatrixXd& a,
                                                const Eigen::VectorXd& b,
                                                const Eigen::VectorXd& point,
                                                const Tolerances& tol) {
    const int n = static_cast<int>(a.cols());
    const int k = static_cast<int>(a.rows());
    std::vector<int> tight;
    for (int j = 0; j < k; ++j)
        if (std::abs(b(j) - a.row(j).dot(point)) <= tol.eq_tol) tight.push_back(j);
    if (static_cast<int>(tight.size()) < n) return std::nullopt;
    std::vector<int> pick(n);
    for (int i = 0; i < n; ++i) pick[i] = i;
    do {
        std::vector<int> basis(n);
        for (int i = 0; i < n; ++i) basis[i] = tight[pick[i]];
        auto dict = make_dictionary(a, b, basis, tol.rank_tol);
        if (!dict) continue;
        if ((dict->point - point).lpNorm<Eigen::Infinity>() > 1e-7) continue;
        if (lex_feasible(a, b, *dict, kLexTol)) return dict;
    } while (next_combination(pick, static_cast<int>(tight.size())));
    return std::nullopt;
}

bool equality_system_feasible(const Eigen::MatrixXd& m, const Eigen::VectorXd& q,
                              double tol) {
    const int rows = static_cast<int>(m.rows());
    const int cols = static_cast<int>(m.cols());
    const double piv_tol = 1e-11;
    // Tableau [M | I | q] with q flipped nonnegative; minimize the sum of the
    // artificial variables with Bland's rule.
    Eigen::MatrixXd t(rows, cols + rows + 1);
    for (int i = 0; i < rows; ++i) {
        double sign = q(i) < 0 ? -1.0 : 1.0;
        t.row(i).head(cols) = sign * m.row(i);
        t.row(i).segment(cols, rows).setZero();
        t(i, cols + i) = 1.0;
        t(i, cols + rows) = sign * q(i);
    }
    std::vector<int> basic(rows);
    for (int i = 0; i < rows; ++i) basic[i] = cols + i;
    // Reduced cost row for cost = sum of artificials.
    Eigen::RowVectorXd cost = Eigen::RowVectorXd::Zero(cols + rows);
    for (int j = 0; j < cols + rows; ++j) {
        double cj = j >= cols ? 1.0 : 0.0;
        cost(j) = cj - t.col(j).head(rows).sum();
    }
    std::uint64_t pivots = 0;
    while (true) {
        int enter = -1;
        for (int j = 0; j < cols + rows; ++j) {
            if (cost(j) < -piv_tol) {
                enter = j;
                break;
            }
        }
        if (enter < 0) break;
        int leave = -1;
        double best = 0.0;
        for (int i = 0; i < rows; ++i) {
            if (t(i, enter) <= piv_tol) continue;
            double ratio = t(i, cols + rows) / t(i, enter);
            if (leave < 0 || ratio < best - piv_tol ||
                (ratio < best + piv_tol && basic[i] < basic[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave < 0) break;  // numerically unbounded; fall through to the residual check
        double piv = t(leave, enter);
        t.row(leave) /= piv;
        for (int i = 0; i < rows; ++i) {
            if (i == leave) continue;
            double f = t(i, enter);
            if (f != 0.0) t.row(i) -= f * t.row(leave);
        }
        cost -= cost(enter) * t.row(leave).head(cols + rows);
        basic[leave] = enter;
        if (++pivots > kMaxPivots) throw Error("equality_system_feasible: pivot limit exceeded");
    }
    double residual = 0.0;
    for (int i = 0; i < rows; ++i)
        if (basic[i] >= cols) residual += std::abs(t(i, cols + rows));
    return residual <= tol;
}

}  // namespace cosmea::lp
