#include "cosmea/generators.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "cosmea/solvers.hpp"

namespace cosmea {

namespace {

TestCase with_spec(VectorSet set, std::optional<double> cm, GeneratorSpec spec) {
    TestCase tc{std::move(set), cm, std::move(spec), {}};
    return tc;
}

// A cosine vector known in closed form for the untransformed set, when the
// family has one that is cheap to write down.
std::optional<Eigen::VectorXd> closed_form_cosine_vector(const TestCase& tc) {
    if (!tc.spec) return std::nullopt;
    for (const auto& t : tc.transform_log)
        if (t.kind == "rotate") return std::nullopt;
    switch (tc.spec->family) {
        case Family::canonical_max:
        case Family::max_delta_shift:
        case Family::aug_max_delta_shift: {
            int n = tc.set.dim();
            return Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
        }
        default:
            return std::nullopt;
    }
}

}  // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::canonical_min: return "min_can_pb";
        case Family::canonical_max: return "max_can_pb";
        case Family::uniform_simplex: return "uniform_simplex_pb";
        case Family::min_delta_shift: return "min_delta_shift_pb";
        case Family::max_delta_shift: return "max_delta_shift_pb";
        case Family::aug_max_delta_shift: return "aug_max_delta_shift_pb";
        case Family::optimal_orthogonal: return "opt_ortho_pb";
        case Family::random_pss: return "random_pss";
    }
    return "?";
}

std::optional<Family> family_from_name(const std::string& name) {
    for (Family f : {Family::canonical_min, Family::canonical_max, Family::uniform_simplex,
                     Family::min_delta_shift, Family::max_delta_shift,
                     Family::aug_max_delta_shift, Family::optimal_orthogonal,
                     Family::random_pss})
        if (name == family_name(f)) return f;
    return std::nullopt;
}

TestCase canonical_minimal(int n) {
    if (n < 1) throw Error("canonical_minimal: n must be >= 1");
    Eigen::MatrixXd m(n, n + 1);
    m.leftCols(n) = Eigen::MatrixXd::Identity(n, n);
    m.col(n) = -Eigen::VectorXd::Ones(n);
    double cm = 1.0 / std::sqrt(double(n) * n + 2.0 * (n - 1) * std::sqrt(double(n)));
    GeneratorSpec spec;
    spec.family = Family::canonical_min;
    spec.dim = n;
    return with_spec(normalize_set(m), cm, spec);
}

TestCase canonical_maximal(int n) {
    if (n < 1) throw Error("canonical_maximal: n must be >= 1");
    Eigen::MatrixXd m(n, 2 * n);
    m.leftCols(n) = Eigen::MatrixXd::Identity(n, n);
    m.rightCols(n) = -Eigen::MatrixXd::Identity(n, n);
    GeneratorSpec spec;
    spec.family = Family::canonical_max;
    spec.dim = n;
    return with_spec(normalize_set(m), 1.0 / std::sqrt(double(n)), spec);
}

Eigen::MatrixXd uniform_simplex(int n) {
    if (n < 2) throw Error("uniform_simplex: n must be >= 2");
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n + 1);
    for (int i = 1; i <= n; ++i) {
        double a = std::sqrt(double(n - i + 1) * (n + 1) / (double(n) * (n - i + 2)));
        p(i - 1, i - 1) = a;
        for (int j = i; j < n + 1; ++j) p(i - 1, j) = -a / (n - i + 1);
    }
    return p;
}

TestCase minimal_delta_shift(int n, double delta) {
    if (n < 2) throw Error("minimal_delta_shift: n must be >= 2");
    if (!(delta >= 0.0 && delta < 1.0 / n))
        throw InvalidDeltaError("minimal_delta_shift: delta must lie in [0, 1/n)");
    Eigen::MatrixXd p0 = uniform_simplex(n);
    double alpha = n / std::sqrt(double(n) * n * delta * delta - 2.0 * n * delta + double(n) * n);
    Eigen::MatrixXd p(n, n + 1);
    p.col(0) = p0.col(0);
    for (int j = 1; j <= n; ++j) {
        p.col(j) = alpha * (p0.col(j) + delta * Eigen::VectorXd::Unit(n, 0));
    }
    double cm = (1.0 - delta * n) /
                std::sqrt(double(n) * n * delta * delta - 2.0 * n * delta + double(n) * n);
    GeneratorSpec spec;
    spec.family = Family::min_delta_shift;
    spec.dim = n;
    spec.delta = delta;
    return with_spec(normalize_set(p), cm, spec);
}

double delta_for_target_min(int n, double c) {
    if (n < 2) throw Error("delta_for_target_min: n must be >= 2");
    if (!(c > 0.0 && c <= 1.0 / n + 1e-15))
        throw TargetOutOfRangeError("delta_for_target_min: need 0 < c <= 1/n");
    double inner = -(double(n) * n - 1.0) * (std::pow(c, 4) - c * c);
    double delta = 1.0 / n + std::sqrt(std::max(inner, 0.0)) / (n * (c * c - 1.0));
    return std::clamp(delta, 0.0, (1.0 / n) * (1.0 - 1e-15));
}

TestCase maximal_delta_shift(int n, double delta) {
    if (n < 2) throw Error("maximal_delta_shift: n must be >= 2");
    if (!(delta >= 0.0 && delta < 1.0 / n))
        throw InvalidDeltaError("maximal_delta_shift: delta must lie in [0, 1/n)");
    double alpha = 1.0 / std::sqrt(delta * delta * n - 2.0 * delta + 1.0);
    Eigen::MatrixXd b =
        Eigen::MatrixXd::Identity(n, n) - delta * Eigen::MatrixXd::Ones(n, n);
    Eigen::MatrixXd m(n, 2 * n);
    m.leftCols(n) = alpha * b;
    m.rightCols(n) = -alpha * b;
    double cm = (1.0 - delta * n) /
                std::sqrt(double(n) * (delta * delta * n - 2.0 * delta + 1.0));
    GeneratorSpec spec;
    spec.family = Family::max_delta_shift;
    spec.dim = n;
    spec.delta = delta;
    return with_spec(normalize_set(m), cm, spec);
}

double delta_for_target_max(int n, double c) {
    if (n < 2) throw Error("delta_for_target_max: n must be >= 2");
    if (!(c > 0.0 && c <= 1.0 / std::sqrt(double(n)) + 1e-15))
        throw TargetOutOfRangeError("delta_for_target_max: need 0 < c <= 1/sqrt(n)");
    double inner = (n - 1.0) * (c * c - std::pow(c, 4));
    double delta = 1.0 / n + std::sqrt(std::max(inner, 0.0)) / (n * (c * c - 1.0));
    return std::clamp(delta, 0.0, (1.0 / n) * (1.0 - 1e-15));
}

TestCase optimal_orthogonal(int n, int s) {
    if (n < 1) throw Error("optimal_orthogonal: n must be >= 1");
    if (s < n + 1 || s > 2 * n)
        throw InvalidSizeError("optimal_orthogonal: need n+1 <= s <= 2n");
    const int blocks = s - n;
    const int lo = n / blocks;
    const int rem = n % blocks;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, s);
    int coord = 0, col = 0;
    for (int t = 0; t < blocks; ++t) {
        int q = t < rem ? lo + 1 : lo;  // large blocks first
        if (q == 1) {
            m(coord, col) = 1.0;
            m(coord, col + 1) = -1.0;
            col += 2;
        } else {
            Eigen::MatrixXd sub = uniform_simplex(q);
            m.block(coord, col, q, q + 1) = sub;
            col += q + 1;
        }
        coord += q;
    }
    double denom = double(blocks - rem) * lo * lo + double(rem) * (lo + 1) * (lo + 1);
    GeneratorSpec spec;
    spec.family = Family::optimal_orthogonal;
    spec.dim = n;
    spec.size = s;
    return with_spec(normalize_set(m), 1.0 / std::sqrt(denom), spec);
}

TestCase random_pss(int n, std::uint64_t seed) {
    if (n < 2) throw Error("random_pss: n must be >= 2");
    Rng rng(seed);
    Eigen::MatrixXd basis(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) basis(i, j) = rng.uniform01();
    // Strict diagonal dominance by columns makes the matrix invertible.
    for (int j = 0; j < n; ++j) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            if (i != j) off += std::abs(basis(i, j));
        basis(j, j) = off + 1.0;
    }
    // Random cover of the columns; one negated sum per nonempty part.
    int parts = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n - 1)));
    std::vector<std::vector<int>> cover(parts);
    for (int c = 0; c < n; ++c)
        cover[rng.uniform_int(static_cast<std::uint64_t>(parts))].push_back(c);
    std::vector<Eigen::VectorXd> extra;
    for (const auto& part : cover) {
        if (part.empty()) continue;
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        for (int c : part) v += basis.col(c);
        extra.push_back(-v);
    }
    Eigen::MatrixXd m(n, n + static_cast<int>(extra.size()));
    m.leftCols(n) = basis;
    for (int j = 0; j < static_cast<int>(extra.size()); ++j) m.col(n + j) = extra[j];
    GeneratorSpec spec;
    spec.family = Family::random_pss;
    spec.dim = n;
    spec.seed = seed;
    return with_spec(normalize_set(m), std::nullopt, spec);
}

TestCase augment(const TestCase& tc, int count, std::uint64_t seed) {
    if (!tc.known_cm)
        throw Error("augment: the case needs a known cosine measure");
    if (count < 0) throw Error("augment: count must be >= 0");
    if (count == 0) return tc;
    const Tolerances tol;
    const int n = tc.set.dim();
    Eigen::VectorXd ustar;
    if (auto closed = closed_form_cosine_vector(tc)) {
        ustar = *closed;
    } else {
        SolverReport rep = vertex_enum_solver(tc.set);
        if (rep.result.cosine_vectors.empty())
            throw Error("augment: could not obtain a cosine vector");
        ustar = rep.result.cosine_vectors.front();
    }
    const double cap = *tc.known_cm - tol.eq_tol;
    Eigen::MatrixXd m(n, tc.set.size() + count);
    m.leftCols(tc.set.size()) = tc.set.matrix();
    Rng rng(seed);
    for (int added = 0; added < count; ++added) {
        std::uint64_t rejected = 0;
        while (true) {
            Eigen::VectorXd v = sample_unit_sphere(rng, n);
            if (ustar.dot(v) <= cap) {
                m.col(tc.set.size() + added) = v;
                break;
            }
            if (++rejected > 1'000'000)
                throw AugmentationStalledError("augment: rejection sampling stalled");
        }
    }
    TestCase out{normalize_set(m), tc.known_cm, tc.spec, tc.transform_log};
    out.transform_log.push_back(TransformEntry{"augment", seed, count});
    return out;
}

Eigen::MatrixXd random_rotation(int n, std::uint64_t seed) {
    if (n < 1) throw Error("random_rotation: n must be >= 1");
    Rng rng(seed);
    Eigen::MatrixXd g(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Sign convention diag(R) > 0 makes the distribution Haar on O(n).
    for (int j = 0; j < n; ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    if (q.determinant() < 0) q.col(n - 1) = -q.col(n - 1);
    return q;
}

TestCase rotate(const TestCase& tc, std::uint64_t seed) {
    Eigen::MatrixXd q = random_rotation(tc.set.dim(), seed);
    TestCase out{normalize_set(q * tc.set.matrix()), tc.known_cm, tc.spec, tc.transform_log};
    out.transform_log.push_back(TransformEntry{"rotate", seed, 0});
    return out;
}

TestCase permute(const TestCase& tc, std::uint64_t seed) {
    Rng rng(seed);
    const int k = tc.set.size();
    std::vector<int> perm(k);
    for (int i = 0; i < k; ++i) perm[i] = i;
    for (int i = k - 1; i > 0; --i) {
        int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(i + 1)));
        std::swap(perm[i], perm[j]);
    }
    Eigen::MatrixXd m(tc.set.dim(), k);
    for (int i = 0; i < k; ++i) m.col(i) = tc.set.vector(perm[i]);
    TestCase out{VectorSet(std::move(m)), tc.known_cm, tc.spec, tc.transform_log};
    out.transform_log.push_back(TransformEntry{"permute", seed, 0});
    return out;
}

TestCase make_case(const GeneratorSpec& spec) {
    switch (spec.family) {
        case Family::canonical_min:
            return canonical_minimal(spec.dim);
        case Family::canonical_max:
            return canonical_maximal(spec.dim);
        case Family::uniform_simplex: {
            TestCase tc = minimal_delta_shift(spec.dim, 0.0);
            tc.spec->family = Family::uniform_simplex;
            tc.spec->delta.reset();
            return tc;
        }
        case Family::min_delta_shift:
            if (!spec.delta) throw Error("make_case: min_delta_shift needs delta");
            return minimal_delta_shift(spec.dim, *spec.delta);
        case Family::max_delta_shift:
            if (!spec.delta) throw Error("make_case: max_delta_shift needs delta");
            return maximal_delta_shift(spec.dim, *spec.delta);
        case Family::aug_max_delta_shift: {
            if (!spec.delta) throw Error("make_case: aug_max_delta_shift needs delta");
            int count = spec.augment_count.value_or(spec.dim * spec.dim);
            TestCase base = maximal_delta_shift(spec.dim, *spec.delta);
            TestCase tc = augment(base, count, spec.seed.value_or(0));
            tc.spec = spec;
            tc.spec->augment_count = count;
            return tc;
        }
        case Family::optimal_orthogonal:
            if (!spec.size) throw Error("make_case: optimal_orthogonal needs size");
            return optimal_orthogonal(spec.dim, *spec.size);
        case Family::random_pss: {
            TestCase tc = random_pss(spec.dim, spec.seed.value_or(0));
            tc.spec = spec;
            tc.spec->seed = spec.seed.value_or(0);
            return tc;
        }
    }
    throw Error("make_case: unknown family");
}

std::optional<double> family_known_cm(const GeneratorSpec& spec) {
    const int n = spec.dim;
    switch (spec.family) {
        case Family::canonical_min:
            return 1.0 / std::sqrt(double(n) * n + 2.0 * (n - 1) * std::sqrt(double(n)));
        case Family::canonical_max:
            return 1.0 / std::sqrt(double(n));
        case Family::uniform_simplex:
            return 1.0 / n;
        case Family::min_delta_shift: {
            double d = spec.delta.value_or(0.0);
            return (1.0 - d * n) /
                   std::sqrt(double(n) * n * d * d - 2.0 * n * d + double(n) * n);
        }
        case Family::max_delta_shift:
        case Family::aug_max_delta_shift: {
            double d = spec.delta.value_or(0.0);
            return (1.0 - d * n) / std::sqrt(double(n) * (d * d * n - 2.0 * d + 1.0));
        }
        case Family::optimal_orthogonal: {
            if (!spec.size) return std::nullopt;
            int blocks = *spec.size - n;
            if (blocks < 1) return std::nullopt;
            int lo = n / blocks, rem = n % blocks;
            return 1.0 / std::sqrt(double(blocks - rem) * lo * lo +
                                   double(rem) * (lo + 1) * (lo + 1));
        }
        case Family::random_pss:
            return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace cosmea
