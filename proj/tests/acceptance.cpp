// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are fixed in code next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cosmea/bench.hpp"
#include "cosmea/generators.hpp"
#include "cosmea/polytope.hpp"
#include "cosmea/solvers.hpp"
#include "cosmea/testset_io.hpp"

using namespace cosmea;
namespace fs = std::filesystem;

namespace {

struct Ctx {
    int failures = 0;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            ++failures;
            if (detail.size() < 2000) detail += "\n    - " + what;
        }
    }
};

std::string fnum(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::vector<int> ortho_sizes(int n) {
    std::vector<int> sizes;
    for (double f : {1.25, 1.75}) {
        int s = std::clamp(static_cast<int>(f * n), n + 1, 2 * n);
        if (std::find(sizes.begin(), sizes.end(), s) == sizes.end()) sizes.push_back(s);
    }
    return sizes;
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("cosmea_accept_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// --- criterion 1 -----------------------------------------------------------
// Closed-form families reproduced by all three exact methods within 1e-8.

void criterion_closed_forms(Ctx& c) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<TestCase> cases;
    for (int n = 2; n <= 8; ++n) {
        cases.push_back(canonical_minimal(n));
        cases.push_back(canonical_maximal(n));
        for (double delta : {0.0, 1.0 / (2.0 * n), 2.0 / (3.0 * n)}) {
            cases.push_back(minimal_delta_shift(n, delta));
            cases.push_back(maximal_delta_shift(n, delta));
        }
        for (int s : ortho_sizes(n)) cases.push_back(optimal_orthogonal(n, s));
    }
    for (const auto& tc : cases) {
        double truth = *tc.known_cm;
        for (Method m : {Method::basis_enum, Method::kkt_enum, Method::vertex_enum}) {
            double v = run_method(m, tc.set).result.value;
            c.require(std::abs(v - truth) <= 1e-8,
                      std::string(family_name(tc.spec->family)) + " n=" +
                          std::to_string(tc.set.dim()) + " " + to_string(m) + ": |" +
                          fnum(v) + " - " + fnum(truth) + "| > 1e-8");
        }
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.require(secs < 300.0, "closed-form sweep took " + fnum(secs) + " s (>= 300)");
}

// --- criterion 2 -----------------------------------------------------------
// delta-for-target round trips: 20 targets per family per dimension.

void criterion_target_round_trips(Ctx& c) {
    for (int n = 2; n <= 6; ++n) {
        for (int i = 1; i <= 20; ++i) {
            double cmin = (i / 20.0) * (1.0 / n);
            double d = delta_for_target_min(n, cmin);
            double v = vertex_enum_solver(minimal_delta_shift(n, d).set).result.value;
            c.require(std::abs(v - cmin) <= 1e-8,
                      "min target n=" + std::to_string(n) + " c=" + fnum(cmin) +
                          " got " + fnum(v));

            double cmax = (i / 20.0) / std::sqrt(double(n));
            double d2 = delta_for_target_max(n, cmax);
            double v2 = vertex_enum_solver(maximal_delta_shift(n, d2).set).result.value;
            c.require(std::abs(v2 - cmax) <= 1e-8,
                      "max target n=" + std::to_string(n) + " c=" + fnum(cmax) +
                          " got " + fnum(v2));
        }
    }
}

// --- criterion 3 -----------------------------------------------------------
// Rotation/permutation and augmentation invariance.

void criterion_invariance(Ctx& c) {
    for (int n = 2; n <= 6; ++n) {
        std::vector<TestCase> bases = {canonical_minimal(n),
                                       maximal_delta_shift(n, 1.0 / (2.0 * n)),
                                       optimal_orthogonal(n, ortho_sizes(n).back())};
        for (const auto& tc : bases) {
            double truth = *tc.known_cm;
            for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
                TestCase moved = permute(rotate(tc, seed), seed + 50);
                for (Method m :
                     {Method::basis_enum, Method::kkt_enum, Method::vertex_enum}) {
                    double v = run_method(m, moved.set).result.value;
                    c.require(std::abs(v - truth) <= 1e-9,
                              std::string("rotation ") + family_name(tc.spec->family) +
                                  " n=" + std::to_string(n) + " " + to_string(m) +
                                  " seed=" + std::to_string(seed) + ": " + fnum(v) +
                                  " vs " + fnum(truth));
                }
            }
        }
        // augmentation by n^2 vectors, three seeds
        TestCase base = maximal_delta_shift(n, 1.0 / (2.0 * n));
        for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
            TestCase aug = augment(base, n * n, seed);
            double v = vertex_enum_solver(aug.set).result.value;
            c.require(std::abs(v - *base.known_cm) <= 1e-9,
                      "augment n=" + std::to_string(n) + " seed=" + std::to_string(seed) +
                          " vertex_enum: " + fnum(v) + " vs " + fnum(*base.known_cm));
            if (n <= 4) {
                double vb = basis_enumeration(aug.set).result.value;
                c.require(std::abs(vb - *base.known_cm) <= 1e-9,
                          "augment n=" + std::to_string(n) + " basis_enum drifted");
            }
        }
    }
}

// --- criterion 4 -----------------------------------------------------------
// Reformulation identity over the default corpus grid with n <= 6.

void criterion_reformulation(Ctx& c) {
    fs::path root = fresh_dir("c4");
    auto plan = io::default_grid_plan({2, 3, 4, 5, 6}, 404);
    fs::path manifest = io::build_corpus(plan, root);
    for (const auto& entry : io::load_manifest(manifest)) {
        TestCase tc = io::load_case(root / entry.path);
        double basis_value = basis_enumeration(tc.set).result.value;
        auto verts = all_vertices(build_polytope(tc.set));
        double max_norm = 0.0;
        for (const auto& v : verts) max_norm = std::max(max_norm, v.point.norm());
        c.require(std::abs(1.0 / max_norm - basis_value) <= 1e-8,
                  entry.path + ": 1/max-vertex-norm " + fnum(1.0 / max_norm) +
                      " vs basis " + fnum(basis_value));
        for (const auto& v : verts) {
            if (v.point.norm() < max_norm - 1e-9) continue;
            GramInfo g = vertex_to_gram(tc.set, v);
            c.require(cone_violators(tc.set, g.gram_vector, g.gram_value).empty(),
                      entry.path + ": furthest vertex maps to an inadmissible candidate");
            c.require(std::abs(g.gram_value - basis_value) <= 1e-8,
                      entry.path + ": vertex Gram value " + fnum(g.gram_value) +
                          " vs basis " + fnum(basis_value));
        }
    }
}

// --- criterion 5 -----------------------------------------------------------
// Cross-method agreement on unknown-truth random spanning sets.

void criterion_random_agreement(Ctx& c) {
    int hits = 0, total = 0;
    for (int n = 2; n <= 6; ++n) {
        for (int inst = 0; inst < 20; ++inst) {
            std::uint64_t seed = mix64(5000 + 97ull * n + inst);
            TestCase tc = random_pss(n, seed);
            double a = basis_enumeration(tc.set).result.value;
            double b = kkt_enumeration(tc.set).result.value;
            double v = vertex_enum_solver(tc.set).result.value;
            double dev = std::max({std::abs(a - b), std::abs(a - v), std::abs(b - v)});
            c.require(dev <= 1e-8, "exact methods disagree by " + fnum(dev) + " at n=" +
                                       std::to_string(n) + " inst=" + std::to_string(inst));
            SolverConfig cfg;
            cfg.lp_iterations = 200 * static_cast<std::uint64_t>(n);
            cfg.rng_seed = seed;
            double r = random_lp_solver(tc.set, cfg).result.value;
            c.require(r >= a - 1e-8, "random_lp undershoots the exact value at n=" +
                                         std::to_string(n) + " inst=" + std::to_string(inst));
            ++total;
            if (std::abs(r - a) <= 1e-8) ++hits;
        }
    }
    c.require(hits >= (total * 95) / 100,
              "random_lp matched the exact value on only " + std::to_string(hits) + "/" +
                  std::to_string(total) + " instances");
}

// --- criterion 6 -----------------------------------------------------------
// Brute-force oracles for vertex enumeration, Gram values, rank-1 updates.

void criterion_brute_force_oracles(Ctx& c) {
    std::vector<VectorSet> sets;
    for (int n = 2; n <= 5; ++n)
        for (std::uint64_t seed : {201ull, 202ull, 203ull})
            sets.push_back(random_pss(n, seed).set);
    sets.push_back(canonical_maximal(5).set);
    sets.push_back(optimal_orthogonal(5, 8).set);
    sets.push_back(maximal_delta_shift(4, 0.1).set);
    sets.push_back(augment(canonical_maximal(3), 5, 31).set);
    sets.push_back(minimal_delta_shift(5, 0.15).set);
    for (const auto& s : sets) {
        if (s.size() > 12) continue;
        auto rs = all_vertices(build_polytope(s));
        auto bf = brute_force_vertices(build_polytope(s));
        bool ok = rs.size() == bf.size();
        if (ok)
            for (const auto& va : rs) {
                bool found = false;
                for (const auto& vb : bf)
                    if ((va.point - vb.point).lpNorm<Eigen::Infinity>() <= 1e-8) found = true;
                ok = ok && found;
            }
        c.require(ok, "vertex sets differ from brute force at n=" + std::to_string(s.dim()) +
                          " k=" + std::to_string(s.size()));
    }

    Rng rng(606);
    int checked = 0;
    while (checked < 100) {
        int n = 2 + static_cast<int>(rng.uniform_int(7));
        Eigen::MatrixXd m(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) m(i, j) = rng.normal();
        VectorSet s = normalize_set(m);
        GramInfo info;
        try {
            info = gram_vector(s, [&] {
                std::vector<int> idx(n);
                for (int i = 0; i < n; ++i) idx[i] = i;
                return idx;
            }());
        } catch (const SingularBasisError&) {
            continue;
        }
        Eigen::MatrixXd g = s.matrix().transpose() * s.matrix();
        Eigen::VectorXd e = Eigen::VectorXd::Ones(n);
        double denom = e.dot(g.inverse() * e);
        if (!(denom > 1e-6)) continue;  // skip ill-conditioned draws
        double oracle = 1.0 / std::sqrt(denom);
        c.require(std::abs(info.gram_value - oracle) <= 1e-10,
                  "gram value " + fnum(info.gram_value) + " vs closed form " + fnum(oracle));
        ++checked;
    }

    Rng rng2(707);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 3 + static_cast<int>(rng2.uniform_int(4));
        Eigen::MatrixXd g(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) g(i, j) = rng2.normal();
        Eigen::MatrixXd a = g * g.transpose() + 0.3 * Eigen::MatrixXd::Identity(n, n);
        Eigen::VectorXd u(n), v(n);
        for (int i = 0; i < n; ++i) {
            u(i) = rng2.normal();
            v(i) = rng2.normal();
        }
        Eigen::MatrixXd a_inv = a.inverse();
        if (std::abs(1.0 + v.dot(a_inv * u)) < 1e-3) continue;
        Eigen::MatrixXd upd = rank1_update_inverse(a_inv, u, v);
        Eigen::MatrixXd direct = (a + u * v.transpose()).inverse();
        c.require((upd - direct).norm() / direct.norm() <= 1e-9,
                  "rank-1 update drifted from direct inversion");
    }
}

// --- criterion 7 -----------------------------------------------------------
// Desk-scale qualitative findings: minimal and orthogonal sets are easy for
// basis/vertex/random_lp, and the kkt profile is dominated by basis.

void criterion_desk_scale_profiles(Ctx& c) {
    fs::path root = fresh_dir("c7");
    std::vector<GeneratorSpec> plan;
    for (int n = 2; n <= 6; ++n) {
        plan.push_back({Family::canonical_min, n, {}, {}, {}, {}, {}});
        for (double delta : {0.0, 1.0 / (2.0 * n), 2.0 / (3.0 * n)})
            plan.push_back({Family::min_delta_shift, n, delta, {}, {}, {}, {}});
        for (int s : ortho_sizes(n))
            plan.push_back({Family::optimal_orthogonal, n, {}, s, {}, {}, {}});
    }
    fs::path manifest = io::build_corpus(plan, root);

    bench::BenchPlan bp;
    bp.manifest = manifest;
    bp.methods = {Method::basis_enum, Method::kkt_enum, Method::vertex_enum,
                  Method::random_lp};
    bp.budget_seconds = 60;
    bp.rotations_per_instance = 3;
    bp.master_seed = 7;
    bp.lp_iterations = 1200;
    auto records = bench::run_benchmark(bp);

    for (const auto& r : records) {
        c.require(!r.failed, "bench case failed: " + r.case_id);
        if (r.failed || !r.correct_digits) continue;
        if (r.method != Method::kkt_enum)
            c.require(*r.correct_digits >= 8.0,
                      r.case_id + " " + to_string(r.method) + ": only " +
                          fnum(*r.correct_digits) + " digits");
    }
    auto profile = bench::accuracy_profile(records, bench::default_digit_grid());
    const auto& basis = profile.fraction.at(Method::basis_enum);
    const auto& kkt = profile.fraction.at(Method::kkt_enum);
    for (size_t i = 0; i < profile.grid.size(); ++i)
        c.require(kkt[i] <= basis[i] + 1e-12,
                  "kkt profile exceeds basis at t=" + fnum(profile.grid[i]));
}

// --- criterion 8 -----------------------------------------------------------
// Random-LP convergence proxy on shifted minimal bases.

void criterion_random_lp_convergence(Ctx& c) {
    for (int n = 2; n <= 4; ++n) {
        TestCase tc = minimal_delta_shift(n, 1.0 / (2.0 * n));
        int hits = 0;
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            SolverConfig cfg;
            cfg.lp_iterations = 1;
            cfg.rng_seed = mix64(8000 + seed);
            double v = random_lp_solver(tc.set, cfg).result.value;
            if (std::abs(v - *tc.known_cm) <= 1e-8) ++hits;
        }
        c.require(hits > 0 && hits / 50.0 > 0.01,
                  "single-round hit rate " + std::to_string(hits) + "/50 at n=" +
                      std::to_string(n));

        double prev = 2.0;
        for (std::uint64_t rounds : {1ull, 2ull, 5ull, 10ull, 25ull, 50ull}) {
            SolverConfig cfg;
            cfg.lp_iterations = rounds;
            cfg.rng_seed = 99;
            double v = random_lp_solver(tc.set, cfg).result.value;
            c.require(v <= prev + 1e-15,
                      "incumbent increased between round counts at n=" + std::to_string(n));
            prev = v;
        }
    }
}

// --- criterion 9 -----------------------------------------------------------
// Harness determinism and storage format.

void criterion_determinism_and_format(Ctx& c) {
    fs::path root = fresh_dir("c9");
    std::vector<GeneratorSpec> plan = {
        {Family::canonical_min, 2, {}, {}, {}, {}, {}},
        {Family::canonical_min, 3, {}, {}, {}, {}, {}},
        {Family::max_delta_shift, 3, 1.0 / 6.0, {}, {}, {}, {}},
        {Family::optimal_orthogonal, 4, {}, 5, {}, {}, {}},
        {Family::random_pss, 3, {}, {}, {}, std::uint64_t{42}, 0},
        {Family::random_pss, 3, {}, {}, {}, std::uint64_t{43}, 1},
    };
    fs::path manifest = io::build_corpus(plan, root / "corpus");

    for (const auto& entry : io::load_manifest(manifest)) {
        TestCase tc = io::load_case(root / "corpus" / entry.path);
        fs::path copy_root = root / "resave";
        fs::path copy = io::save_case(tc, copy_root);
        TestCase back = io::load_case(copy);
        c.require((back.set.matrix() - tc.set.matrix()).norm() == 0.0,
                  entry.path + ": save/load round trip is not bit-exact");
        c.require(back.known_cm == tc.known_cm, entry.path + ": solution changed");
        if (tc.spec) {
            auto expected = family_known_cm(*tc.spec);
            if (expected && tc.known_cm)
                c.require(std::abs(*tc.known_cm - *expected) <= 1e-12,
                          entry.path + ": stored solution vs family formula");
            c.require(expected.has_value() == tc.known_cm.has_value(),
                      entry.path + ": solution presence mismatch");
        }
    }

    bench::BenchPlan bp;
    bp.manifest = manifest;
    bp.methods = {Method::vertex_enum, Method::random_lp};
    bp.budget_seconds = 30;
    bp.rotations_per_instance = 2;
    bp.master_seed = 9;
    bp.lp_iterations = 60;
    bench::emit_csv(bench::run_benchmark(bp), root / "run1.csv");
    bench::emit_csv(bench::run_benchmark(bp), root / "run2.csv");
    c.require(slurp(root / "run1.csv") == slurp(root / "run2.csv"),
              "repeated bench runs are not byte-identical");
    c.require(!slurp(root / "run1.csv").empty(), "bench produced an empty CSV");
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<void(Ctx&)> run;
    };
    std::vector<Criterion> criteria = {
        {"1 closed-form reproduction (basis/kkt/vertex, n=2..8, 1e-8)", criterion_closed_forms},
        {"2 delta-for-target round trips (20 targets, n=2..6, 1e-8)", criterion_target_round_trips},
        {"3 rotation/permutation and augmentation invariance (1e-9)", criterion_invariance},
        {"4 reformulation identity on the corpus grid (n<=6, 1e-8)", criterion_reformulation},
        {"5 cross-method agreement on random spanning sets", criterion_random_agreement},
        {"6 brute-force oracles (vertices, Gram values, rank-1 updates)", criterion_brute_force_oracles},
        {"7 desk-scale accuracy profiles (minimal + orthogonal sets)", criterion_desk_scale_profiles},
        {"8 random-LP convergence proxy (hit rate and incumbent monotonicity)", criterion_random_lp_convergence},
        {"9 harness determinism and storage format", criterion_determinism_and_format},
    };

    int failed = 0;
    for (const auto& cr : criteria) {
        Ctx ctx;
        auto t0 = std::chrono::steady_clock::now();
        try {
            cr.run(ctx);
        } catch (const std::exception& e) {
            ctx.require(false, std::string("exception: ") + e.what());
        }
        double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (ctx.failures == 0) {
            std::printf("[PASS] criterion %s (%.1f s)\n", cr.name, secs);
        } else {
            ++failed;
            std::printf("[FAIL] criterion %s (%.1f s, %d checks failed)%s\n", cr.name, secs,
                        ctx.failures, ctx.detail.c_str());
        }
        std::fflush(stdout);
    }
    if (failed == 0)
        std::printf("all %zu acceptance criteria passed\n", criteria.size());
    else
        std::printf("%d criteria FAILED\n", failed);
    return failed;
}
