#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cosmea/bench.hpp"

using namespace cosmea;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("cosmea_bench_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

bench::AccuracyRecord synth(const std::string& id, Method m, double digits,
                            bool truth_known = true) {
    bench::AccuracyRecord r;
    r.case_id = id;
    r.family = "synthetic";
    r.n = 2;
    r.k = 4;
    r.method = m;
    r.value = truth_known ? 0.5 : 0.4;
    if (truth_known) {
        r.truth = 0.5;
        r.correct_digits = digits;
    }
    r.completed = true;
    return r;
}

}  // namespace

TEST_CASE("correct_digits formula") {
    CHECK(bench::correct_digits(0.5, 0.5) == 16.0);
    CHECK(bench::correct_digits(0.5 + 0.5e-8, 0.5) == doctest::Approx(8.0).epsilon(1e-6));
    CHECK(bench::correct_digits(1.5, 0.5) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(bench::correct_digits(std::numeric_limits<double>::quiet_NaN(), 0.5) == 0.0);
    // monotone: closer values never score lower
    double prev = -1.0;
    for (double err : {1e-2, 1e-4, 1e-6, 1e-10}) {
        double cd = bench::correct_digits(0.5 + err, 0.5);
        CHECK(cd > prev);
        prev = cd;
    }
}

TEST_CASE("accuracy_profile step construction") {
    std::vector<bench::AccuracyRecord> records;
    for (int i = 0; i < 5; ++i) records.push_back(synth("a" + std::to_string(i), Method::basis_enum, 2.0));
    for (int i = 0; i < 5; ++i) records.push_back(synth("b" + std::to_string(i), Method::basis_enum, 10.0));
    auto profile = bench::accuracy_profile(records, bench::default_digit_grid());
    const auto& frac = profile.fraction.at(Method::basis_enum);
    for (size_t i = 0; i < profile.grid.size(); ++i) {
        double t = profile.grid[i];
        double expected = t <= 2.0 ? 1.0 : (t <= 10.0 ? 0.5 : 0.0);
        CHECK(frac[i] == doctest::Approx(expected));
        if (i > 0) CHECK(frac[i] <= frac[i - 1]);  // non-increasing
    }
}

TEST_CASE("accuracy_profile of all-exact records is identically one") {
    std::vector<bench::AccuracyRecord> records;
    for (int i = 0; i < 4; ++i) records.push_back(synth("e" + std::to_string(i), Method::vertex_enum, 16.0));
    auto profile = bench::accuracy_profile(records, bench::default_digit_grid());
    for (double f : profile.fraction.at(Method::vertex_enum)) CHECK(f == 1.0);
}

TEST_CASE("accuracy_profile rejects an empty universe") {
    std::vector<bench::AccuracyRecord> records = {synth("x", Method::random_lp, 0, false)};
    CHECK_THROWS_AS(bench::accuracy_profile(records, bench::default_digit_grid()),
                    EmptyUniverseError);
}

TEST_CASE("profile matches an independent counting pass") {
    Rng rng(3);
    std::vector<bench::AccuracyRecord> records;
    for (int i = 0; i < 200; ++i) {
        Method m = i % 2 ? Method::kkt_enum : Method::vertex_enum;
        records.push_back(synth("c" + std::to_string(i), m, 16.0 * rng.uniform01()));
    }
    std::vector<double> grid = {0, 1, 3.5, 8, 15.75, 16};
    auto profile = bench::accuracy_profile(records, grid);
    for (auto m : {Method::kkt_enum, Method::vertex_enum}) {
        for (size_t gi = 0; gi < grid.size(); ++gi) {
            int num = 0, den = 0;
            for (const auto& r : records) {
                if (r.method != m) continue;
                ++den;
                if (*r.correct_digits >= grid[gi]) ++num;
            }
            CHECK(profile.fraction.at(m)[gi] == doctest::Approx(double(num) / den));
        }
    }
}

TEST_CASE("agreement table covers unknown-truth cases only") {
    std::vector<bench::AccuracyRecord> records;
    auto r1 = synth("u#r0", Method::basis_enum, 0, false);
    r1.value = 0.30;
    auto r2 = synth("u#r0", Method::vertex_enum, 0, false);
    r2.value = 0.31;
    auto r3 = synth("known#r0", Method::basis_enum, 12.0);
    records = {r1, r2, r3};
    auto rows = bench::agreement_table(records);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].case_id == "u#r0");
    CHECK(rows[0].max_pairwise_deviation == doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("csv emission is deterministic and parses back") {
    fs::path dir = fresh_dir("csv");
    std::vector<bench::AccuracyRecord> records = {
        synth("a#r0", Method::basis_enum, 9.25),
        synth("a#r0", Method::random_lp, 3.5),
        synth("u#r0", Method::vertex_enum, 0, false),
    };
    bench::emit_csv(records, dir / "a.csv");
    bench::emit_csv(records, dir / "b.csv");
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));

    auto back = bench::read_csv(dir / "a.csv");
    REQUIRE(back.size() == 3);
    CHECK(back[0].case_id == "a#r0");
    CHECK(back[0].method == Method::basis_enum);
    CHECK(back[0].value == records[0].value);
    CHECK(back[0].truth.has_value());
    CHECK(*back[0].correct_digits == 9.25);
    CHECK_FALSE(back[2].truth.has_value());

    bench::emit_csv({}, dir / "empty.csv");
    CHECK(slurp(dir / "empty.csv") ==
          "case_id,family,n,k,method,seed,value,truth,correct_digits,wall_ms,completed\n");
}

TEST_CASE("svg profile plot is byte-deterministic") {
    fs::path dir = fresh_dir("svg");
    std::vector<bench::AccuracyRecord> records = {synth("a#r0", Method::basis_enum, 8.0),
                                                  synth("b#r0", Method::random_lp, 12.0)};
    auto profile = bench::accuracy_profile(records, bench::default_digit_grid());
    bench::emit_profile_plot(profile, dir / "p1.svg");
    bench::emit_profile_plot(profile, dir / "p2.svg");
    std::string svg = slurp(dir / "p1.svg");
    CHECK(svg == slurp(dir / "p2.svg"));
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("basis_enum") != std::string::npos);
}

TEST_CASE("run_benchmark is deterministic end to end") {
    fs::path dir = fresh_dir("run");
    std::vector<GeneratorSpec> plan = {
        {Family::canonical_min, 2, {}, {}, {}, {}, {}},
        {Family::canonical_min, 3, {}, {}, {}, {}, {}},
        {Family::random_pss, 3, {}, {}, {}, std::uint64_t{5}, 0},
    };
    fs::path manifest = io::build_corpus(plan, dir / "corpus");

    bench::BenchPlan bp;
    bp.manifest = manifest;
    bp.methods = {Method::basis_enum, Method::vertex_enum, Method::random_lp};
    bp.budget_seconds = 30;
    bp.rotations_per_instance = 2;
    bp.master_seed = 17;
    bp.lp_iterations = 40;

    auto rec1 = bench::run_benchmark(bp);
    auto rec2 = bench::run_benchmark(bp);
    CHECK(rec1.size() == 3 * 2 * 3);
    bench::emit_csv(rec1, dir / "r1.csv");
    bench::emit_csv(rec2, dir / "r2.csv");
    CHECK(slurp(dir / "r1.csv") == slurp(dir / "r2.csv"));

    int exact_cases = 0;
    for (const auto& r : rec1) {
        CHECK_FALSE(r.failed);
        CHECK(r.completed);
        if (r.truth) {
            ++exact_cases;
            if (r.method != Method::random_lp) CHECK(*r.correct_digits >= 10.0);
        }
    }
    CHECK(exact_cases == 2 * 2 * 3);  // random_pss has no truth

    // a worker pool produces the same merged records
    bp.parallel_workers = 2;
    auto rec3 = bench::run_benchmark(bp);
    bench::emit_csv(rec3, dir / "r3.csv");
    CHECK(slurp(dir / "r1.csv") == slurp(dir / "r3.csv"));
}

TEST_CASE("one random LP round suffices on an equal-vertex-norm case") {
    fs::path dir = fresh_dir("oneround");
    std::vector<GeneratorSpec> plan = {{Family::optimal_orthogonal, 6, {}, 9, {}, {}, {}}};
    fs::path manifest = io::build_corpus(plan, dir / "corpus");
    bench::BenchPlan bp;
    bp.manifest = manifest;
    bp.methods = {Method::random_lp};
    bp.rotations_per_instance = 2;
    bp.lp_iterations = 1;
    bp.master_seed = 3;
    for (const auto& r : bench::run_benchmark(bp)) {
        REQUIRE(r.correct_digits.has_value());
        CHECK(*r.correct_digits >= 8.0);
    }
}

TEST_CASE("a forced timeout is recorded as incomplete") {
    fs::path dir = fresh_dir("timeout");
    std::vector<GeneratorSpec> plan = {{Family::canonical_max, 8, {}, {}, {}, {}, {}}};
    fs::path manifest = io::build_corpus(plan, dir / "corpus");
    bench::BenchPlan bp;
    bp.manifest = manifest;
    bp.methods = {Method::kkt_enum};
    bp.rotations_per_instance = 1;
    bp.budget_seconds = 0.001;
    auto records = bench::run_benchmark(bp);
    REQUIRE(records.size() == 1);
    CHECK_FALSE(records[0].failed);
    CHECK_FALSE(records[0].completed);
}

TEST_CASE("run_benchmark marks corpus failures without aborting") {
    fs::path dir = fresh_dir("fail");
    std::vector<GeneratorSpec> plan = {{Family::canonical_min, 2, {}, {}, {}, {}, {}}};
    fs::path manifest = io::build_corpus(plan, dir / "corpus");
    // corrupt the stored case
    std::ofstream(dir / "corpus" / "min_can_pb" / "2" / "default.json") << "{broken";

    bench::BenchPlan bp;
    bp.manifest = manifest;
    bp.methods = {Method::basis_enum};
    bp.rotations_per_instance = 1;
    auto records = bench::run_benchmark(bp);
    REQUIRE(records.size() == 1);
    CHECK(records[0].failed);
}

TEST_CASE("plan files mirror the BenchPlan fields") {
    fs::path dir = fresh_dir("plan");
    std::ofstream(dir / "plan.json") << R"({
        "manifest": "corpus/manifest.json",
        "methods": ["vertex_enum", "random_lp"],
        "budget_seconds": 5.5,
        "rotations_per_instance": 2,
        "master_seed": 99,
        "lp_iterations": 123,
        "parallel_workers": 2,
        "record_timing": true
    })";
    auto plan = bench::load_plan(dir / "plan.json");
    CHECK(plan.manifest == "corpus/manifest.json");
    REQUIRE(plan.methods.size() == 2);
    CHECK(plan.methods[0] == Method::vertex_enum);
    CHECK(plan.budget_seconds == 5.5);
    CHECK(plan.rotations_per_instance == 2);
    CHECK(plan.master_seed == 99);
    CHECK(*plan.lp_iterations == 123);
    CHECK(plan.parallel_workers == 2);
    CHECK(plan.record_timing);
}
