// Command-line harness: corpus generation, single-case solves, budgeted
// benchmark sweeps, and accuracy-profile emission.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "cosmea/bench.hpp"
#include "cosmea/generators.hpp"
#include "cosmea/solvers.hpp"
#include "cosmea/testset_io.hpp"

namespace {

using namespace cosmea;

std::vector<int> parse_dims(const std::string& csv) {
    std::vector<int> dims;
    std::istringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) dims.push_back(std::stoi(tok));
    }
    if (dims.empty()) throw Error("no dimensions given");
    return dims;
}

std::vector<Method> parse_methods(const std::string& csv) {
    std::vector<Method> methods;
    std::istringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        if (tok == "all") {
            methods = {Method::basis_enum, Method::kkt_enum, Method::vertex_enum,
                       Method::random_lp};
            continue;
        }
        auto m = method_from_name(tok);
        if (!m) throw Error("unknown method: " + tok);
        methods.push_back(*m);
    }
    if (methods.empty()) throw Error("no methods given");
    return methods;
}

std::vector<GeneratorSpec> parse_spec_plan(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open plan file " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("plan parse: ") + e.what());
    }
    if (!doc.is_array()) throw ParseError("plan must be a JSON array of specs");
    std::vector<GeneratorSpec> plan;
    for (const auto& e : doc) {
        GeneratorSpec spec;
        auto fam = family_from_name(e.value("family", ""));
        if (!fam) throw ParseError("plan: unknown family " + e.value("family", ""));
        spec.family = *fam;
        spec.dim = e.value("n", 0);
        if (spec.dim < 1) throw ParseError("plan: missing or invalid n");
        if (e.contains("delta")) spec.delta = e["delta"].get<double>();
        if (e.contains("s")) spec.size = e["s"].get<int>();
        if (e.contains("augment_count")) spec.augment_count = e["augment_count"].get<int>();
        if (e.contains("seed")) spec.seed = e["seed"].get<std::uint64_t>();
        if (e.contains("instance")) spec.instance = e["instance"].get<int>();
        plan.push_back(spec);
    }
    return plan;
}

int cmd_generate(const std::string& out_dir, const std::string& dims_csv,
                 std::uint64_t seed, const std::string& plan_file) {
    std::vector<GeneratorSpec> plan;
    if (!plan_file.empty())
        plan = parse_spec_plan(plan_file);
    else
        plan = io::default_grid_plan(parse_dims(dims_csv), seed);
    auto manifest = io::build_corpus(plan, out_dir);
    std::cout << "wrote " << plan.size() << " cases\nmanifest: " << manifest.string()
              << "\n";
    return 0;
}

int cmd_solve(const std::string& case_file, const std::string& method_name,
              double budget_secs, std::uint64_t seed, std::uint64_t lp_iterations,
              int max_vectors) {
    auto method = method_from_name(method_name);
    if (!method) throw Error("unknown method: " + method_name);
    TestCase tc = io::load_case(case_file);
    SolverConfig cfg;
    if (budget_secs > 0) cfg.time_budget = std::chrono::duration<double>(budget_secs);
    cfg.rng_seed = seed;
    cfg.lp_iterations = lp_iterations;
    cfg.max_reported_vectors = max_vectors;
    SolverReport rep = run_method(*method, tc.set, cfg);
    const CosineResult& res = rep.result;
    std::printf("method: %s\nvalue: %.17g\nstatus: %s\ncompleted: %s\n",
                to_string(*method), res.value, to_string(res.status),
                rep.completed ? "yes" : "no");
    if (tc.known_cm)
        std::printf("stored solution: %.17g (|diff| = %.3g)\n", *tc.known_cm,
                    std::abs(res.value - *tc.known_cm));
    std::printf("cosine vectors (%zu%s):\n", res.cosine_vectors.size(),
                res.vectors_truncated ? ", truncated" : "");
    for (size_t i = 0; i < res.cosine_vectors.size(); ++i) {
        const auto& v = res.cosine_vectors[i];
        std::printf("  [");
        for (int j = 0; j < v.size(); ++j) std::printf("%s%.12g", j ? ", " : "", v(j));
        std::printf("]  active = {");
        for (size_t j = 0; j < res.active_sets[i].size(); ++j)
            std::printf("%s%d", j ? ", " : "", res.active_sets[i][j]);
        std::printf("}\n");
    }
    std::printf("candidates: %llu, LPs: %llu, wall: %.3f s\n",
                static_cast<unsigned long long>(res.stats.candidates_examined),
                static_cast<unsigned long long>(res.stats.lps_solved),
                res.stats.wall_seconds);
    return 0;
}

int cmd_bench(bench::BenchPlan plan, const std::string& out_csv) {
    auto records = bench::run_benchmark(plan);
    bench::emit_csv(records, out_csv);
    int failed = 0;
    for (const auto& r : records)
        if (r.failed) ++failed;
    std::cout << records.size() << " records -> " << out_csv;
    if (failed) std::cout << " (" << failed << " failed)";
    std::cout << "\n";
    return failed ? 1 : 0;
}

int cmd_profile(const std::string& records_csv, const std::string& out_svg,
                const std::string& profile_csv, const std::string& agreement_csv,
                double grid_step) {
    auto records = bench::read_csv(records_csv);
    std::vector<double> grid;
    for (double t = 0.0; t <= 16.0 + 1e-12; t += grid_step) grid.push_back(t);
    auto profile = bench::accuracy_profile(records, grid);
    bench::emit_profile_plot(profile, out_svg);
    std::cout << "profile plot: " << out_svg << "\n";
    if (!profile_csv.empty()) {
        bench::emit_profile_csv(profile, profile_csv);
        std::cout << "profile csv: " << profile_csv << "\n";
    }
    auto agreement = bench::agreement_table(records);
    if (!agreement.empty()) {
        if (!agreement_csv.empty()) {
            bench::emit_agreement_csv(agreement, agreement_csv);
            std::cout << "agreement csv: " << agreement_csv << "\n";
        }
        double worst = 0.0;
        for (const auto& row : agreement)
            worst = std::max(worst, row.max_pairwise_deviation);
        std::printf("unknown-truth cases: %zu, worst cross-method deviation: %.3g\n",
                    agreement.size(), worst);
    }
    for (const auto& [m, frac] : profile.fraction) {
        size_t i8 = 0;
        for (size_t i = 0; i < grid.size(); ++i)
            if (grid[i] <= 8.0) i8 = i;
        std::printf("%-12s solved to >= 8 digits: %.1f%%\n", to_string(m),
                    100.0 * frac[i8]);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cosine measure solvers, generators, and benchmark harness"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "build a benchmark corpus");
    std::string gen_out, gen_dims = "2,3,4,5,6,7,8", gen_plan;
    std::uint64_t gen_seed = 0;
    gen->add_option("--out", gen_out, "corpus root directory")->required();
    gen->add_option("--dims", gen_dims, "comma-separated dimensions");
    gen->add_option("--seed", gen_seed, "master seed for randomized families");
    gen->add_option("--plan", gen_plan, "JSON plan file (array of generator specs)");

    // solve
    auto* solve = app.add_subcommand("solve", "run one method on one stored case");
    std::string solve_case, solve_method;
    double solve_budget = 0.0;
    std::uint64_t solve_seed = 0, solve_iters = 1000;
    int solve_maxvec = 16;
    solve->add_option("--case", solve_case, "case JSON file")->required();
    solve->add_option("--method", solve_method,
                      "basis_enum | kkt_enum | vertex_enum | random_lp")
        ->required();
    solve->add_option("--budget-secs", solve_budget, "time budget (0 = none)");
    solve->add_option("--seed", solve_seed, "random_lp seed");
    solve->add_option("--lp-iterations", solve_iters, "random_lp rounds");
    solve->add_option("--max-vectors", solve_maxvec, "cap on reported cosine vectors");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "run the benchmark protocol");
    std::string bench_corpus, bench_methods = "all", bench_out, bench_plan_file;
    double bench_budget = 30.0;
    std::uint64_t bench_seed = 0;
    int bench_workers = 1, bench_rotations = 3;
    std::uint64_t bench_iters = 0;
    bool bench_timing = false;
    bench_cmd->add_option("--plan", bench_plan_file, "JSON plan file (flags override)");
    bench_cmd->add_option("--corpus", bench_corpus, "corpus manifest path");
    bench_cmd->add_option("--methods", bench_methods, "comma-separated methods or 'all'");
    bench_cmd->add_option("--budget-secs", bench_budget, "per-run time budget");
    bench_cmd->add_option("--seed", bench_seed, "master seed");
    bench_cmd->add_option("--workers", bench_workers, "parallel workers");
    bench_cmd->add_option("--rotations", bench_rotations, "rotation/permutation draws");
    bench_cmd->add_option("--lp-iterations", bench_iters,
                          "random_lp rounds (0 = budget-bounded)");
    bench_cmd->add_flag("--record-timing", bench_timing,
                        "emit measured wall_ms (CSV no longer byte-reproducible)");
    bench_cmd->add_option("--out", bench_out, "output records CSV")->required();

    // profile
    auto* prof = app.add_subcommand("profile", "accuracy profile from a records CSV");
    std::string prof_records, prof_out = "profile.svg", prof_csv, prof_agreement;
    double prof_step = 0.25;
    prof->add_option("--records", prof_records, "records CSV from bench")->required();
    prof->add_option("--out", prof_out, "output SVG path");
    prof->add_option("--profile-csv", prof_csv, "also write the profile as CSV");
    prof->add_option("--agreement-csv", prof_agreement,
                     "cross-method agreement table for unknown-truth cases");
    prof->add_option("--grid-step", prof_step, "digit grid step");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) return cmd_generate(gen_out, gen_dims, gen_seed, gen_plan);
        if (solve->parsed())
            return cmd_solve(solve_case, solve_method, solve_budget, solve_seed,
                             solve_iters, solve_maxvec);
        if (bench_cmd->parsed()) {
            cosmea::bench::BenchPlan plan;
            bool from_file = !bench_plan_file.empty();
            if (from_file) plan = cosmea::bench::load_plan(bench_plan_file);
            if (!bench_corpus.empty()) plan.manifest = bench_corpus;
            if (plan.methods.empty() || bench_cmd->count("--methods") > 0)
                plan.methods = parse_methods(bench_methods);
            if (plan.manifest.empty()) throw cosmea::Error("bench: --corpus is required");
            if (!from_file || bench_cmd->count("--budget-secs") > 0)
                plan.budget_seconds = bench_budget;
            if (!from_file || bench_cmd->count("--seed") > 0)
                plan.master_seed = bench_seed;
            if (!from_file || bench_cmd->count("--workers") > 0)
                plan.parallel_workers = bench_workers;
            if (!from_file || bench_cmd->count("--rotations") > 0)
                plan.rotations_per_instance = bench_rotations;
            if (bench_iters > 0) plan.lp_iterations = bench_iters;
            if (bench_timing) plan.record_timing = true;
            return cmd_bench(plan, bench_out);
        }
        if (prof->parsed())
            return cmd_profile(prof_records, prof_out, prof_csv, prof_agreement, prof_step);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
