#include "cosmea/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cosmea/generators.hpp"

namespace cosmea::bench {

namespace {

using nlohmann::json;

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct PlotColor {
    Method method;
    const char* color;
};
constexpr PlotColor kPalette[] = {
    {Method::basis_enum, "#1f77b4"},
    {Method::kkt_enum, "#d62728"},
    {Method::vertex_enum, "#2ca02c"},
    {Method::random_lp, "#ff7f0e"},
};

const char* color_for(Method m) {
    for (const auto& p : kPalette)
        if (p.method == m) return p.color;
    return "#000000";
}

}  // namespace

double correct_digits(double value, double truth) {
    if (std::isnan(value)) return 0.0;
    double err = std::abs(value - truth) / std::max(std::abs(truth), 1e-30);
    if (err <= 0.0) return 16.0;
    double cd = -std::log10(err);
    return std::clamp(cd, 0.0, 16.0);
}

std::vector<double> default_digit_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 64; ++i) grid.push_back(0.25 * i);
    return grid;
}

std::vector<AccuracyRecord> run_benchmark(const BenchPlan& plan) {
    if (plan.methods.empty()) throw Error("run_benchmark: no methods selected");
    if (plan.budget_seconds <= 0) throw Error("run_benchmark: budget must be positive");
    if (plan.rotations_per_instance < 1)
        throw Error("run_benchmark: rotations_per_instance must be >= 1");
    auto manifest = io::load_manifest(plan.manifest);
    std::filesystem::path root = plan.manifest.parent_path();

    struct Task {
        int case_idx;
        int rotation;
    };
    std::vector<Task> tasks;
    for (int ci = 0; ci < static_cast<int>(manifest.size()); ++ci)
        for (int r = 0; r < plan.rotations_per_instance; ++r)
            tasks.push_back({ci, r});

    std::vector<std::vector<AccuracyRecord>> results(tasks.size());

    auto run_task = [&](const Task& task) {
        const auto& entry = manifest[task.case_idx];
        std::uint64_t h = mix64(plan.master_seed ^ mix64(0xC0FFEEull + task.case_idx));
        std::uint64_t rot_seed = mix64(h ^ (2ull * task.rotation));
        std::uint64_t perm_seed = mix64(h ^ (2ull * task.rotation + 1ull));
        std::uint64_t lp_base = mix64(h ^ (0xABCDull + task.rotation));
        std::string case_id = entry.path + "#r" + std::to_string(task.rotation);

        std::vector<AccuracyRecord> out;
        TestCase tc{VectorSet(Eigen::MatrixXd::Identity(1, 1)), {}, {}, {}};
        bool loaded = false;
        try {
            tc = io::load_case(root / entry.path);
            tc = permute(rotate(tc, rot_seed), perm_seed);
            loaded = true;
        } catch (const Error&) {
            loaded = false;
        }
        for (Method m : plan.methods) {
            AccuracyRecord rec;
            rec.case_id = case_id;
            rec.family = family_name(entry.family);
            rec.n = loaded ? tc.set.dim() : entry.n;
            rec.k = loaded ? tc.set.size() : 0;
            rec.method = m;
            rec.seed = rot_seed;
            if (!loaded) {
                rec.failed = true;
                out.push_back(rec);
                continue;
            }
            rec.truth = tc.known_cm;
            SolverConfig cfg;
            cfg.time_budget = std::chrono::duration<double>(plan.budget_seconds);
            cfg.lp_iterations =
                plan.lp_iterations.value_or(std::numeric_limits<std::uint64_t>::max());
            try {
                if (m == Method::random_lp) {
                    double sum = 0.0, wall = 0.0;
                    bool completed = true;
                    for (int rep = 0; rep < plan.random_lp_repetitions; ++rep) {
                        cfg.rng_seed = mix64(lp_base ^ static_cast<std::uint64_t>(rep));
                        SolverReport rep_out = random_lp_solver(tc.set, cfg);
                        sum += rep_out.result.value;
                        wall += rep_out.result.stats.wall_seconds;
                        completed = completed && rep_out.completed;
                    }
                    rec.value = sum / plan.random_lp_repetitions;
                    rec.completed = completed;
                    if (plan.record_timing)
                        rec.wall_ms = 1000.0 * wall / plan.random_lp_repetitions;
                } else {
                    SolverReport rep_out = run_method(m, tc.set, cfg);
                    rec.value = rep_out.result.value;
                    rec.completed = rep_out.completed;
                    if (plan.record_timing)
                        rec.wall_ms = 1000.0 * rep_out.result.stats.wall_seconds;
                }
                if (rec.truth) rec.correct_digits = correct_digits(rec.value, *rec.truth);
            } catch (const Error&) {
                rec.failed = true;
            }
            out.push_back(rec);
        }
        return out;
    };

    int workers = std::max(1, plan.parallel_workers);
    if (workers == 1) {
        for (size_t i = 0; i < tasks.size(); ++i) results[i] = run_task(tasks[i]);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&]() {
            while (true) {
                size_t i = next.fetch_add(1);
                if (i >= tasks.size()) break;
                results[i] = run_task(tasks[i]);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<AccuracyRecord> records;
    for (auto& chunk : results)
        for (auto& r : chunk) records.push_back(std::move(r));
    std::stable_sort(records.begin(), records.end(),
                     [](const AccuracyRecord& a, const AccuracyRecord& b) {
                         if (a.case_id != b.case_id) return a.case_id < b.case_id;
                         return static_cast<int>(a.method) < static_cast<int>(b.method);
                     });
    return records;
}

AccuracyProfile accuracy_profile(const std::vector<AccuracyRecord>& records,
                                 const std::vector<double>& grid) {
    AccuracyProfile profile;
    profile.grid = grid;
    std::map<Method, std::vector<double>> digits;
    for (const auto& r : records) {
        if (r.failed || !r.truth) continue;
        digits[r.method].push_back(r.correct_digits.value_or(0.0));
    }
    if (digits.empty())
        throw EmptyUniverseError("accuracy_profile: no records with known truth");
    for (auto& [m, ds] : digits) {
        std::vector<double> frac(grid.size(), 0.0);
        for (size_t i = 0; i < grid.size(); ++i) {
            int count = 0;
            for (double d : ds)
                if (d >= grid[i]) ++count;
            frac[i] = static_cast<double>(count) / static_cast<double>(ds.size());
        }
        profile.fraction[m] = std::move(frac);
    }
    return profile;
}

std::vector<AgreementRow> agreement_table(const std::vector<AccuracyRecord>& records) {
    std::map<std::string, std::vector<double>> by_case;
    for (const auto& r : records) {
        if (r.failed || r.truth || std::isnan(r.value)) continue;
        by_case[r.case_id].push_back(r.value);
    }
    std::vector<AgreementRow> out;
    for (const auto& [id, vals] : by_case) {
        if (vals.size() < 2) continue;
        double dev = 0.0;
        for (size_t i = 0; i < vals.size(); ++i)
            for (size_t j = i + 1; j < vals.size(); ++j)
                dev = std::max(dev, std::abs(vals[i] - vals[j]));
        out.push_back({id, dev, static_cast<int>(vals.size())});
    }
    return out;
}

void emit_csv(const std::vector<AccuracyRecord>& records,
              const std::filesystem::path& path) {
    std::ostringstream out;
    out << "case_id,family,n,k,method,seed,value,truth,correct_digits,wall_ms,completed\n";
    for (const auto& r : records) {
        out << r.case_id << ',' << r.family << ',' << r.n << ',' << r.k << ','
            << to_string(r.method) << ',' << r.seed << ',';
        if (!r.failed && !std::isnan(r.value)) out << fmt17(r.value);
        out << ',';
        if (r.truth) out << fmt17(*r.truth);
        out << ',';
        if (r.correct_digits) out << fmt17(*r.correct_digits);
        out << ',';
        char wall[32];
        std::snprintf(wall, sizeof(wall), "%.3f", r.wall_ms);
        out << wall << ',' << (r.completed ? 1 : 0) << '\n';
    }
    std::ofstream f(path);
    if (!f) throw IoError("emit_csv: cannot open " + path.string());
    f << out.str();
    if (!f) throw IoError("emit_csv: write failed");
}

std::vector<AccuracyRecord> read_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("read_csv: cannot open " + path.string());
    std::string line;
    if (!std::getline(f, line)) throw ParseError("read_csv: empty file");
    std::vector<AccuracyRecord> out;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        while (cells.size() < 11) cells.push_back("");
        AccuracyRecord r;
        r.case_id = cells[0];
        r.family = cells[1];
        r.n = std::stoi(cells[2]);
        r.k = std::stoi(cells[3]);
        auto m = method_from_name(cells[4]);
        if (!m) throw ParseError("read_csv: unknown method " + cells[4]);
        r.method = *m;
        r.seed = std::stoull(cells[5]);
        if (!cells[6].empty()) r.value = std::stod(cells[6]);
        // failed corpus rows have neither a value nor a digit score; a timeout
        // without incumbent still carries correct_digits = 0
        r.failed = cells[6].empty() && cells[8].empty();
        if (!cells[7].empty()) r.truth = std::stod(cells[7]);
        if (!cells[8].empty()) r.correct_digits = std::stod(cells[8]);
        r.wall_ms = std::stod(cells[9]);
        r.completed = cells[10] == "1";
        out.push_back(r);
    }
    return out;
}

void emit_profile_csv(const AccuracyProfile& profile, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "method,threshold,fraction\n";
    for (const auto& [m, frac] : profile.fraction)
        for (size_t i = 0; i < profile.grid.size(); ++i)
            out << to_string(m) << ',' << fmt17(profile.grid[i]) << ',' << fmt17(frac[i])
                << '\n';
    std::ofstream f(path);
    if (!f) throw IoError("emit_profile_csv: cannot open " + path.string());
    f << out.str();
}

void emit_profile_plot(const AccuracyProfile& profile, const std::filesystem::path& path) {
    const double width = 640, height = 480;
    const double ml = 60, mr = 20, mt = 20, mb = 45;
    const double pw = width - ml - mr, ph = height - mt - mb;
    double xmax = profile.grid.empty() ? 16.0 : profile.grid.back();
    if (xmax <= 0) xmax = 16.0;
    auto x_px = [&](double t) { return ml + pw * t / xmax; };
    auto y_px = [&](double frac) { return mt + ph * (1.0 - frac); };
    auto fmt2 = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    // axes
    svg << "<line x1=\"" << fmt2(ml) << "\" y1=\"" << fmt2(mt + ph) << "\" x2=\""
        << fmt2(ml + pw) << "\" y2=\"" << fmt2(mt + ph)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << fmt2(ml) << "\" y1=\"" << fmt2(mt) << "\" x2=\"" << fmt2(ml)
        << "\" y2=\"" << fmt2(mt + ph) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (int t = 0; t <= static_cast<int>(xmax); t += 2) {
        svg << "<line x1=\"" << fmt2(x_px(t)) << "\" y1=\"" << fmt2(mt + ph) << "\" x2=\""
            << fmt2(x_px(t)) << "\" y2=\"" << fmt2(mt + ph + 5)
            << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << fmt2(x_px(t)) << "\" y=\"" << fmt2(mt + ph + 18)
            << "\" font-size=\"11\" text-anchor=\"middle\">" << t << "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        double fr = 0.25 * i;
        svg << "<line x1=\"" << fmt2(ml - 5) << "\" y1=\"" << fmt2(y_px(fr)) << "\" x2=\""
            << fmt2(ml) << "\" y2=\"" << fmt2(y_px(fr))
            << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << fmt2(ml - 9) << "\" y=\"" << fmt2(y_px(fr) + 4)
            << "\" font-size=\"11\" text-anchor=\"end\">" << fmt2(fr) << "</text>\n";
    }
    svg << "<text x=\"" << fmt2(ml + pw / 2) << "\" y=\"" << fmt2(height - 8)
        << "\" font-size=\"12\" text-anchor=\"middle\">correct digits</text>\n";
    svg << "<text x=\"14\" y=\"" << fmt2(mt + ph / 2)
        << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << fmt2(mt + ph / 2) << ")\">proportion solved</text>\n";

    int legend_row = 0;
    for (const auto& [m, frac] : profile.fraction) {
        // staircase polyline
        std::ostringstream pts;
        for (size_t i = 0; i < profile.grid.size(); ++i) {
            if (i > 0) pts << " " << fmt2(x_px(profile.grid[i])) << "," << fmt2(y_px(frac[i - 1]));
            pts << " " << fmt2(x_px(profile.grid[i])) << "," << fmt2(y_px(frac[i]));
        }
        svg << "<polyline fill=\"none\" stroke=\"" << color_for(m)
            << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
        double ly = mt + 14 + 16 * legend_row;
        svg << "<line x1=\"" << fmt2(ml + pw - 130) << "\" y1=\"" << fmt2(ly) << "\" x2=\""
            << fmt2(ml + pw - 108) << "\" y2=\"" << fmt2(ly) << "\" stroke=\"" << color_for(m)
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << fmt2(ml + pw - 102) << "\" y=\"" << fmt2(ly + 4)
            << "\" font-size=\"11\">" << to_string(m) << "</text>\n";
        ++legend_row;
    }
    svg << "</svg>\n";

    std::ofstream f(path);
    if (!f) throw IoError("emit_profile_plot: cannot open " + path.string());
    f << svg.str();
}

void emit_agreement_csv(const std::vector<AgreementRow>& rows,
                        const std::filesystem::path& path) {
    std::ostringstream out;
    out << "case_id,methods_compared,max_pairwise_deviation\n";
    for (const auto& r : rows)
        out << r.case_id << ',' << r.methods_compared << ','
            << fmt17(r.max_pairwise_deviation) << '\n';
    std::ofstream f(path);
    if (!f) throw IoError("emit_agreement_csv: cannot open " + path.string());
    f << out.str();
}

BenchPlan load_plan(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("load_plan: cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::exception& e) {
        throw ParseError(std::string("load_plan: ") + e.what());
    }
    BenchPlan plan;
    if (doc.contains("manifest")) plan.manifest = doc["manifest"].get<std::string>();
    if (doc.contains("methods"))
        for (const auto& m : doc["methods"]) {
            auto parsed = method_from_name(m.get<std::string>());
            if (!parsed) throw ParseError("load_plan: unknown method " + m.get<std::string>());
            plan.methods.push_back(*parsed);
        }
    plan.budget_seconds = doc.value("budget_seconds", plan.budget_seconds);
    plan.rotations_per_instance =
        doc.value("rotations_per_instance", plan.rotations_per_instance);
    plan.master_seed = doc.value("master_seed", plan.master_seed);
    if (doc.contains("lp_iterations") && !doc["lp_iterations"].is_null())
        plan.lp_iterations = doc["lp_iterations"].get<std::uint64_t>();
    plan.parallel_workers = doc.value("parallel_workers", plan.parallel_workers);
    plan.record_timing = doc.value("record_timing", plan.record_timing);
    plan.random_lp_repetitions =
        doc.value("random_lp_repetitions", plan.random_lp_repetitions);
    return plan;
}

}  // namespace cosmea::bench
