#include "cosmea/testset_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cosmea::io {

namespace {

using nlohmann::json;

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// File-name-safe rendering of a parameter value: 0.25 -> "0p25".
std::string slug(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    std::string s = buf;
    for (char& c : s) {
        if (c == '.') c = 'p';
        if (c == '-') c = 'm';
        if (c == '+') c = ' ';
    }
    std::erase(s, ' ');
    return s;
}

std::string modifier_for(const GeneratorSpec& spec) {
    std::vector<std::string> parts;
    if (spec.delta) parts.push_back("delta_" + slug(*spec.delta));
    if (spec.size) parts.push_back("s_" + std::to_string(*spec.size));
    if (spec.instance) parts.push_back("inst_" + std::to_string(*spec.instance));
    if (spec.seed &&
        (spec.family == Family::random_pss || spec.family == Family::aug_max_delta_shift))
        parts.push_back("seed_" + std::to_string(*spec.seed));
    if (parts.empty()) return "default";
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += "_";
        out += parts[i];
    }
    return out;
}

json meta_json(const TestCase& tc) {
    json meta = json::object();
    if (tc.spec) {
        meta["family"] = family_name(tc.spec->family);
        meta["n"] = tc.spec->dim;
        json params = json::object();
        if (tc.spec->delta) params["delta"] = *tc.spec->delta;
        if (tc.spec->size) params["s"] = *tc.spec->size;
        if (tc.spec->augment_count) params["augment_count"] = *tc.spec->augment_count;
        if (tc.spec->instance) params["instance"] = *tc.spec->instance;
        meta["params"] = params;
        if (tc.spec->seed) meta["seed"] = *tc.spec->seed;
    }
    json log = json::array();
    for (const auto& t : tc.transform_log) {
        json e = {{"kind", t.kind}, {"seed", t.seed}};
        if (t.count) e["count"] = t.count;
        log.push_back(e);
    }
    meta["transform_log"] = log;
    return meta;
}

}  // namespace

std::filesystem::path save_case(const TestCase& tc, const std::filesystem::path& root) {
    std::string family = tc.spec ? family_name(tc.spec->family) : "external";
    std::string modifier = tc.spec ? modifier_for(*tc.spec) : "case";
    std::filesystem::path dir = root / family / std::to_string(tc.set.dim());
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("save_case: cannot create " + dir.string());
    std::filesystem::path file = dir / (modifier + ".json");

    const Eigen::MatrixXd& m = tc.set.matrix();
    std::ostringstream out;
    out << "{\n  \"matrix\": [\n";
    for (int i = 0; i < m.rows(); ++i) {
        out << "    [";
        for (int j = 0; j < m.cols(); ++j) {
            if (j) out << ", ";
            out << fmt17(m(i, j));
        }
        out << (i + 1 < m.rows() ? "],\n" : "]\n");
    }
    out << "  ],\n  \"solution\": ";
    out << (tc.known_cm ? fmt17(*tc.known_cm) : "null");
    out << ",\n  \"meta\": " << meta_json(tc).dump() << "\n}\n";

    std::ofstream f(file);
    if (!f) throw IoError("save_case: cannot open " + file.string());
    f << out.str();
    if (!f) throw IoError("save_case: write failed for " + file.string());
    return file;
}

TestCase load_case(const std::filesystem::path& file) {
    std::ifstream f(file);
    if (!f) throw IoError("load_case: cannot open " + file.string());
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::exception& e) {
        throw ParseError("load_case: " + file.string() + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("matrix") || !doc["matrix"].is_array())
        throw ParseError("load_case: missing matrix in " + file.string());
    const json& rows = doc["matrix"];
    const int n = static_cast<int>(rows.size());
    if (n < 1) throw ParseError("load_case: empty matrix in " + file.string());
    int k = -1;
    for (const auto& row : rows) {
        if (!row.is_array()) throw ParseError("load_case: matrix rows must be arrays");
        if (k < 0)
            k = static_cast<int>(row.size());
        else if (static_cast<int>(row.size()) != k)
            throw ParseError("load_case: ragged matrix in " + file.string());
    }
    if (k < 1) throw ParseError("load_case: matrix has no columns");
    Eigen::MatrixXd m(n, k);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) {
            const json& cell = rows[i][j];
            if (!cell.is_number())
                throw ParseError("load_case: non-numeric matrix entry");
            m(i, j) = cell.get<double>();
        }
    // Renormalize columns that drifted, but leave already-unit columns
    // untouched so a save/load round trip is bit-exact.
    Tolerances tol;
    for (int j = 0; j < k; ++j) {
        double nrm = m.col(j).norm();
        if (nrm <= tol.rank_tol)
            throw ParseError("load_case: zero column " + std::to_string(j));
        if (std::abs(nrm - 1.0) > 1e-6)
            throw ParseError("load_case: column " + std::to_string(j) +
                             " deviates from unit norm by more than 1e-6");
        if (std::abs(nrm - 1.0) > tol.unit_tol) m.col(j) /= nrm;
    }

    std::optional<double> solution;
    if (doc.contains("solution") && !doc["solution"].is_null()) {
        if (!doc["solution"].is_number())
            throw ParseError("load_case: solution must be a number or null");
        solution = doc["solution"].get<double>();
        if (!(*solution > 0.0 && *solution <= 1.0))
            throw ParseError("load_case: solution outside (0, 1]");
        if (k < n + 1)
            throw DimensionError(
                "load_case: a known cosine measure requires at least n+1 vectors");
    }

    TestCase tc{VectorSet(std::move(m), {}, tol), solution, std::nullopt, {}};
    if (doc.contains("meta") && doc["meta"].is_object()) {
        const json& meta = doc["meta"];
        if (meta.contains("family") && meta["family"].is_string()) {
            if (auto fam = family_from_name(meta["family"].get<std::string>())) {
                GeneratorSpec spec;
                spec.family = *fam;
                spec.dim = n;
                if (meta.contains("params") && meta["params"].is_object()) {
                    const json& p = meta["params"];
                    if (p.contains("delta")) spec.delta = p["delta"].get<double>();
                    if (p.contains("s")) spec.size = p["s"].get<int>();
                    if (p.contains("augment_count"))
                        spec.augment_count = p["augment_count"].get<int>();
                    if (p.contains("instance")) spec.instance = p["instance"].get<int>();
                }
                if (meta.contains("seed")) spec.seed = meta["seed"].get<std::uint64_t>();
                tc.spec = spec;
            }
        }
        if (meta.contains("transform_log") && meta["transform_log"].is_array()) {
            for (const auto& e : meta["transform_log"]) {
                TransformEntry t;
                t.kind = e.value("kind", "");
                t.seed = e.value("seed", std::uint64_t{0});
                t.count = e.value("count", 0);
                tc.transform_log.push_back(t);
            }
        }
    }
    return tc;
}

std::vector<GeneratorSpec> default_grid_plan(const std::vector<int>& dims,
                                             std::uint64_t master_seed) {
    std::vector<GeneratorSpec> plan;
    auto derive = [&](int fam, int n, int pidx, int inst) {
        return mix64(master_seed ^ mix64(0x5EED0000ull + fam * 1000003ull + n * 101ull +
                                         pidx * 13ull + inst));
    };
    for (int n : dims) {
        plan.push_back({Family::canonical_min, n, {}, {}, {}, {}, {}});
        std::vector<double> deltas = {0.0, 1.0 / (2.0 * n), 2.0 / (3.0 * n)};
        for (int d = 0; d < 3; ++d)
            plan.push_back({Family::min_delta_shift, n, deltas[d], {}, {}, {}, {}});
        for (int d = 0; d < 3; ++d)
            plan.push_back({Family::max_delta_shift, n, deltas[d], {}, {}, {}, {}});
        for (int d = 0; d < 3; ++d)
            for (int inst = 0; inst < 3; ++inst)
                plan.push_back({Family::aug_max_delta_shift, n, deltas[d], {}, n * n,
                                derive(3, n, d, inst), inst});
        std::vector<int> sizes;
        for (double f : {1.25, 1.75}) {
            int s = std::clamp(static_cast<int>(f * n), n + 1, 2 * n);
            if (std::find(sizes.begin(), sizes.end(), s) == sizes.end()) sizes.push_back(s);
        }
        for (int s : sizes)
            plan.push_back({Family::optimal_orthogonal, n, {}, s, {}, {}, {}});
        for (int inst = 0; inst < 3; ++inst)
            plan.push_back({Family::random_pss, n, {}, {}, {}, derive(5, n, 0, inst), inst});
    }
    return plan;
}

std::filesystem::path build_corpus(const std::vector<GeneratorSpec>& plan,
                                   const std::filesystem::path& root) {
    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    if (ec) throw IoError("build_corpus: cannot create " + root.string());
    json manifest = json::array();
    std::vector<std::string> seen;
    for (const auto& spec : plan) {
        TestCase tc = make_case(spec);
        std::filesystem::path file = save_case(tc, root);
        std::string rel = std::filesystem::relative(file, root).generic_string();
        if (std::find(seen.begin(), seen.end(), rel) != seen.end())
            throw IoError("build_corpus: duplicate case path " + rel);
        seen.push_back(rel);
        json entry;
        entry["path"] = rel;
        entry["family"] = family_name(spec.family);
        entry["n"] = spec.dim;
        json params = json::object();
        if (spec.delta) params["delta"] = *spec.delta;
        if (spec.size) params["s"] = *spec.size;
        if (spec.augment_count) params["augment_count"] = *spec.augment_count;
        if (spec.instance) params["instance"] = *spec.instance;
        entry["params"] = params;
        if (spec.seed)
            entry["seed"] = *spec.seed;
        else
            entry["seed"] = nullptr;
        manifest.push_back(entry);
    }
    std::filesystem::path mpath = root / "manifest.json";
    std::ofstream f(mpath);
    if (!f) throw IoError("build_corpus: cannot open " + mpath.string());
    f << manifest.dump(2) << "\n";
    if (!f) throw IoError("build_corpus: manifest write failed");
    return mpath;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& manifest_file) {
    std::ifstream f(manifest_file);
    if (!f) throw IoError("load_manifest: cannot open " + manifest_file.string());
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::exception& e) {
        throw ParseError(std::string("load_manifest: ") + e.what());
    }
    if (!doc.is_array()) throw ParseError("load_manifest: expected a JSON array");
    std::vector<ManifestEntry> out;
    for (const auto& e : doc) {
        ManifestEntry me;
        me.path = e.value("path", "");
        if (me.path.empty()) throw ParseError("load_manifest: entry without path");
        if (auto fam = family_from_name(e.value("family", "")))
            me.family = *fam;
        else
            throw ParseError("load_manifest: unknown family for " + me.path);
        me.n = e.value("n", 0);
        me.params = e.contains("params") ? e["params"].dump() : "{}";
        if (e.contains("seed") && !e["seed"].is_null())
            me.seed = e["seed"].get<std::uint64_t>();
        out.push_back(me);
    }
    return out;
}

}  // namespace cosmea::io
