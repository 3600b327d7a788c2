#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cosmea/solvers.hpp"
#include "cosmea/testset_io.hpp"

namespace cosmea::bench {

struct BenchPlan {
    std::filesystem::path manifest;
    std::vector<Method> methods;
    double budget_seconds = 30.0;
    int rotations_per_instance = 3;
    std::uint64_t master_seed = 0;
    std::optional<std::uint64_t> lp_iterations;  ///< nullopt: budget-bounded rounds
    int parallel_workers = 1;
    bool record_timing = false;  ///< emit measured wall_ms instead of 0 (breaks byte-determinism)
    int random_lp_repetitions = 4;
};

struct AccuracyRecord {
    std::string case_id;   // "<path>#r<rotation>"
    std::string family;
    int n = 0;
    int k = 0;
    Method method = Method::basis_enum;
    std::uint64_t seed = 0;                 // transform seed of this run
    double value = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> truth;
    std::optional<double> correct_digits;   // null when truth unknown
    double wall_ms = 0.0;
    bool completed = false;
    bool failed = false;                    // corpus error; value is empty in the CSV
};

/// -log10(|v - truth| / max(|truth|, 1e-30)) clipped to [0, 16]; 0 for NaN v.
double correct_digits(double value, double truth);

/// Runs the full protocol: every manifest case x rotation/permutation draw x
/// method under the budget; random_lp is run `random_lp_repetitions` times
/// and the average value recorded. Corpus errors mark the affected records
/// failed without aborting the sweep. Deterministic for a fixed master seed.
std::vector<AccuracyRecord> run_benchmark(const BenchPlan& plan);

struct AccuracyProfile {
    std::vector<double> grid;                          // thresholds t
    std::map<Method, std::vector<double>> fraction;    // per method: P(correct_digits >= t)
};

/// 0 to 16 in steps of 0.25.
std::vector<double> default_digit_grid();

/// Step functions over records with known truth; records with unknown truth
/// are excluded. Throws EmptyUniverseError when nothing remains.
AccuracyProfile accuracy_profile(const std::vector<AccuracyRecord>& records,
                                 const std::vector<double>& grid);

struct AgreementRow {
    std::string case_id;
    double max_pairwise_deviation = 0.0;
    int methods_compared = 0;
};

/// Cross-method agreement on unknown-truth cases: per case id, the maximum
/// pairwise |value_i - value_j| over the methods present.
std::vector<AgreementRow> agreement_table(const std::vector<AccuracyRecord>& records);

// --- deterministic file emitters -------------------------------------------

void emit_csv(const std::vector<AccuracyRecord>& records, const std::filesystem::path& path);
std::vector<AccuracyRecord> read_csv(const std::filesystem::path& path);
void emit_profile_csv(const AccuracyProfile& profile, const std::filesystem::path& path);
void emit_profile_plot(const AccuracyProfile& profile, const std::filesystem::path& path);
void emit_agreement_csv(const std::vector<AgreementRow>& rows, const std::filesystem::path& path);

/// Parse a JSON plan file mirroring the BenchPlan fields.
BenchPlan load_plan(const std::filesystem::path& path);

}  // namespace cosmea::bench
