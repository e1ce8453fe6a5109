#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lbp/core.hpp"
#include "lbp/problem_spec.hpp"

namespace lbp::exp {

struct ExperimentConfig {
    std::string problem;    // spec string or instance file path
    std::string optimizer;  // ltgomea-sll | ltgomea-dled | ils-sll | fihc-restart
    std::optional<long long> ffe_limit;
    std::optional<double> time_limit_sec;
    std::vector<uint64_t> seeds;
    std::filesystem::path out_dir;
    int threads = 0;  // 0 = OpenMP default
};

struct RunRecord {
    uint64_t seed = 0;
    double best_external = 0.0;  // NaN when the run never evaluated
    long long ffe_used = 0;
    std::optional<long long> ffe_to_optimum;
    int mods = 0;
    int not_applicable = 0;
    double not_applicable_pct = 0.0;
    long long analysis_probes = 0;
    std::string trace_path;  // relative to the config directory
    std::string hops_path;
};

/// Stable FNV-1a hash of the canonical (problem, optimizer, budget) triple;
/// seeds deliberately excluded so reruns extend the same directory.
std::string config_hash(const std::string& canonical_problem, const std::string& optimizer,
                        std::optional<long long> ffe_limit, std::optional<double> time_limit);

/// One deterministic single-threaded run per seed, executed concurrently.
/// Writes <out>/<hash>/run-<seed>/{trace.txt,hops.csv,hist.csv}, a config.txt
/// and a summary.csv per config directory.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config);

/// A record annotated with the grouping metadata from config.txt.
struct LoadedRun {
    std::string label;
    std::string optimizer;
    int n = 0;
    RunRecord record;
};

std::vector<LoadedRun> load_records(const std::filesystem::path& in_dir);

/// Per-(label, optimizer, n) median FFE-to-optimum over successful runs;
/// unsolved runs are reported via the solved column.
void summarize_scalability(const std::vector<LoadedRun>& runs, std::ostream& out);
/// Min/max/median of the per-run not-applicable-to-initial counts and
/// percentages.
void summarize_applicability(const std::vector<LoadedRun>& runs, std::ostream& out);
/// Per-configuration modification counts and hop statistics; requires hop
/// CSVs next to the summaries.
void summarize_hop_stats(const std::vector<LoadedRun>& runs,
                         const std::filesystem::path& in_dir, std::ostream& out);

double median(std::vector<double> values);

}  // namespace lbp::exp
