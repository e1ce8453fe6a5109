#include "lbp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <omp.h>

#include "lbp/hops.hpp"
#include "lbp/optimizers.hpp"

namespace lbp::exp {

namespace {

constexpr const char* kSummarySchema = "# lbp-summary-v1";
constexpr const char* kConfigSchema = "# lbp-config-v1";

std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::string optional_ll(const std::optional<long long>& v) {
    return v ? std::to_string(*v) : "na";
}

opt::RunResult dispatch(const std::string& optimizer, const Problem& problem,
                        EvaluationBudget budget, uint64_t seed) {
    if (optimizer == "ltgomea-sll") {
        opt::LtGomeaOptions options;
        options.backend = opt::LinkageBackend::sll;
        return opt::ltgomea_run(problem, budget, seed, options);
    }
    if (optimizer == "ltgomea-dled") {
        opt::LtGomeaOptions options;
        options.backend = opt::LinkageBackend::dled;
        return opt::ltgomea_run(problem, budget, seed, options);
    }
    if (optimizer == "ils-sll") return opt::ils_sll_run(problem, budget, seed);
    if (optimizer == "fihc-restart") return opt::fihc_restart_run(problem, budget, seed);
    throw std::invalid_argument("unknown optimizer '" + optimizer + "'");
}

}  // namespace

std::string config_hash(const std::string& canonical_problem, const std::string& optimizer,
                        std::optional<long long> ffe_limit, std::optional<double> time_limit) {
    std::string text = canonical_problem + "|" + optimizer + "|" + optional_ll(ffe_limit) + "|" +
                       (time_limit ? format_fixed(*time_limit, 3) : "na");
    uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config) {
    if (!config.ffe_limit && !config.time_limit_sec) {
        throw std::invalid_argument("at least one of the FFE / time limits must be set");
    }
    if (config.seeds.empty()) throw std::invalid_argument("seed list must be non-empty");

    const ProblemHandle handle = make_problem(config.problem);
    const std::string hash =
        config_hash(handle.canonical_spec, config.optimizer, config.ffe_limit,
                    config.time_limit_sec);
    const std::filesystem::path config_dir = config.out_dir / hash;
    std::filesystem::create_directories(config_dir);

    const int seeds = static_cast<int>(config.seeds.size());
    std::vector<RunRecord> records(seeds);
    std::vector<std::string> errors(seeds);
    const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int i = 0; i < seeds; ++i) {
        try {
            const uint64_t seed = config.seeds[i];
            const std::filesystem::path run_dir = config_dir / ("run-" + std::to_string(seed));
            std::filesystem::create_directories(run_dir);

            EvaluationBudget budget;
            budget.ffe_limit = config.ffe_limit;
            if (config.time_limit_sec) {
                budget.wall_limit = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(*config.time_limit_sec));
            }
            const opt::RunResult result =
                dispatch(config.optimizer, *handle.problem, budget, seed);

            RunRecord rec;
            rec.seed = seed;
            rec.best_external = result.evaluated
                                    ? to_external(result.best_raw, handle.problem->orientation())
                                    : std::numeric_limits<double>::quiet_NaN();
            rec.ffe_used = result.ffe_used;
            rec.ffe_to_optimum = result.ffe_to_optimum;
            rec.trace_path = "run-" + std::to_string(seed) + "/trace.txt";
            rec.hops_path = "run-" + std::to_string(seed) + "/hops.csv";
            {
                std::ofstream out(run_dir / "trace.txt");
                write_trace(out, result.trace);
            }
            if (result.trace.size() >= 2) {
                const hops::HopReport report = hops::hop_report(result.trace, *handle.problem);
                rec.mods = static_cast<int>(report.per_modification_hops.size());
                rec.not_applicable = report.not_applicable_count;
                rec.not_applicable_pct = report.not_applicable_pct;
                rec.analysis_probes = report.analysis_probes;
                std::ofstream hout(run_dir / "hops.csv");
                hops::write_hop_csv(hout, report);
                std::ofstream histout(run_dir / "hist.csv");
                hops::write_hist_csv(histout, report);
            } else {
                std::ofstream hout(run_dir / "hops.csv");
                hout << "index,hops,applicable_to_initial\n";
                hout << "summary,0,0.0000,0\n";
                std::ofstream histout(run_dir / "hist.csv");
                histout << "bin,count\n";
            }
            records[i] = rec;
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (const std::string& err : errors) {
        if (!err.empty()) throw std::runtime_error("run failed: " + err);
    }

    {
        std::ofstream out(config_dir / "config.txt");
        out << kConfigSchema << "\n";
        out << "problem=" << handle.canonical_spec << "\n";
        out << "optimizer=" << config.optimizer << "\n";
        out << "ffe=" << optional_ll(config.ffe_limit) << "\n";
        out << "time=" << (config.time_limit_sec ? format_fixed(*config.time_limit_sec, 3) : "na")
            << "\n";
        out << "label=" << handle.label << "\n";
        out << "n=" << handle.n << "\n";
        out << "hash=" << hash << "\n";
    }
    {
        std::vector<RunRecord> sorted = records;
        std::sort(sorted.begin(), sorted.end(),
                  [](const RunRecord& a, const RunRecord& b) { return a.seed < b.seed; });
        std::ofstream out(config_dir / "summary.csv");
        out << kSummarySchema << "\n";
        out << "seed,best,ffe_used,ffe_to_optimum,mods,not_applicable,not_applicable_pct,"
               "analysis_ffe,trace,hops\n";
        for (const RunRecord& r : sorted) {
            out << r.seed << ','
                << (std::isnan(r.best_external) ? "na" : format_double(r.best_external)) << ','
                << r.ffe_used << ',' << optional_ll(r.ffe_to_optimum) << ',' << r.mods << ','
                << r.not_applicable << ',' << format_fixed(r.not_applicable_pct, 4) << ','
                << r.analysis_probes << ',' << r.trace_path << ',' << r.hops_path << "\n";
        }
    }
    return records;
}

// ---------------------------------------------------------------------------
// Loading and summaries
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::vector<LoadedRun> load_records(const std::filesystem::path& in_dir) {
    std::vector<LoadedRun> runs;
    std::vector<std::filesystem::path> config_dirs;
    for (const auto& entry : std::filesystem::directory_iterator(in_dir)) {
        if (entry.is_directory() && std::filesystem::exists(entry.path() / "config.txt")) {
            config_dirs.push_back(entry.path());
        }
    }
    std::sort(config_dirs.begin(), config_dirs.end());

    for (const auto& dir : config_dirs) {
        std::string label, optimizer;
        int n = 0;
        {
            std::ifstream in(dir / "config.txt");
            std::string line;
            while (std::getline(in, line)) {
                if (line.rfind("label=", 0) == 0) label = line.substr(6);
                else if (line.rfind("optimizer=", 0) == 0) optimizer = line.substr(10);
                else if (line.rfind("n=", 0) == 0) n = std::stoi(line.substr(2));
            }
        }
        std::ifstream in(dir / "summary.csv");
        if (!in) throw std::runtime_error("missing summary.csv in " + dir.string());
        std::string line;
        bool header_seen = false;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            if (!header_seen) {
                header_seen = true;
                continue;
            }
            const auto cols = split(line, ',');
            if (cols.size() != 10) throw std::runtime_error("malformed summary row: " + line);
            LoadedRun run;
            run.label = label;
            run.optimizer = optimizer;
            run.n = n;
            run.record.seed = std::stoull(cols[0]);
            run.record.best_external =
                cols[1] == "na" ? std::numeric_limits<double>::quiet_NaN() : std::stod(cols[1]);
            run.record.ffe_used = std::stoll(cols[2]);
            if (cols[3] != "na") run.record.ffe_to_optimum = std::stoll(cols[3]);
            run.record.mods = std::stoi(cols[4]);
            run.record.not_applicable = std::stoi(cols[5]);
            run.record.not_applicable_pct = std::stod(cols[6]);
            run.record.analysis_probes = std::stoll(cols[7]);
            run.record.trace_path = (dir / cols[8]).string();
            run.record.hops_path = (dir / cols[9]).string();
            runs.push_back(std::move(run));
        }
    }
    return runs;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of an empty set");
    std::sort(values.begin(), values.end());
    const size_t m = values.size() / 2;
    if (values.size() % 2 == 1) return values[m];
    return (values[m - 1] + values[m]) / 2.0;
}

namespace {

using GroupKey = std::tuple<std::string, std::string, int>;

std::map<GroupKey, std::vector<const LoadedRun*>> group_runs(const std::vector<LoadedRun>& runs) {
    if (runs.empty()) throw std::invalid_argument("no run records to summarize");
    std::map<GroupKey, std::vector<const LoadedRun*>> groups;
    for (const LoadedRun& run : runs) {
        groups[{run.label, run.optimizer, run.n}].push_back(&run);
    }
    return groups;
}

}  // namespace

void summarize_scalability(const std::vector<LoadedRun>& runs, std::ostream& out) {
    out << "# lbp-scalability-v1\n";
    out << "label,optimizer,n,runs,solved,median_ffe\n";
    for (const auto& [key, group] : group_runs(runs)) {
        std::vector<double> solved_ffe;
        for (const LoadedRun* run : group) {
            if (run->record.ffe_to_optimum) solved_ffe.push_back(double(*run->record.ffe_to_optimum));
        }
        out << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
            << group.size() << ',' << solved_ffe.size() << ',';
        if (solved_ffe.empty()) out << "na";
        else out << format_fixed(median(std::move(solved_ffe)), 1);
        out << "\n";
    }
}

void summarize_applicability(const std::vector<LoadedRun>& runs, std::ostream& out) {
    out << "# lbp-applicability-v1\n";
    out << "label,optimizer,n,runs,count_min,count_max,count_med,pct_min,pct_max,pct_med\n";
    for (const auto& [key, group] : group_runs(runs)) {
        std::vector<double> counts, pcts;
        for (const LoadedRun* run : group) {
            counts.push_back(run->record.not_applicable);
            pcts.push_back(run->record.not_applicable_pct);
        }
        const auto [cmin, cmax] = std::minmax_element(counts.begin(), counts.end());
        const auto [pmin, pmax] = std::minmax_element(pcts.begin(), pcts.end());
        out << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
            << group.size() << ',' << format_fixed(*cmin, 0) << ',' << format_fixed(*cmax, 0)
            << ',' << format_fixed(median(counts), 1) << ',' << format_fixed(*pmin, 2) << ','
            << format_fixed(*pmax, 2) << ',' << format_fixed(median(pcts), 2) << "\n";
    }
}

namespace {

std::vector<int> read_hop_values(const std::filesystem::path& hops_csv) {
    std::ifstream in(hops_csv);
    if (!in) throw std::runtime_error("missing hop report: " + hops_csv.string());
    std::vector<int> hops;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.rfind("summary,", 0) == 0) break;
        const auto cols = split(line, ',');
        if (cols.size() != 3) throw std::runtime_error("malformed hop row: " + line);
        hops.push_back(std::stoi(cols[1]));
    }
    return hops;
}

}  // namespace

void summarize_hop_stats(const std::vector<LoadedRun>& runs,
                         const std::filesystem::path& in_dir, std::ostream& out) {
    (void)in_dir;  // hop paths in the records are already absolute
    out << "# lbp-hopstats-v1\n";
    out << "label,optimizer,n,runs,mods_med,hops_avg,hops_std,hopsmax_med,hopsmax_min,"
           "hopsmax_max\n";
    for (const auto& [key, group] : group_runs(runs)) {
        std::vector<double> mod_counts, per_run_max;
        std::vector<double> pooled;
        for (const LoadedRun* run : group) {
            const std::vector<int> hops = read_hop_values(run->record.hops_path);
            mod_counts.push_back(double(hops.size()));
            if (!hops.empty()) {
                per_run_max.push_back(double(*std::max_element(hops.begin(), hops.end())));
                for (int h : hops) pooled.push_back(double(h));
            }
        }
        out << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
            << group.size() << ',' << format_fixed(median(mod_counts), 1) << ',';
        if (pooled.empty()) {
            out << "na,na,na,na,na\n";
            continue;
        }
        double mean = 0.0;
        for (double h : pooled) mean += h;
        mean /= double(pooled.size());
        double var = 0.0;
        for (double h : pooled) var += (h - mean) * (h - mean);
        var /= double(pooled.size());
        const auto [mmin, mmax] = std::minmax_element(per_run_max.begin(), per_run_max.end());
        out << format_fixed(mean, 2) << ',' << format_fixed(std::sqrt(var), 2) << ','
            << format_fixed(median(per_run_max), 1) << ',' << format_fixed(*mmin, 0) << ','
            << format_fixed(*mmax, 0) << "\n";
    }
}

}  // namespace lbp::exp
