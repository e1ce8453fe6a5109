#include "lbp/hops.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace lbp::hops {

Modification get_mod(const Genotype& cur, const Genotype& prev) {
    if (cur.size() != prev.size()) throw std::invalid_argument("get_mod: shape mismatch");
    Modification mod;
    for (int i = 0; i < cur.size(); ++i) {
        if (cur.genes[i] != prev.genes[i]) {
            mod.positions.push_back(i);
            mod.values.push_back(cur.genes[i]);
        }
    }
    if (mod.positions.empty()) throw std::invalid_argument("get_mod: genotypes are identical");
    return mod;
}

Genotype apply_mod(const Genotype& x, const Modification& mod) {
    Genotype out = x;
    for (size_t j = 0; j < mod.positions.size(); ++j) {
        const int pos = mod.positions[j];
        if (pos < 0 || pos >= x.size()) throw std::invalid_argument("apply_mod: position out of range");
        out.genes[pos] = mod.values[j];
    }
    return out;
}

std::vector<Modification> trace_modifications(const ImprovementTrace& trace) {
    std::vector<Modification> mods;
    for (size_t i = 1; i < trace.size(); ++i) {
        mods.push_back(get_mod(trace.entry(i).genotype, trace.entry(i - 1).genotype));
    }
    return mods;
}

namespace {

double probe(const Problem& problem, const Genotype& x, AnalysisCounter* counter) {
    if (counter) ++counter->probes;
    return problem.evaluate_raw(x);
}

}  // namespace

int estimate_hops(const ImprovementTrace& trace, const Problem& problem, int upto,
                  AnalysisCounter* counter) {
    if (upto < 1 || upto >= static_cast<int>(trace.size())) {
        throw std::out_of_range("estimate_hops: entry index out of range");
    }
    const double tol = problem.tolerance();
    int hops = 0;
    int cur = upto;
    while (cur > 0) {
        int last = cur - 1;
        const Modification mod = get_mod(trace.entry(cur).genotype, trace.entry(last).genotype);
        while (last > 0) {
            const TraceEntry& earlier = trace.entry(last - 1);
            const double modified = probe(problem, apply_mod(earlier.genotype, mod), counter);
            if (!improves(modified, earlier.fitness_raw, tol)) break;
            --last;
        }
        ++hops;
        cur = last;
    }
    return hops;
}

namespace {

HopReport build_report(const ImprovementTrace& trace, const Problem& problem, bool parallel) {
    if (trace.size() < 2) throw std::invalid_argument("hop report needs a trace of length >= 2");
    const int b = static_cast<int>(trace.size()) - 1;
    const double tol = problem.tolerance();

    HopReport report;
    report.per_modification_hops.assign(b, 0);
    report.applicable_to_initial.assign(b, 0);
    std::vector<long long> probes(b, 0);

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int i = 1; i <= b; ++i) {
        AnalysisCounter counter;
        report.per_modification_hops[i - 1] = estimate_hops(trace, problem, i, &counter);
        const Modification mod =
            get_mod(trace.entry(i).genotype, trace.entry(i - 1).genotype);
        const TraceEntry& initial = trace.entry(0);
        const double on_initial = probe(problem, apply_mod(initial.genotype, mod), &counter);
        report.applicable_to_initial[i - 1] = improves(on_initial, initial.fitness_raw, tol);
        probes[i - 1] = counter.probes;
    }

    for (int i = 0; i < b; ++i) {
        if (!report.applicable_to_initial[i]) ++report.not_applicable_count;
        report.analysis_probes += probes[i];
        const int h = report.per_modification_hops[i];
        report.histogram[std::min(h, kHistogramBins) - 1]++;
    }
    report.not_applicable_pct = 100.0 * report.not_applicable_count / b;
    return report;
}

}  // namespace

HopReport hop_report(const ImprovementTrace& trace, const Problem& problem) {
    return build_report(trace, problem, true);
}

HopReport hop_report_serial(const ImprovementTrace& trace, const Problem& problem) {
    return build_report(trace, problem, false);
}

void write_hop_csv(std::ostream& out, const HopReport& report) {
    out << "index,hops,applicable_to_initial\n";
    const int b = static_cast<int>(report.per_modification_hops.size());
    for (int i = 0; i < b; ++i) {
        out << (i + 1) << ',' << report.per_modification_hops[i] << ','
            << int(report.applicable_to_initial[i]) << "\n";
    }
    char pct[32];
    std::snprintf(pct, sizeof(pct), "%.4f", report.not_applicable_pct);
    out << "summary," << report.not_applicable_count << ',' << pct << ','
        << report.analysis_probes << "\n";
}

void write_hist_csv(std::ostream& out, const HopReport& report) {
    out << "bin,count\n";
    for (int bin = 1; bin <= kHistogramBins; ++bin) {
        if (bin < kHistogramBins) out << bin;
        else out << kHistogramBins << '+';
        out << ',' << report.histogram[bin - 1] << "\n";
    }
}

}  // namespace lbp::hops
