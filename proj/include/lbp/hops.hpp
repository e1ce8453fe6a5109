#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "lbp/core.hpp"

namespace lbp::hops {

/// Gene positions and alleles by which one best-so-far solution differs
/// from its predecessor; values come from the later individual.
struct Modification {
    std::vector<int> positions;
    std::vector<int32_t> values;

    bool operator==(const Modification&) const = default;
};

/// Differing positions with the alleles of `cur`; applying the result to
/// `prev` reproduces `cur`. Throws when the genotypes are identical.
Modification get_mod(const Genotype& cur, const Genotype& prev);

/// Copy of x with the modification's positions overwritten.
Genotype apply_mod(const Genotype& x, const Modification& mod);

/// Consecutive-entry modifications of a trace (entry i vs entry i-1).
std::vector<Modification> trace_modifications(const ImprovementTrace& trace);

/// Fitness probes made by the analysis; kept apart from optimizer budgets.
struct AnalysisCounter {
    long long probes = 0;
};

/// Upper bound on the hop number of the modification leading to trace entry
/// `upto`: walk each modification backward while applying it still strictly
/// improves the earlier entry, count one hop per segment, and continue from
/// where the walk stopped.
int estimate_hops(const ImprovementTrace& trace, const Problem& problem, int upto,
                  AnalysisCounter* counter = nullptr);

constexpr int kHistogramBins = 20;  // hop values 1..19 plus a 20+ bucket

struct HopReport {
    std::vector<int> per_modification_hops;       // aligned with entries 1..b
    std::vector<uint8_t> applicable_to_initial;   // per modification
    int not_applicable_count = 0;                 // mods not improving entry 0
    double not_applicable_pct = 0.0;
    std::array<long long, kHistogramBins> histogram{};
    long long analysis_probes = 0;
};

HopReport hop_report(const ImprovementTrace& trace, const Problem& problem);
/// Single-threaded reference for the parallel report.
HopReport hop_report_serial(const ImprovementTrace& trace, const Problem& problem);

/// CSV: "index,hops,applicable_to_initial" rows plus a closing
/// "summary,<not_applicable>,<pct>,<analysis_probes>" row.
void write_hop_csv(std::ostream& out, const HopReport& report);
/// CSV: "bin,count" with bins 1..19 and 20+.
void write_hist_csv(std::ostream& out, const HopReport& report);

}  // namespace lbp::hops
