#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "lbp/core.hpp"

namespace lbp::linkage {

/// Symmetric gene-pair dependency strengths with a zero diagonal.
struct DependencyMatrix {
    int n = 0;
    std::vector<double> values;  // n*n row-major

    DependencyMatrix() = default;
    explicit DependencyMatrix(int n_) : n(n_), values(size_t(n_) * n_, 0.0) {}

    double at(int g, int h) const { return values[size_t(g) * n + h]; }
    void set(int g, int h, double v) {
        values[size_t(g) * n + h] = v;
        values[size_t(h) * n + g] = v;
    }
};

/// Incrementally maintained joint allele counts for all gene pairs of a
/// binary problem; add/remove cost O(n^2) per genotype.
class PairFrequencies {
public:
    explicit PairFrequencies(int n);

    void add(const Genotype& x);
    void remove(const Genotype& x);
    long long samples() const { return samples_; }

    /// Plug-in mutual information in bits per pair; zero-probability terms
    /// contribute nothing and entries are clamped at zero.
    DependencyMatrix mutual_information() const;

private:
    size_t pair_offset(int g, int h) const;  // g < h
    int n_;
    long long samples_ = 0;
    std::vector<std::array<uint32_t, 4>> joint_;  // [a*2+b] per pair
};

/// MI-based DSM from a population snapshot (OpenMP over gene pairs).
DependencyMatrix mutual_information_dsm(std::span<const Genotype> population);
/// Straightforward single-threaded reference implementation.
DependencyMatrix mutual_information_dsm_serial(std::span<const Genotype> population);

/// Binary agglomerative merge hierarchy built from a DSM. Clusters are kept
/// in creation order: n leaves first, then n-1 merges ending at the root.
struct LinkageTree {
    int n = 0;
    std::vector<std::vector<int>> clusters;          // sorted gene indices
    std::vector<std::array<int, 2>> merge_children;  // per internal cluster

    int root_index() const { return static_cast<int>(clusters.size()) - 1; }
};

/// Greedy merging of the pair of clusters with maximal unweighted average
/// cross-pair strength; ties go to the pair with the lexicographically
/// smallest (min gene, other min gene) key, which makes the build
/// deterministic. The rng parameter is kept for interface stability.
LinkageTree build_linkage_tree(const DependencyMatrix& dsm, Rng& rng);

/// Clusters usable as mixing masks: everything but the full-gene root
/// (the root itself when it is the only cluster).
std::vector<int> mixing_cluster_indices(const LinkageTree& tree);
/// Perturbation masks: non-root clusters of size >= 2, falling back to
/// singletons when none exist.
std::vector<int> perturbation_cluster_indices(const LinkageTree& tree);

enum class DledOutcome { dependent, not_detected };

/// Four-evaluation direct dependency test around x (both flip orders are
/// considered so the outcome is symmetric in g and h). Consumes up to 4 FFE.
DledOutcome dled_check(const Genotype& x, int g, int h, const Problem& problem,
                       EvaluationBudget& budget);

/// Monotone set of verified-dependent pairs plus the round-robin cursor the
/// probing schedule continues from.
struct DependencyLedger {
    explicit DependencyLedger(int n);

    int n = 0;
    long long checks_done = 0;

    bool is_verified(int g, int h) const;
    void mark(int g, int h);
    long long verified_count() const { return verified_count_; }

    size_t pair_count() const { return verified_.size(); }
    size_t cursor = 0;

private:
    friend DependencyMatrix dled_dsm(DependencyLedger&, std::span<const Genotype>,
                                     const Problem&, EvaluationBudget&, long long);
    size_t pair_index(int g, int h) const;
    std::vector<uint8_t> verified_;
    long long verified_count_ = 0;
};

/// 0/1 matrix of currently verified pairs.
DependencyMatrix ledger_matrix(const DependencyLedger& ledger);

/// Runs dled_check for unverified pairs round-robin across the probes,
/// bounded by max_checks and the budget; on budget exhaustion the partial
/// ledger result is returned.
DependencyMatrix dled_dsm(DependencyLedger& ledger, std::span<const Genotype> probes,
                          const Problem& problem, EvaluationBudget& budget,
                          long long max_checks = -1);

void write_dsm_csv(std::ostream& out, const DependencyMatrix& dsm);
/// One cluster per line as sorted gene indices, creation order.
void write_tree(std::ostream& out, const LinkageTree& tree);

}  // namespace lbp::linkage
