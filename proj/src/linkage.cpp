#include "lbp/linkage.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace lbp::linkage {

namespace {

void require_binary_population(std::span<const Genotype> population) {
    if (population.empty()) throw std::invalid_argument("population must be non-empty");
    const int n = population.front().size();
    for (const Genotype& x : population) {
        if (x.size() != n || !x.alphabet || !x.alphabet->is_binary()) {
            throw std::invalid_argument("population must hold equal-length binary genotypes");
        }
    }
}

double mi_from_counts(const std::array<uint32_t, 4>& c, long long total) {
    if (total == 0) return 0.0;
    const double inv = 1.0 / double(total);
    const double pa[2] = {(c[0] + c[1]) * inv, (c[2] + c[3]) * inv};
    const double pb[2] = {(c[0] + c[2]) * inv, (c[1] + c[3]) * inv};
    double mi = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const double p = c[a * 2 + b] * inv;
            if (p > 0.0) mi += p * std::log2(p / (pa[a] * pb[b]));
        }
    }
    return mi > 0.0 ? mi : 0.0;
}

}  // namespace

PairFrequencies::PairFrequencies(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("pair frequencies need n >= 1");
    joint_.assign(size_t(n) * (n - 1) / 2, std::array<uint32_t, 4>{});
}

size_t PairFrequencies::pair_offset(int g, int h) const {
    return size_t(g) * n_ - size_t(g) * (g + 1) / 2 + (h - g - 1);
}

void PairFrequencies::add(const Genotype& x) {
    if (x.size() != n_) throw std::invalid_argument("genotype length mismatch");
    size_t off = 0;
    for (int g = 0; g < n_; ++g) {
        const int a = x.genes[g];
        for (int h = g + 1; h < n_; ++h, ++off) {
            joint_[off][a * 2 + x.genes[h]]++;
        }
    }
    ++samples_;
}

void PairFrequencies::remove(const Genotype& x) {
    if (x.size() != n_) throw std::invalid_argument("genotype length mismatch");
    if (samples_ == 0) throw std::logic_error("no samples to remove");
    size_t off = 0;
    for (int g = 0; g < n_; ++g) {
        const int a = x.genes[g];
        for (int h = g + 1; h < n_; ++h, ++off) {
            joint_[off][a * 2 + x.genes[h]]--;
        }
    }
    --samples_;
}

DependencyMatrix PairFrequencies::mutual_information() const {
    DependencyMatrix dm(n_);
#pragma omp parallel for schedule(dynamic, 8)
    for (int g = 0; g < n_; ++g) {
        for (int h = g + 1; h < n_; ++h) {
            dm.set(g, h, mi_from_counts(joint_[pair_offset(g, h)], samples_));
        }
    }
    return dm;
}

DependencyMatrix mutual_information_dsm(std::span<const Genotype> population) {
    require_binary_population(population);
    PairFrequencies freqs(population.front().size());
    for (const Genotype& x : population) freqs.add(x);
    return freqs.mutual_information();
}

DependencyMatrix mutual_information_dsm_serial(std::span<const Genotype> population) {
    require_binary_population(population);
    const int n = population.front().size();
    DependencyMatrix dm(n);
    for (int g = 0; g < n; ++g) {
        for (int h = g + 1; h < n; ++h) {
            std::array<uint32_t, 4> counts{};
            for (const Genotype& x : population) counts[x.genes[g] * 2 + x.genes[h]]++;
            dm.set(g, h, mi_from_counts(counts, static_cast<long long>(population.size())));
        }
    }
    return dm;
}

// ---------------------------------------------------------------------------
// Linkage tree
// ---------------------------------------------------------------------------

namespace {

using PairKey = std::pair<int, int>;

bool better_candidate(double v1, PairKey k1, double v2, PairKey k2) {
    if (v1 != v2) return v1 > v2;
    return k1 < k2;
}

}  // namespace

LinkageTree build_linkage_tree(const DependencyMatrix& dsm, Rng& rng) {
    (void)rng;  // tie-breaking is fully ordered by gene indices
    const int n = dsm.n;
    if (n < 1) throw std::invalid_argument("dsm must cover at least one gene");

    LinkageTree tree;
    tree.n = n;
    tree.clusters.reserve(2 * size_t(n) - 1);
    for (int i = 0; i < n; ++i) tree.clusters.push_back({i});
    if (n == 1) return tree;

    // Slot-compacted state over active clusters. sums holds cross-pair
    // strength sums so the unweighted average is sums/(|A||B|).
    std::vector<double> sums(size_t(n) * n, 0.0);
    std::vector<int> cluster_id(n), size(n, 1), min_gene(n);
    for (int i = 0; i < n; ++i) {
        cluster_id[i] = i;
        min_gene[i] = i;
        for (int j = 0; j < n; ++j) sums[size_t(i) * n + j] = dsm.at(i, j);
    }

    auto sum_at = [&](int i, int j) -> double& { return sums[size_t(i) * n + j]; };
    auto avg = [&](int i, int j) {
        return sum_at(i, j) / (double(size[i]) * double(size[j]));
    };
    auto key_of = [&](int i, int j) {
        return PairKey{std::min(min_gene[i], min_gene[j]), std::max(min_gene[i], min_gene[j])};
    };

    int active = n;
    std::vector<int> best(n, -1);
    std::vector<double> bestv(n, 0.0);

    auto recompute_best = [&](int i) {
        best[i] = -1;
        for (int j = 0; j < active; ++j) {
            if (j == i) continue;
            const double v = avg(i, j);
            if (best[i] < 0 || better_candidate(v, key_of(i, j), bestv[i], key_of(i, best[i]))) {
                best[i] = j;
                bestv[i] = v;
            }
        }
    };
    for (int i = 0; i < active; ++i) recompute_best(i);

    enum Action : uint8_t { kCompare, kRecompute, kRepoint };

    std::vector<Action> action(n);
    while (active > 1) {
        // Global best pair from the per-slot caches.
        int pick = 0;
        for (int i = 1; i < active; ++i) {
            if (better_candidate(bestv[i], key_of(i, best[i]), bestv[pick], key_of(pick, best[pick]))) {
                pick = i;
            }
        }
        const int lo = std::min(pick, best[pick]);
        const int hi = std::max(pick, best[pick]);
        const int last = active - 1;

        // Record the merge.
        std::vector<int> merged;
        merged.reserve(size[lo] + size[hi]);
        const auto& ca = tree.clusters[cluster_id[lo]];
        const auto& cb = tree.clusters[cluster_id[hi]];
        std::merge(ca.begin(), ca.end(), cb.begin(), cb.end(), std::back_inserter(merged));
        tree.merge_children.push_back({cluster_id[lo], cluster_id[hi]});
        tree.clusters.push_back(std::move(merged));
        const int new_id = static_cast<int>(tree.clusters.size()) - 1;

        for (int t = 0; t < active; ++t) {
            if (t == lo || t == hi) continue;
            if (best[t] == lo || best[t] == hi) action[t] = kRecompute;
            else if (best[t] == last) action[t] = kRepoint;
            else action[t] = kCompare;
        }

        // Fold hi into lo.
        for (int t = 0; t < active; ++t) {
            if (t == lo || t == hi) continue;
            const double v = sum_at(lo, t) + sum_at(hi, t);
            sum_at(lo, t) = v;
            sum_at(t, lo) = v;
        }
        size[lo] += size[hi];
        min_gene[lo] = std::min(min_gene[lo], min_gene[hi]);
        cluster_id[lo] = new_id;

        // Move the last slot into hi.
        if (hi != last) {
            for (int t = 0; t < active; ++t) {
                if (t == hi || t == last) continue;
                const double v = sum_at(last, t);
                sum_at(hi, t) = v;
                sum_at(t, hi) = v;
            }
            size[hi] = size[last];
            min_gene[hi] = min_gene[last];
            cluster_id[hi] = cluster_id[last];
            best[hi] = best[last];
            bestv[hi] = bestv[last];
        }
        --active;

        recompute_best(lo);
        for (int t = 0; t < active + 1; ++t) {
            if (t == lo || t == hi) continue;
            const int nt = (t == last) ? hi : t;
            if (nt >= active) continue;
            switch (action[t]) {
                case kRecompute:
                    recompute_best(nt);
                    break;
                case kRepoint:
                    best[nt] = hi;
                    break;
                case kCompare: {
                    const double cand = avg(lo, nt);
                    if (better_candidate(cand, key_of(lo, nt), bestv[nt], key_of(best[nt], nt))) {
                        best[nt] = lo;
                        bestv[nt] = cand;
                    }
                    break;
                }
            }
        }
    }
    return tree;
}

std::vector<int> mixing_cluster_indices(const LinkageTree& tree) {
    if (tree.clusters.size() == 1) return {0};
    std::vector<int> out;
    out.reserve(tree.clusters.size() - 1);
    for (int i = 0; i < tree.root_index(); ++i) out.push_back(i);
    return out;
}

std::vector<int> perturbation_cluster_indices(const LinkageTree& tree) {
    if (tree.clusters.size() == 1) return {0};
    std::vector<int> out;
    for (int i = 0; i < tree.root_index(); ++i) {
        if (tree.clusters[i].size() >= 2) out.push_back(i);
    }
    if (out.empty()) {
        for (int i = 0; i < tree.root_index(); ++i) out.push_back(i);
    }
    return out;
}

// ---------------------------------------------------------------------------
// DLED
// ---------------------------------------------------------------------------

DledOutcome dled_check(const Genotype& x, int g, int h, const Problem& problem,
                       EvaluationBudget& budget) {
    if (g == h) throw std::invalid_argument("dled_check needs two distinct genes");
    if (!x.alphabet || !x.alphabet->is_binary()) {
        throw std::invalid_argument("dled_check requires a binary genotype");
    }
    const double tol = problem.tolerance();
    Genotype y = x;
    const double fx = evaluate_raw_budgeted(problem, y, budget);
    y.genes[g] ^= 1;
    const double fg = evaluate_raw_budgeted(problem, y, budget);
    y.genes[g] ^= 1;
    y.genes[h] ^= 1;
    const double fh = evaluate_raw_budgeted(problem, y, budget);
    y.genes[g] ^= 1;
    const double fgh = evaluate_raw_budgeted(problem, y, budget);

    auto lt = [tol](double a, double b) { return improves(b, a, tol); };
    const bool fix_h = lt(fx, fg) != lt(fh, fgh);  // effect of flipping g depends on h
    const bool fix_g = lt(fx, fh) != lt(fg, fgh);  // effect of flipping h depends on g
    return (fix_h || fix_g) ? DledOutcome::dependent : DledOutcome::not_detected;
}

DependencyLedger::DependencyLedger(int n) : n(n) {
    if (n < 2) throw std::invalid_argument("dependency ledger needs n >= 2");
    verified_.assign(size_t(n) * (n - 1) / 2, 0);
}

size_t DependencyLedger::pair_index(int g, int h) const {
    if (g > h) std::swap(g, h);
    return size_t(g) * n - size_t(g) * (g + 1) / 2 + (h - g - 1);
}

bool DependencyLedger::is_verified(int g, int h) const { return verified_[pair_index(g, h)] != 0; }

void DependencyLedger::mark(int g, int h) {
    uint8_t& slot = verified_[pair_index(g, h)];
    if (!slot) {
        slot = 1;
        ++verified_count_;
    }
}

DependencyMatrix ledger_matrix(const DependencyLedger& ledger) {
    DependencyMatrix dm(ledger.n);
    for (int g = 0; g < ledger.n; ++g) {
        for (int h = g + 1; h < ledger.n; ++h) {
            if (ledger.is_verified(g, h)) dm.set(g, h, 1.0);
        }
    }
    return dm;
}

DependencyMatrix dled_dsm(DependencyLedger& ledger, std::span<const Genotype> probes,
                          const Problem& problem, EvaluationBudget& budget,
                          long long max_checks) {
    if (max_checks < 0) max_checks = LLONG_MAX;
    const size_t pairs = ledger.pair_count();
    const int n = ledger.n;

    // Locate the (g,h) pair the cursor points at.
    auto pair_at = [n](size_t idx) {
        int g = 0;
        size_t row = size_t(n) - 1;
        while (idx >= row) {
            idx -= row;
            ++g;
            --row;
        }
        return std::pair<int, int>{g, g + 1 + static_cast<int>(idx)};
    };

    long long used = 0;
    try {
        size_t step = 0;
        for (; step < pairs && used < max_checks && !probes.empty(); ++step) {
            const size_t idx = (ledger.cursor + step) % pairs;
            if (ledger.verified_[idx]) continue;
            const auto [g, h] = pair_at(idx);
            bool completed = true;
            for (const Genotype& probe : probes) {
                if (used >= max_checks) {
                    completed = false;
                    break;
                }
                ++used;
                ++ledger.checks_done;
                if (dled_check(probe, g, h, problem, budget) == DledOutcome::dependent) {
                    ledger.mark(g, h);
                    break;
                }
            }
            if (!completed) break;  // pair only partially probed; revisit next call
        }
        ledger.cursor = (ledger.cursor + step) % std::max<size_t>(pairs, 1);
    } catch (const BudgetExhausted&) {
        // Partial ledger is returned below.
    }
    return ledger_matrix(ledger);
}

void write_dsm_csv(std::ostream& out, const DependencyMatrix& dsm) {
    for (int g = 0; g < dsm.n; ++g) {
        for (int h = 0; h < dsm.n; ++h) {
            if (h) out << ',';
            out << format_double(dsm.at(g, h));
        }
        out << "\n";
    }
}

void write_tree(std::ostream& out, const LinkageTree& tree) {
    for (const auto& cluster : tree.clusters) {
        for (size_t i = 0; i < cluster.size(); ++i) {
            if (i) out << ' ';
            out << cluster[i];
        }
        out << "\n";
    }
}

}  // namespace lbp::linkage
