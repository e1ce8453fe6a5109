#include "oracles.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <stdexcept>

namespace oracle {

using lbp::Genotype;
using lbp::bench::LeadingBlocksSpec;
using lbp::bench::Subfunction;

int bim_trap(int u, int k) {
    if (u != k && u != 0) return k / 2 - std::abs(u - k / 2) - 1;
    return k / 2;
}

int no_opt_bimodal(int u, int k) { return k / 2 - std::abs(u - k / 2) - 1; }

namespace {

int sub_value(Subfunction sub, int u, int k) {
    switch (sub) {
        case Subfunction::bimodal_trap: return bim_trap(u, k);
        case Subfunction::no_opt_bimodal: return no_opt_bimodal(u, k);
        case Subfunction::deceptive_trap: return u == k ? k : k - 1 - u;
    }
    std::abort();
}

int block_unitation(const Genotype& x, const std::vector<int>& block) {
    int u = 0;
    for (int i : block) u += x.genes[i];
    return u;
}

}  // namespace

int leading_ones(const Genotype& x) {
    // Sum over i of the product of the first i+1 genes.
    int total = 0;
    for (int i = 0; i < x.size(); ++i) {
        int prod = 1;
        for (int j = 0; j <= i; ++j) prod *= x.genes[j];
        total += prod;
    }
    return total;
}

int block_leading_ones(const Genotype& x, int l) {
    return static_cast<int>(std::floor(double(leading_ones(x)) / l));
}

int royal_staircase(const Genotype& x, int b) {
    // Sum over i = 1..n/b of the product of the first b*i genes.
    int total = 0;
    for (int i = 1; i <= x.size() / b; ++i) {
        int prod = 1;
        for (int j = 0; j < b * i; ++j) prod *= x.genes[j];
        total += prod;
    }
    return total;
}

std::vector<std::vector<int>> overlap_layout(int n, int k, int o, bool cyclic) {
    std::vector<std::vector<int>> blocks;
    if (o == 0) {
        for (int start = 0; start + k <= n; start += k) {
            std::vector<int> block;
            for (int j = 0; j < k; ++j) block.push_back(start + j);
            blocks.push_back(block);
        }
        return blocks;
    }
    if (cyclic) {
        for (int start = 0; start < n; start += k - o) {
            std::vector<int> block;
            for (int j = 0; j < k; ++j) block.push_back((start + j) % n);
            blocks.push_back(block);
        }
    } else {
        for (int start = 0; start + k <= n; start += k - o) {
            std::vector<int> block;
            for (int j = 0; j < k; ++j) block.push_back(start + j);
            blocks.push_back(block);
        }
    }
    return blocks;
}

double concat_eval(const Genotype& x, const std::vector<std::vector<int>>& blocks,
                   Subfunction sub) {
    double total = 0.0;
    for (const auto& block : blocks) {
        total += sub_value(sub, block_unitation(x, block), static_cast<int>(block.size()));
    }
    return total;
}

double lbp_eval(const Genotype& x, const LeadingBlocksSpec& spec) {
    const int blocks = static_cast<int>(spec.blocks.size());

    std::function<int(int)> enabled = [&](int s) -> int {
        if (s < spec.reach) return 1;
        for (int i = s - spec.reach; i <= s - 1; ++i) {
            if (i < 0) continue;
            const int k = static_cast<int>(spec.blocks[i].size());
            if (enabled(i) == 1 &&
                sub_value(spec.sub, block_unitation(x, spec.blocks[i]), k) == spec.block_optimum[i]) {
                return 1;
            }
        }
        return 0;
    };

    double enabled_part = 0.0;
    for (int s = 0; s < blocks; ++s) {
        const int k = static_cast<int>(spec.blocks[s].size());
        enabled_part += enabled(s) * sub_value(spec.sub, block_unitation(x, spec.blocks[s]), k);
    }

    double fd = 0.0;
    if (spec.variant == lbp::bench::LbpVariant::half_on_half) {
        double fdmax = 0.0;
        double size_d = 0.0, u_d = 0.0;
        for (int s = 0; s < blocks; ++s) {
            fdmax += (1 - enabled(s)) * spec.block_optimum[s];
            if (enabled(s) == 0) {
                size_d += double(spec.blocks[s].size());
                u_d += block_unitation(x, spec.blocks[s]);
            }
        }
        if (size_d > 0.0) {
            fd = (fdmax * spec.alpha) * (1.0 - std::abs(u_d - size_d / 2.0) / (size_d / 2.0));
        }
    } else if (spec.variant == lbp::bench::LbpVariant::alter) {
        for (int s = 0; s < blocks; ++s) {
            const int k = static_cast<int>(spec.blocks[s].size());
            fd += (1 - enabled(s)) * no_opt_bimodal(block_unitation(x, spec.blocks[s]), k);
        }
    }
    return enabled_part + fd;
}

int max3sat_recount(const Genotype& x, const lbp::bench::Max3SatInstance& inst) {
    int satisfied = 0;
    for (const auto& clause : inst.clauses) {
        bool ok = false;
        for (int i = 0; i < 3; ++i) {
            const bool value = x.genes[clause.var[i]] == 1;
            const bool want = clause.positive[i] != 0;
            if (value == want) ok = true;
        }
        if (ok) ++satisfied;
    }
    return satisfied;
}

double lfl(const lbp::flow::NetworkInstance& inst, const lbp::flow::FlowVector& f) {
    auto eps = [](double v) { return v > 0.0 ? v : 0.0; };
    const auto& arcs = inst.arcs();
    double total = 0.0;
    for (int v = 0; v < inst.node_count(); ++v) {
        double ln_out = 0.0, ln_in = 0.0;
        for (size_t a = 0; a < arcs.size(); ++a) {
            if (arcs[a].origin == v) {
                double g = 0.0, e = 0.0;
                for (size_t b = 0; b < arcs.size(); ++b) {
                    if (arcs[b].origin == v) {
                        g += f[b];
                        e += arcs[b].capacity;
                    }
                }
                ln_out += eps(g - (e - arcs[a].capacity));
            }
            if (arcs[a].dest == v) {
                double g = 0.0, e = 0.0;
                for (size_t b = 0; b < arcs.size(); ++b) {
                    if (arcs[b].dest == v) {
                        g += f[b];
                        e += arcs[b].capacity;
                    }
                }
                ln_in += eps(g - (e - arcs[a].capacity));
            }
        }
        total += (ln_in + ln_out) / 2.0;
    }
    return total;
}

double wpflf_best(const lbp::flow::NetworkInstance& inst) {
    const auto alphabet = lbp::flow::solution_alphabet(inst);
    Genotype sol{std::vector<int32_t>(inst.demands().size(), 0), alphabet};
    double best = std::numeric_limits<double>::infinity();
    std::function<void(size_t)> walk = [&](size_t p) {
        if (p == inst.demands().size()) {
            best = std::min(best, lbp::flow::wpflf_objective(inst, sol));
            return;
        }
        for (int32_t r = 0; r < static_cast<int32_t>(inst.demands()[p].routes.size()); ++r) {
            sol.genes[p] = r;
            walk(p + 1);
        }
    };
    walk(0);
    return best;
}

int exact_min_hops(const lbp::ImprovementTrace& trace, const lbp::Problem& problem, int upto) {
    const double tol = problem.tolerance();
    std::vector<lbp::hops::Modification> mods;
    for (int i = 1; i <= upto; ++i) {
        mods.push_back(lbp::hops::get_mod(trace.entry(i).genotype, trace.entry(i - 1).genotype));
    }
    const int optional_count = upto - 1;  // the final modification is mandatory

    auto valid_with = [&](unsigned mask) -> bool {
        Genotype state = trace.entry(0).genotype;
        double fitness = problem.evaluate_raw(state);
        for (int i = 0; i < optional_count; ++i) {
            if (!(mask & (1u << i))) continue;
            const Genotype next = lbp::hops::apply_mod(state, mods[i]);
            const double f = problem.evaluate_raw(next);
            if (!lbp::improves(f, fitness, tol)) return false;
            state = next;
            fitness = f;
        }
        const Genotype last = lbp::hops::apply_mod(state, mods[upto - 1]);
        return lbp::improves(problem.evaluate_raw(last), fitness, tol);
    };

    for (int size = 0; size <= optional_count; ++size) {
        for (unsigned mask = 0; mask < (1u << optional_count); ++mask) {
            if (std::popcount(mask) != size) continue;
            if (valid_with(mask)) return size + 1;
        }
    }
    throw std::logic_error("no improving subsequence found; trace is inconsistent");
}

}  // namespace oracle
