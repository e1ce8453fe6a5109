#include "lbp/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace lbp::opt {

namespace {

/// Internal control signal: the known optimum was just evaluated.
struct OptimumFound {};

}  // namespace

GlobalBestRecorder::GlobalBestRecorder(const Problem& problem)
    : trace(problem.id(), problem.orientation(), problem.tolerance()),
      best_raw(-std::numeric_limits<double>::infinity()),
      tol(problem.tolerance()) {}

void GlobalBestRecorder::observe(const Genotype& x, double fitness_raw, long long ffe) {
    if (!has_best || improves(fitness_raw, best_raw, tol)) {
        best = x;
        best_raw = fitness_raw;
        has_best = true;
        trace.record(x, fitness_raw, ffe);
    }
}

EvalEnv::EvalEnv(const Problem& problem_, EvaluationBudget& budget_,
                 GlobalBestRecorder* recorder_)
    : problem(problem_),
      budget(budget_),
      tol(problem_.tolerance()),
      optimum(problem_.optimum_raw()),
      recorder(recorder_) {}

double EvalEnv::eval(const Genotype& x) {
    const double raw = evaluate_raw_budgeted(problem, x, budget);
    if (recorder) recorder->observe(x, raw, budget.ffe_used);
    if (optimum && not_worse(raw, *optimum, tol)) throw OptimumFound{};
    return raw;
}

void fihc(Genotype& x, double& fx, EvalEnv& env, Rng& rng) {
    const int n = x.size();
    if (n == 0) return;
    const Alphabet& alphabet = *x.alphabet;

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int32_t> alleles;

    bool improved_in_sweep = true;
    while (improved_in_sweep) {
        improved_in_sweep = false;
        std::shuffle(perm.begin(), perm.end(), rng);
        for (int gene : perm) {
            const int32_t card = alphabet.cardinality(gene);
            if (card < 2) continue;
            const int32_t incumbent = x.genes[gene];
            alleles.clear();
            for (int32_t v = 0; v < card; ++v) {
                if (v != incumbent) alleles.push_back(v);
            }
            std::shuffle(alleles.begin(), alleles.end(), rng);
            for (int32_t v : alleles) {
                x.genes[gene] = v;
                double f;
                try {
                    f = env.eval(x);
                } catch (...) {
                    x.genes[gene] = incumbent;
                    throw;
                }
                if (improves(f, fx, env.tol)) {
                    fx = f;
                    improved_in_sweep = true;
                    break;
                }
                x.genes[gene] = incumbent;
            }
        }
    }
}

namespace {

/// Masked donor copy with either non-decrease or strict-improvement
/// acceptance. One FFE when the masked genes differ, none otherwise.
bool masked_copy_attempt(Genotype& source, double& source_fitness, const Genotype& donor,
                         std::span<const int> mask, EvalEnv& env, bool require_strict) {
    if (mask.empty()) throw std::invalid_argument("optimal_mixing needs a non-empty mask");
    bool differs = false;
    for (int i : mask) {
        if (source.genes[i] != donor.genes[i]) {
            differs = true;
            break;
        }
    }
    if (!differs) return false;

    static thread_local std::vector<int32_t> saved;
    saved.clear();
    for (int i : mask) {
        saved.push_back(source.genes[i]);
        source.genes[i] = donor.genes[i];
    }
    auto revert = [&] {
        for (size_t j = 0; j < mask.size(); ++j) source.genes[mask[j]] = saved[j];
    };

    double f;
    try {
        f = env.eval(source);
    } catch (...) {
        revert();
        throw;
    }
    const bool accept = require_strict ? improves(f, source_fitness, env.tol)
                                       : not_worse(f, source_fitness, env.tol);
    if (accept) {
        source_fitness = f;
        return true;
    }
    revert();
    return false;
}

}  // namespace

bool optimal_mixing(Genotype& source, double& source_fitness, const Genotype& donor,
                    std::span<const int> mask, EvalEnv& env) {
    return masked_copy_attempt(source, source_fitness, donor, mask, env, false);
}

void gom_generation(Population& pop, const linkage::LinkageTree& tree, EvalEnv& env, Rng& rng,
                    bool force_improvement_all) {
    if (pop.size() == 0) return;
    std::vector<int> order = linkage::mixing_cluster_indices(tree);
    const std::vector<Genotype> donors = pop.members;  // generation-start snapshot
    const std::vector<double> donor_fitness = pop.fitness;
    size_t best = 0;
    for (size_t m = 1; m < donors.size(); ++m) {
        if (improves(donor_fitness[m], donor_fitness[best], env.tol)) best = m;
    }
    std::uniform_int_distribution<size_t> pick(0, donors.size() - 1);
    for (size_t m = 0; m < pop.size(); ++m) {
        bool changed = false;
        std::shuffle(order.begin(), order.end(), rng);
        for (int c : order) {
            const Genotype& donor = donors[pick(rng)];
            changed |= optimal_mixing(pop.members[m], pop.fitness[m], donor, tree.clusters[c], env);
        }
        if (changed && !force_improvement_all) continue;
        // Forced improvement for members the pass left untouched (and for
        // everyone once the population stagnated): mix against the population
        // best keeping the first strictly improving cluster copy; with none
        // at all the member becomes the best.
        std::shuffle(order.begin(), order.end(), rng);
        bool rescued = false;
        for (int c : order) {
            if (masked_copy_attempt(pop.members[m], pop.fitness[m], donors[best],
                                    tree.clusters[c], env, true)) {
                rescued = true;
                break;
            }
        }
        if (!rescued) {
            pop.members[m] = donors[best];
            pop.fitness[m] = donor_fitness[best];
        }
    }
}

// ---------------------------------------------------------------------------
// LT-GOMEA
// ---------------------------------------------------------------------------

namespace {

struct PopState {
    Population pop;
    Rng rng;
    bool alive = true;
    long long generations = 0;
    long long stagnant_generations = 0;
    double best_seen = -std::numeric_limits<double>::infinity();
};

// Converged means zero fitness spread: once every member sits on one value
// the population only drifts, so the schedule retires it.
bool all_members_identical(const Population& pop) {
    for (size_t m = 1; m < pop.size(); ++m) {
        if (pop.fitness[m] != pop.fitness[0]) return false;
    }
    return true;
}

double average_fitness(const Population& pop) {
    double sum = 0.0;
    for (double f : pop.fitness) sum += f;
    return sum / double(pop.size());
}

RunResult finish(const Problem& problem, const EvaluationBudget& budget,
                 GlobalBestRecorder&& rec, std::optional<Genotype> fallback,
                 std::optional<long long> ffe_to_optimum) {
    RunResult result;
    result.trace = std::move(rec.trace);
    result.ffe_used = budget.ffe_used;
    result.ffe_to_optimum = ffe_to_optimum;
    if (rec.has_best) {
        result.best = std::move(rec.best);
        result.best_raw = rec.best_raw;
        result.evaluated = true;
    } else if (fallback) {
        result.best = std::move(*fallback);
        result.best_raw = std::numeric_limits<double>::quiet_NaN();
        result.evaluated = false;
    } else {
        result.best = Genotype{{}, problem.alphabet()};
        result.best_raw = std::numeric_limits<double>::quiet_NaN();
        result.evaluated = false;
    }
    return result;
}

}  // namespace

RunResult ltgomea_run(const Problem& problem, EvaluationBudget budget, uint64_t seed,
                      const LtGomeaOptions& options) {
    const int n = problem.length();
    if (!problem.alphabet()->is_binary()) {
        throw std::invalid_argument("ltgomea requires a binary problem");
    }
    GlobalBestRecorder rec(problem);
    EvalEnv env(problem, budget, &rec);
    Rng master(seed);
    std::optional<Genotype> fallback;
    std::optional<long long> ffe_to_optimum;

    std::vector<PopState> pops;
    linkage::DependencyLedger ledger(std::max(n, 2));

    auto create_population = [&](int index) {
        PopState state;
        state.rng = Rng(master());
        const int size = options.base_population << index;
        state.pop.members.reserve(size);
        state.pop.fitness.reserve(size);
        for (int m = 0; m < size; ++m) {
            Genotype x = random_genotype(problem.alphabet(), state.rng);
            if (!fallback) fallback = x;
            double fx = env.eval(x);
            fihc(x, fx, env, state.rng);
            state.pop.members.push_back(std::move(x));
            state.pop.fitness.push_back(fx);
        }
        pops.push_back(std::move(state));
    };

    auto build_dsm = [&](PopState& state) {
        if (options.dsm_override) return options.dsm_override(state.pop, env, state.rng);
        if (options.backend == LinkageBackend::sll) {
            return linkage::mutual_information_dsm(state.pop.members);
        }
        // DLED: probe the population best plus up to 3 random members, with a
        // per-generation cap of 2n checks.
        std::vector<Genotype> probes;
        size_t best_idx = 0;
        for (size_t m = 1; m < state.pop.size(); ++m) {
            if (improves(state.pop.fitness[m], state.pop.fitness[best_idx], env.tol)) best_idx = m;
        }
        probes.push_back(state.pop.members[best_idx]);
        std::uniform_int_distribution<size_t> pick(0, state.pop.size() - 1);
        for (int i = 0; i < 3; ++i) probes.push_back(state.pop.members[pick(state.rng)]);
        return linkage::dled_dsm(ledger, probes, problem, budget, 2LL * n);
    };

    auto run_generation = [&](int index, long long tick) {
        PopState& state = pops[index];
        if (!state.alive) return;
        if (all_members_identical(state.pop)) {
            state.alive = false;
            return;
        }
        const double avg = average_fitness(state.pop);
        for (size_t j = index + 1; j < pops.size(); ++j) {
            if (pops[j].alive && avg < average_fitness(pops[j].pop)) {
                state.alive = false;
                return;
            }
        }
        linkage::DependencyMatrix dsm = build_dsm(state);
        linkage::LinkageTree tree = linkage::build_linkage_tree(dsm, state.rng);
        const bool force_all =
            double(state.stagnant_generations) > std::log10(double(state.pop.size()));
        gom_generation(state.pop, tree, env, state.rng, force_all);
        double best_now = state.pop.fitness[0];
        for (double f : state.pop.fitness) best_now = std::max(best_now, f);
        if (improves(best_now, state.best_seen, env.tol)) {
            state.best_seen = best_now;
            state.stagnant_generations = 0;
        } else {
            ++state.stagnant_generations;
        }
        ++state.generations;
        if (options.schedule_log) {
            options.schedule_log->push_back(ScheduleEvent{
                tick, index, static_cast<int>(state.pop.size()), state.generations,
                budget.ffe_used});
        }
    };

    try {
        for (long long tick = 0;; ++tick) {
            // Population i runs whenever ratio^i divides tick+1; larger
            // populations are created lazily at their first scheduled tick.
            long long period = 1;
            for (int i = 0;; ++i) {
                if ((tick + 1) % period != 0) break;
                if (i == static_cast<int>(pops.size())) create_population(i);
                run_generation(i, tick);
                if (period > (tick + 1) / options.generation_ratio) break;
                period *= options.generation_ratio;
            }
            // With every population terminated, jump to the tick that starts
            // the next larger one instead of spinning through empty ticks.
            bool any_alive = false;
            for (const PopState& state : pops) any_alive = any_alive || state.alive;
            if (!any_alive) {
                long long next = 1;
                for (size_t i = 0; i < pops.size(); ++i) {
                    if (next > (1LL << 60) / options.generation_ratio) throw BudgetExhausted();
                    next *= options.generation_ratio;
                }
                if (tick + 1 < next) tick = next - 2;
            }
        }
    } catch (const BudgetExhausted&) {
    } catch (const OptimumFound&) {
        ffe_to_optimum = budget.ffe_used;
    }
    return finish(problem, budget, std::move(rec), std::move(fallback), ffe_to_optimum);
}

// ---------------------------------------------------------------------------
// ILS-SLL
// ---------------------------------------------------------------------------

IlsResult ils_sll_run(const Problem& problem, EvaluationBudget budget, uint64_t seed,
                      const IlsOptions& options) {
    const int n = problem.length();
    const bool binary = problem.alphabet()->is_binary();
    const double tol = problem.tolerance();

    GlobalBestRecorder rec(problem);
    EvalEnv env(problem, budget, &rec);
    Rng rng(seed);

    Genotype x = random_genotype(problem.alphabet(), rng);
    double fx = std::numeric_limits<double>::quiet_NaN();
    bool evaluated = false;
    std::optional<long long> ffe_to_optimum;

    std::deque<Genotype> archive;
    std::optional<linkage::PairFrequencies> freqs;
    if (binary && n >= 2) freqs.emplace(n);

    auto push_archive = [&](const Genotype& opt_out) {
        archive.push_back(opt_out);
        if (freqs) freqs->add(opt_out);
        if (archive.size() > options.archive_cap) {
            if (freqs) freqs->remove(archive.front());
            archive.pop_front();
        }
    };

    try {
        fx = env.eval(x);
        evaluated = true;
        fihc(x, fx, env, rng);
        push_archive(x);

        std::uniform_int_distribution<int> coin(0, 1);
        long long stale_iterations = 0;
        while (n > 0) {
            if (stale_iterations >= options.restart_patience) {
                x = random_genotype(problem.alphabet(), rng);
                fx = env.eval(x);
                fihc(x, fx, env, rng);
                push_archive(x);
                stale_iterations = 0;
            }
            Genotype cand = x;
            if (binary && archive.size() >= 2) {
                linkage::DependencyMatrix dsm = freqs->mutual_information();
                linkage::LinkageTree tree = linkage::build_linkage_tree(dsm, rng);
                const std::vector<int> masks = linkage::perturbation_cluster_indices(tree);
                std::uniform_int_distribution<size_t> pick(0, masks.size() - 1);
                for (int i : tree.clusters[masks[pick(rng)]]) cand.genes[i] = coin(rng);
            } else if (binary) {
                std::uniform_int_distribution<int> gene(0, n - 1);
                const int g = gene(rng);
                cand.genes[g] ^= 1;
            } else {
                // Mask-free kick for multi-valued genes: usually a fine
                // 1..3-gene re-randomization, occasionally a half-genotype
                // reseed so stalled incumbents can still be displaced.
                std::uniform_real_distribution<double> reseed(0.0, 1.0);
                int kick;
                if (reseed(rng) < 0.15) {
                    kick = std::max(2, n / 2);
                } else {
                    std::uniform_int_distribution<int> size_dist(1, 3);
                    kick = size_dist(rng);
                }
                kick = std::min(kick, n);
                std::vector<int> idx(n);
                std::iota(idx.begin(), idx.end(), 0);
                for (int j = 0; j < kick; ++j) {
                    std::uniform_int_distribution<int> rest(j, n - 1);
                    std::swap(idx[j], idx[rest(rng)]);
                    const int pos = idx[j];
                    std::uniform_int_distribution<int32_t> allele(
                        0, cand.alphabet->cardinality(pos) - 1);
                    cand.genes[pos] = allele(rng);
                }
            }
            double fc = env.eval(cand);
            fihc(cand, fc, env, rng);
            push_archive(cand);
            if (improves(fc, fx, tol)) {
                x = std::move(cand);
                fx = fc;
                stale_iterations = 0;
            } else {
                ++stale_iterations;
            }
        }
    } catch (const BudgetExhausted&) {
    } catch (const OptimumFound&) {
        ffe_to_optimum = budget.ffe_used;
    }

    IlsResult result;
    if (rec.has_best) {
        result.best = rec.best;
        result.best_raw = rec.best_raw;
        result.evaluated = true;
    } else {
        result.best = std::move(x);
        result.best_raw = fx;
        result.evaluated = evaluated;
    }
    result.trace = std::move(rec.trace);
    result.ffe_used = budget.ffe_used;
    result.ffe_to_optimum = ffe_to_optimum;
    result.improving_mods = hops::trace_modifications(result.trace);
    return result;
}

// ---------------------------------------------------------------------------
// FIHC with random restarts
// ---------------------------------------------------------------------------

RunResult fihc_restart_run(const Problem& problem, EvaluationBudget budget, uint64_t seed) {
    GlobalBestRecorder rec(problem);
    EvalEnv env(problem, budget, &rec);
    Rng rng(seed);
    std::optional<Genotype> fallback;
    std::optional<long long> ffe_to_optimum;
    try {
        while (true) {
            Genotype x = random_genotype(problem.alphabet(), rng);
            if (!fallback) fallback = x;
            double fx = env.eval(x);
            fihc(x, fx, env, rng);
            if (problem.length() == 0) break;
        }
    } catch (const BudgetExhausted&) {
    } catch (const OptimumFound&) {
        ffe_to_optimum = budget.ffe_used;
    }
    return finish(problem, budget, std::move(rec), std::move(fallback), ffe_to_optimum);
}

}  // namespace lbp::opt
