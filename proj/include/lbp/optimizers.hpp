#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lbp/core.hpp"
#include "lbp/hops.hpp"
#include "lbp/linkage.hpp"

namespace lbp::opt {

struct Population {
    std::vector<Genotype> members;
    std::vector<double> fitness;

    size_t size() const { return members.size(); }
};

/// Tracks the run-global best and appends every strict improvement of it to
/// the trace.
struct GlobalBestRecorder {
    explicit GlobalBestRecorder(const Problem& problem);

    void observe(const Genotype& x, double fitness_raw, long long ffe);

    ImprovementTrace trace;
    Genotype best;
    double best_raw;
    bool has_best = false;
    double tol;
};

/// Budget-charging evaluation used by all optimizers. Throws BudgetExhausted
/// before evaluating once the budget is spent, and OptimumFound (internal)
/// right after an evaluation reaches the problem's known optimum.
class EvalEnv {
public:
    EvalEnv(const Problem& problem, EvaluationBudget& budget,
            GlobalBestRecorder* recorder = nullptr);

    double eval(const Genotype& x);

    const Problem& problem;
    EvaluationBudget& budget;
    double tol;
    std::optional<double> optimum;
    GlobalBestRecorder* recorder;
};

/// First-improvement hillclimber: sweeps genes in a fresh random permutation,
/// trying alternative alleles in random order and accepting the first strict
/// improvement, until a full sweep brings none. x/fx are updated in place;
/// on budget exhaustion the best-so-far state is kept and the exception
/// propagates to the run loop.
void fihc(Genotype& x, double& fx, EvalEnv& env, Rng& rng);

/// Masked donor copy kept iff fitness has not decreased. Costs one FFE only
/// when the masked genes actually differ. Returns true when the copy was kept.
bool optimal_mixing(Genotype& source, double& source_fitness, const Genotype& donor,
                    std::span<const int> mask, EvalEnv& env);

/// One gene-pool optimal-mixing generation: every member acts as source, the
/// mixing clusters are traversed in random per-member order, and donors are
/// drawn uniformly from the generation-start population snapshot. Members the
/// pass left unchanged (or every member, when forced) additionally mix
/// against the population best under strict-improvement acceptance.
void gom_generation(Population& pop, const linkage::LinkageTree& tree, EvalEnv& env, Rng& rng,
                    bool force_improvement_all = false);

enum class LinkageBackend { sll, dled };

struct ScheduleEvent {
    long long tick;
    int pop_index;
    int pop_size;
    long long generation;
    long long ffe_used;  // budget position right after the generation
};

using DsmProvider =
    std::function<linkage::DependencyMatrix(const Population&, EvalEnv&, Rng&)>;

struct LtGomeaOptions {
    LinkageBackend backend = LinkageBackend::sll;
    int base_population = 16;
    int generation_ratio = 4;
    std::vector<ScheduleEvent>* schedule_log = nullptr;
    DsmProvider dsm_override;  // test seam: replaces the backend's DSM build
};

struct RunResult {
    Genotype best;
    double best_raw = 0.0;
    bool evaluated = false;  // false only for zero-evaluation budgets
    ImprovementTrace trace;
    long long ffe_used = 0;
    std::optional<long long> ffe_to_optimum;
};

/// Parameter-less LT-GOMEA: interleaved multistart over doubling population
/// sizes (one generation of size 2^{i+1}*base per generation_ratio
/// generations of size 2^i*base), FIHC-initialized members, linkage rebuilt
/// from the population every generation.
RunResult ltgomea_run(const Problem& problem, EvaluationBudget budget, uint64_t seed,
                      const LtGomeaOptions& options = {});

struct IlsOptions {
    size_t archive_cap = 4096;
    // Iterations without an accepted improvement before the chain restarts
    // from a fresh random local optimum (the global best keeps the trace).
    long long restart_patience = 50;
};

struct IlsResult : RunResult {
    std::vector<hops::Modification> improving_mods;
};

/// Iterated local search with statistical linkage: FIHC local optima feed a
/// FIFO archive; each iteration perturbs the incumbent on one linkage-tree
/// cluster (uniformly random alleles), re-optimizes with FIHC and keeps the
/// result only when fitness strictly improved. Non-binary problems fall back
/// to a mask-free random-subset perturbation.
IlsResult ils_sll_run(const Problem& problem, EvaluationBudget budget, uint64_t seed,
                      const IlsOptions& options = {});

/// Random restarts of FIHC keeping the global best.
RunResult fihc_restart_run(const Problem& problem, EvaluationBudget budget, uint64_t seed);

}  // namespace lbp::opt
