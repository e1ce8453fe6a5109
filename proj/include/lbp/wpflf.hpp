#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lbp/core.hpp"

namespace lbp::flow {

struct Arc {
    int origin = -1;
    int dest = -1;
    double capacity = 0.0;

    bool operator==(const Arc&) const = default;
};

/// A volume to ship between two nodes plus its admissible simple routes,
/// each a sequence of arc indices. Endpoints are implied by the routes.
struct Demand {
    double volume = 0.0;
    std::vector<std::vector<int>> routes;

    bool operator==(const Demand&) const = default;
};

class NetworkInstance {
public:
    NetworkInstance() = default;
    NetworkInstance(int node_count, std::vector<Arc> arcs, std::vector<Demand> demands);

    int node_count() const { return node_count_; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    const std::vector<Demand>& demands() const { return demands_; }
    double total_volume() const { return total_volume_; }

    /// Endpoints derived from the demand's first route.
    int demand_source(int p) const { return demand_src_[p]; }
    int demand_dest(int p) const { return demand_dst_[p]; }

    const std::vector<int>& out_arcs(int v) const { return out_arcs_[v]; }
    const std::vector<int>& in_arcs(int v) const { return in_arcs_[v]; }

    bool operator==(const NetworkInstance& other) const {
        return node_count_ == other.node_count_ && arcs_ == other.arcs_ &&
               demands_ == other.demands_;
    }

private:
    void validate_and_index();

    int node_count_ = 0;
    std::vector<Arc> arcs_;
    std::vector<Demand> demands_;
    std::vector<std::vector<int>> out_arcs_, in_arcs_;
    std::vector<int> demand_src_, demand_dst_;
    double total_volume_ = 0.0;
};

using FlowVector = std::vector<double>;

std::shared_ptr<const Alphabet> solution_alphabet(const NetworkInstance& inst);

/// Per-arc flow of one route choice: f_a sums the volumes of all demands
/// whose chosen route uses arc a.
FlowVector flow_from_solution(const NetworkInstance& inst, const Genotype& sol);

/// Capacity constraint f_a <= c_a on every arc (non-strict).
bool is_feasible(const NetworkInstance& inst, const FlowVector& f);

/// Flow lost at arc b's origin when b fails and the sibling outgoing arcs
/// lack the residual capacity to reroute it.
double la_out(const NetworkInstance& inst, const FlowVector& f, int arc);

/// Survivability objective: per-node halved sum of lost incoming and
/// outgoing flow over all single-link failures.
double lfl(const NetworkInstance& inst, const FlowVector& f);

/// Minimization objective with infeasible solutions pushed above every
/// feasible one: LFL when feasible, else 2*sum(volumes) + total overflow.
double wpflf_objective(const NetworkInstance& inst, const Genotype& sol);

class WpLflProblem : public Problem {
public:
    explicit WpLflProblem(NetworkInstance inst, std::string label = "wpflf");

    int length() const override { return static_cast<int>(inst_.demands().size()); }
    std::shared_ptr<const Alphabet> alphabet() const override { return alphabet_; }
    double evaluate_raw(const Genotype& x) const override { return -wpflf_objective(inst_, x); }
    Orientation orientation() const override { return Orientation::minimize; }
    double tolerance() const override { return 1e-9; }
    std::string id() const override;

    const NetworkInstance& instance() const { return inst_; }

private:
    NetworkInstance inst_;
    std::string label_;
    std::shared_ptr<const Alphabet> alphabet_;
};

// ---------------------------------------------------------------------------
// Instance generation
// ---------------------------------------------------------------------------

/// Group A: one demand per ordered node pair, uniform volumes and capacities.
/// Group B: random demands, uniform capacities. Group C: random demands and
/// per-arc capacities that differ: each arc is sized at capacity_factor times
/// its load under a spread reference assignment (demand p on route p mod k),
/// jittered within [capacity_low, capacity_high]; arcs the reference leaves
/// unused get spare_capacity of the mean loaded arc. This keeps the whole
/// network uniformly stressed, which is what gives the survivability
/// objective its staged, hop-like improvement structure.
struct GenParams {
    char group = 'C';
    int nodes = 36;
    int arcs = 144;        // ignored for grid topologies
    int demands = 100;     // ignored for group A
    int routes = 4;
    uint64_t seed = 1;
    bool grid = false;
    int min_hop_distance = 0;  // B/C: reject endpoint pairs closer than this

    double uniform_volume = 5.0;     // group A
    double volume_min = 1.0;         // groups B/C (real-valued volumes)
    double volume_max = 10.0;
    double capacity_factor = 1.2;    // capacity vs. reference load (A/B: vs. peak)
    double capacity_low = 0.75;      // group C jitter band around the sized capacity
    double capacity_high = 1.25;
    double spare_capacity = 0.4;     // group C share of mean load on unused arcs

    static GenParams mini_c(uint64_t seed);   // 12 nodes (grid), 60 demands, 4 routes
    static GenParams paper36(char group, uint64_t seed);
};

NetworkInstance generate_instance(const GenParams& params);

/// Up to k shortest loopless arc paths from src to dst ordered by hop count,
/// ties by lexicographically smallest arc-index sequence.
std::vector<std::vector<int>> k_shortest_paths(const NetworkInstance& inst, int src, int dst,
                                               int k);

// ---------------------------------------------------------------------------
// Text format: "nodes N" / "arc id origin dest capacity" /
// "demand id volume" / "route demand-id route-id arc..."; '#' comments.
// ---------------------------------------------------------------------------

NetworkInstance parse_instance(std::istream& in);
void serialize_instance(std::ostream& out, const NetworkInstance& inst);
NetworkInstance load_instance(const std::string& path);
void save_instance(const std::string& path, const NetworkInstance& inst);

}  // namespace lbp::flow
