#include "lbp/wpflf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

namespace lbp::flow {

NetworkInstance::NetworkInstance(int node_count, std::vector<Arc> arcs,
                                 std::vector<Demand> demands)
    : node_count_(node_count), arcs_(std::move(arcs)), demands_(std::move(demands)) {
    validate_and_index();
}

void NetworkInstance::validate_and_index() {
    if (node_count_ < 0) throw std::invalid_argument("negative node count");
    out_arcs_.assign(node_count_, {});
    in_arcs_.assign(node_count_, {});
    for (size_t a = 0; a < arcs_.size(); ++a) {
        const Arc& arc = arcs_[a];
        if (arc.origin < 0 || arc.origin >= node_count_ || arc.dest < 0 ||
            arc.dest >= node_count_) {
            throw std::invalid_argument("arc " + std::to_string(a) + " references unknown node");
        }
        if (!(arc.capacity > 0.0)) {
            throw std::invalid_argument("arc " + std::to_string(a) + " needs positive capacity");
        }
        out_arcs_[arc.origin].push_back(static_cast<int>(a));
        in_arcs_[arc.dest].push_back(static_cast<int>(a));
    }
    demand_src_.assign(demands_.size(), -1);
    demand_dst_.assign(demands_.size(), -1);
    total_volume_ = 0.0;
    for (size_t p = 0; p < demands_.size(); ++p) {
        const Demand& d = demands_[p];
        if (d.routes.empty()) {
            throw std::invalid_argument("demand " + std::to_string(p) + " has no candidate route");
        }
        if (!(d.volume > 0.0)) {
            throw std::invalid_argument("demand " + std::to_string(p) + " needs positive volume");
        }
        total_volume_ += d.volume;
        for (size_t r = 0; r < d.routes.size(); ++r) {
            const auto& route = d.routes[r];
            if (route.empty()) {
                throw std::invalid_argument("demand " + std::to_string(p) + " has an empty route");
            }
            std::set<int> visited;
            for (size_t i = 0; i < route.size(); ++i) {
                const int a = route[i];
                if (a < 0 || a >= static_cast<int>(arcs_.size())) {
                    throw std::invalid_argument("demand " + std::to_string(p) +
                                                " route references unknown arc " + std::to_string(a));
                }
                if (i > 0 && arcs_[route[i - 1]].dest != arcs_[a].origin) {
                    throw std::invalid_argument("demand " + std::to_string(p) +
                                                " route is not arc-connected");
                }
                visited.insert(arcs_[a].origin);
            }
            visited.insert(arcs_[route.back()].dest);
            if (visited.size() != route.size() + 1) {
                throw std::invalid_argument("demand " + std::to_string(p) + " route is not simple");
            }
            const int src = arcs_[route.front()].origin;
            const int dst = arcs_[route.back()].dest;
            if (src == dst) {
                throw std::invalid_argument("demand " + std::to_string(p) + " route is a cycle");
            }
            if (r == 0) {
                demand_src_[p] = src;
                demand_dst_[p] = dst;
            } else if (src != demand_src_[p] || dst != demand_dst_[p]) {
                throw std::invalid_argument("demand " + std::to_string(p) +
                                            " routes disagree on endpoints");
            }
        }
    }
}

std::shared_ptr<const Alphabet> solution_alphabet(const NetworkInstance& inst) {
    std::vector<int32_t> sizes;
    sizes.reserve(inst.demands().size());
    for (const Demand& d : inst.demands()) sizes.push_back(static_cast<int32_t>(d.routes.size()));
    return std::make_shared<Alphabet>(std::move(sizes));
}

FlowVector flow_from_solution(const NetworkInstance& inst, const Genotype& sol) {
    if (sol.size() != static_cast<int>(inst.demands().size())) {
        throw std::invalid_argument("solution length does not match demand count");
    }
    FlowVector f(inst.arcs().size(), 0.0);
    for (size_t p = 0; p < inst.demands().size(); ++p) {
        const Demand& d = inst.demands()[p];
        const int32_t r = sol.genes[p];
        if (r < 0 || r >= static_cast<int32_t>(d.routes.size())) {
            throw std::invalid_argument("invalid route index for demand " + std::to_string(p));
        }
        for (int a : d.routes[r]) f[a] += d.volume;
    }
    return f;
}

bool is_feasible(const NetworkInstance& inst, const FlowVector& f) {
    if (f.size() != inst.arcs().size()) throw std::invalid_argument("flow vector size mismatch");
    for (size_t a = 0; a < f.size(); ++a) {
        if (f[a] > inst.arcs()[a].capacity + 1e-9) return false;
    }
    return true;
}

namespace {

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

double la_out(const NetworkInstance& inst, const FlowVector& f, int arc) {
    if (arc < 0 || arc >= static_cast<int>(inst.arcs().size())) {
        throw std::invalid_argument("arc index out of range");
    }
    const int v = inst.arcs()[arc].origin;
    double g_out = 0.0, e_out = 0.0;
    for (int a : inst.out_arcs(v)) {
        g_out += f[a];
        e_out += inst.arcs()[a].capacity;
    }
    return positive_part(g_out - (e_out - inst.arcs()[arc].capacity));
}

double lfl(const NetworkInstance& inst, const FlowVector& f) {
    if (f.size() != inst.arcs().size()) throw std::invalid_argument("flow vector size mismatch");
    const int nodes = inst.node_count();
    std::vector<double> g_out(nodes, 0.0), e_out(nodes, 0.0), g_in(nodes, 0.0), e_in(nodes, 0.0);
    for (size_t a = 0; a < f.size(); ++a) {
        const Arc& arc = inst.arcs()[a];
        g_out[arc.origin] += f[a];
        e_out[arc.origin] += arc.capacity;
        g_in[arc.dest] += f[a];
        e_in[arc.dest] += arc.capacity;
    }
    double total = 0.0;
    for (size_t a = 0; a < f.size(); ++a) {
        const Arc& arc = inst.arcs()[a];
        total += positive_part(g_out[arc.origin] - (e_out[arc.origin] - arc.capacity));
        total += positive_part(g_in[arc.dest] - (e_in[arc.dest] - arc.capacity));
    }
    return total / 2.0;
}

double wpflf_objective(const NetworkInstance& inst, const Genotype& sol) {
    const FlowVector f = flow_from_solution(inst, sol);
    if (!is_feasible(inst, f)) {
        // 2*sum(volumes) bounds every feasible LFL value, so all infeasible
        // solutions rank strictly worse than all feasible ones.
        double overflow = 0.0;
        for (size_t a = 0; a < f.size(); ++a) {
            overflow += positive_part(f[a] - inst.arcs()[a].capacity);
        }
        return 2.0 * inst.total_volume() + overflow;
    }
    return lfl(inst, f);
}

WpLflProblem::WpLflProblem(NetworkInstance inst, std::string label)
    : inst_(std::move(inst)), label_(std::move(label)), alphabet_(solution_alphabet(inst_)) {}

std::string WpLflProblem::id() const {
    return label_ + "-v" + std::to_string(inst_.node_count()) + "-p" +
           std::to_string(inst_.demands().size());
}

// ---------------------------------------------------------------------------
// Route enumeration
// ---------------------------------------------------------------------------

std::vector<std::vector<int>> k_shortest_paths(const NetworkInstance& inst, int src, int dst,
                                               int k) {
    // Best-first enumeration over partial paths ordered by (hop count, arc
    // sequence); complete paths therefore pop in exactly the required order.
    struct Partial {
        std::vector<int> arcs;
        std::vector<uint8_t> visited;
        int end;
    };
    auto order = [](const Partial& a, const Partial& b) {
        if (a.arcs.size() != b.arcs.size()) return a.arcs.size() > b.arcs.size();
        return a.arcs > b.arcs;
    };
    std::priority_queue<Partial, std::vector<Partial>, decltype(order)> queue(order);

    Partial start;
    start.visited.assign(inst.node_count(), 0);
    start.visited[src] = 1;
    start.end = src;
    queue.push(std::move(start));

    std::vector<std::vector<int>> found;
    long long expansions = 0;
    while (!queue.empty() && static_cast<int>(found.size()) < k) {
        Partial cur = queue.top();
        queue.pop();
        if (cur.end == dst) {
            found.push_back(std::move(cur.arcs));
            continue;
        }
        if (++expansions > 2'000'000) {
            throw std::runtime_error("route enumeration exceeded the expansion cap");
        }
        for (int a : inst.out_arcs(cur.end)) {
            const int next = inst.arcs()[a].dest;
            if (cur.visited[next]) continue;
            Partial ext = cur;
            ext.arcs.push_back(a);
            ext.visited[next] = 1;
            ext.end = next;
            queue.push(std::move(ext));
        }
    }
    return found;
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

GenParams GenParams::mini_c(uint64_t seed) {
    GenParams p;
    p.group = 'C';
    p.nodes = 12;
    p.arcs = 36;
    p.demands = 60;
    p.routes = 4;
    p.seed = seed;
    p.grid = true;
    p.min_hop_distance = 3;  // long routes interact; adjacent pairs do not
    p.capacity_low = 0.9;
    p.capacity_high = 1.1;
    return p;
}

GenParams GenParams::paper36(char group, uint64_t seed) {
    GenParams p;
    p.group = group;
    p.nodes = 36;
    p.arcs = 144;
    p.demands = group == 'A' ? 0 : 2500;
    p.routes = 4;
    p.seed = seed;
    return p;
}

namespace {

std::vector<Arc> random_strongly_connected_arcs(int nodes, int arc_count, Rng& rng) {
    if (nodes < 2) throw std::invalid_argument("topology needs at least two nodes");
    if (arc_count < nodes) throw std::invalid_argument("need at least one arc per node");
    const long long max_arcs = static_cast<long long>(nodes) * (nodes - 1);
    if (arc_count > max_arcs) throw std::invalid_argument("too many arcs requested");

    // A random Hamiltonian cycle guarantees strong connectivity; extra arcs
    // are sampled uniformly without duplicates.
    std::vector<int> perm(nodes);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);

    std::set<std::pair<int, int>> used;
    std::vector<Arc> arcs;
    for (int i = 0; i < nodes; ++i) {
        const int u = perm[i], v = perm[(i + 1) % nodes];
        arcs.push_back(Arc{u, v, 1.0});
        used.insert({u, v});
    }
    std::uniform_int_distribution<int> node(0, nodes - 1);
    while (static_cast<int>(arcs.size()) < arc_count) {
        const int u = node(rng), v = node(rng);
        if (u == v || used.count({u, v})) continue;
        arcs.push_back(Arc{u, v, 1.0});
        used.insert({u, v});
    }
    return arcs;
}

std::vector<Arc> grid_arcs(int nodes) {
    int rows = static_cast<int>(std::sqrt(double(nodes)));
    while (rows > 1 && nodes % rows != 0) --rows;
    const int cols = nodes / rows;
    if (rows < 2 || cols < 2) throw std::invalid_argument("grid needs a non-degenerate factorization");
    std::vector<Arc> arcs;
    auto id = [cols](int r, int c) { return r * cols + c; };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) {
                arcs.push_back(Arc{id(r, c), id(r, c + 1), 1.0});
                arcs.push_back(Arc{id(r, c + 1), id(r, c), 1.0});
            }
            if (r + 1 < rows) {
                arcs.push_back(Arc{id(r, c), id(r + 1, c), 1.0});
                arcs.push_back(Arc{id(r + 1, c), id(r, c), 1.0});
            }
        }
    }
    return arcs;
}

}  // namespace

NetworkInstance generate_instance(const GenParams& params) {
    if (params.group != 'A' && params.group != 'B' && params.group != 'C') {
        throw std::invalid_argument("experiment group must be A, B or C");
    }
    Rng rng(params.seed);
    std::vector<Arc> arcs = params.grid ? grid_arcs(params.nodes)
                                        : random_strongly_connected_arcs(params.nodes,
                                                                         params.arcs, rng);

    // Endpoint/volume plan.
    struct Plan {
        int src, dst;
        double volume;
    };
    std::vector<Plan> plan;
    if (params.group == 'A') {
        for (int u = 0; u < params.nodes; ++u) {
            for (int v = 0; v < params.nodes; ++v) {
                if (u != v) plan.push_back(Plan{u, v, params.uniform_volume});
            }
        }
    } else {
        if (params.demands < 1) throw std::invalid_argument("demand count must be >= 1");
        // Unit-hop distances for the endpoint-separation rule.
        std::vector<std::vector<int>> dist;
        if (params.min_hop_distance > 0) {
            NetworkInstance topo(params.nodes, arcs, {});
            dist.assign(params.nodes, std::vector<int>(params.nodes, -1));
            for (int s = 0; s < params.nodes; ++s) {
                std::queue<int> frontier;
                frontier.push(s);
                dist[s][s] = 0;
                while (!frontier.empty()) {
                    const int v = frontier.front();
                    frontier.pop();
                    for (int a : topo.out_arcs(v)) {
                        const int w = topo.arcs()[a].dest;
                        if (dist[s][w] < 0) {
                            dist[s][w] = dist[s][v] + 1;
                            frontier.push(w);
                        }
                    }
                }
            }
        }
        std::uniform_int_distribution<int> node(0, params.nodes - 1);
        std::uniform_real_distribution<double> vol(params.volume_min, params.volume_max);
        for (int p = 0; p < params.demands; ++p) {
            int u, v;
            long long attempts = 0;
            do {
                u = node(rng);
                v = node(rng);
                if (++attempts > 100000) {
                    throw std::invalid_argument("no endpoint pair satisfies the hop separation");
                }
            } while (v == u ||
                     (!dist.empty() && dist[u][v] < params.min_hop_distance));
            plan.push_back(Plan{u, v, vol(rng)});
        }
    }

    // Routes need a capacity-bearing instance object for adjacency only; the
    // placeholder capacities are rewritten below.
    NetworkInstance topo(params.nodes, arcs, {});
    std::vector<Demand> demands;
    demands.reserve(plan.size());
    for (const Plan& p : plan) {
        Demand d;
        d.volume = p.volume;
        d.routes = k_shortest_paths(topo, p.src, p.dst, params.routes);
        if (d.routes.empty()) throw std::runtime_error("generated topology lost connectivity");
        demands.push_back(std::move(d));
    }

    if (params.group == 'C') {
        // Per-arc capacities sized on the loads of a spread reference
        // assignment, so every loaded arc runs close to its natural share.
        NetworkInstance wv(params.nodes, arcs, demands);
        Genotype ref{std::vector<int32_t>(demands.size(), 0), solution_alphabet(wv)};
        for (size_t p = 0; p < demands.size(); ++p) {
            ref.genes[p] = static_cast<int32_t>(p % demands[p].routes.size());
        }
        const FlowVector load = flow_from_solution(wv, ref);
        double mean_loaded = 0.0;
        int loaded = 0;
        for (double l : load) {
            if (l > 0.0) {
                mean_loaded += l;
                ++loaded;
            }
        }
        mean_loaded = loaded ? mean_loaded / loaded : 1.0;
        std::uniform_real_distribution<double> jitter(params.capacity_low, params.capacity_high);
        for (size_t a = 0; a < arcs.size(); ++a) {
            const double base = load[a] > 0.0 ? params.capacity_factor * load[a]
                                              : params.spare_capacity * mean_loaded;
            arcs[a].capacity = std::max(1.0, base * jitter(rng));
        }
    } else {
        // Uniform capacity from the peak load of the all-first-routes solution.
        std::vector<double> load(arcs.size(), 0.0);
        for (const Demand& d : demands) {
            for (int a : d.routes.front()) load[a] += d.volume;
        }
        const double peak = *std::max_element(load.begin(), load.end());
        const double base = std::max(1.0, std::round(params.capacity_factor * peak));
        for (Arc& a : arcs) a.capacity = base;
    }

    return NetworkInstance(params.nodes, std::move(arcs), std::move(demands));
}

// ---------------------------------------------------------------------------
// Text I/O
// ---------------------------------------------------------------------------

NetworkInstance parse_instance(std::istream& in) {
    int node_count = -1;
    std::map<int, std::pair<Arc, size_t>> arcs;                // id -> (arc, line)
    std::map<int, std::pair<double, size_t>> demand_volume;    // id -> (volume, line)
    std::map<int, std::map<int, std::pair<std::vector<int>, size_t>>> routes;

    std::string line;
    size_t lineno = 0;
    auto fail_at = [](size_t at, const std::string& msg) {
        throw std::runtime_error("line " + std::to_string(at) + ": " + msg);
    };
    auto fail = [&](const std::string& msg) { fail_at(lineno, msg); };

    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind)) continue;
        if (kind == "nodes") {
            if (!(ls >> node_count) || node_count < 0) fail("malformed node count");
        } else if (kind == "arc") {
            int id;
            Arc arc;
            if (!(ls >> id >> arc.origin >> arc.dest >> arc.capacity)) fail("malformed arc record");
            if (arcs.count(id)) fail("duplicate arc id " + std::to_string(id));
            arcs[id] = {arc, lineno};
        } else if (kind == "demand") {
            int id;
            double volume;
            if (!(ls >> id >> volume)) fail("malformed demand record");
            if (demand_volume.count(id)) fail("duplicate demand id " + std::to_string(id));
            demand_volume[id] = {volume, lineno};
        } else if (kind == "route") {
            int demand_id, route_id;
            if (!(ls >> demand_id >> route_id)) fail("malformed route record");
            std::vector<int> route;
            int a;
            while (ls >> a) route.push_back(a);
            if (route.empty()) fail("route without arcs");
            if (routes[demand_id].count(route_id)) fail("duplicate route id");
            routes[demand_id][route_id] = {std::move(route), lineno};
        } else {
            fail("unknown record '" + kind + "'");
        }
    }

    if (node_count < 0) fail_at(lineno, "missing 'nodes' record");
    std::vector<Arc> arc_vec(arcs.size());
    for (auto& [id, entry] : arcs) {
        if (id < 0 || id >= static_cast<int>(arc_vec.size())) {
            fail_at(entry.second, "arc ids are not contiguous");
        }
        arc_vec[id] = entry.first;
    }
    std::vector<Demand> demand_vec(demand_volume.size());
    for (auto& [id, entry] : demand_volume) {
        if (id < 0 || id >= static_cast<int>(demand_vec.size())) {
            fail_at(entry.second, "demand ids are not contiguous");
        }
        demand_vec[id].volume = entry.first;
    }
    for (auto& [demand_id, per_route] : routes) {
        for (auto& [route_id, entry] : per_route) {
            if (demand_id < 0 || demand_id >= static_cast<int>(demand_vec.size())) {
                fail_at(entry.second, "route references unknown demand " + std::to_string(demand_id));
            }
            auto& dst = demand_vec[demand_id].routes;
            if (dst.size() < per_route.size()) dst.resize(per_route.size());
            if (route_id < 0 || route_id >= static_cast<int>(dst.size())) {
                fail_at(entry.second,
                        "route ids for demand " + std::to_string(demand_id) + " are not contiguous");
            }
            for (int a : entry.first) {
                if (a < 0 || a >= static_cast<int>(arc_vec.size())) {
                    fail_at(entry.second, "route references unknown arc " + std::to_string(a));
                }
            }
            dst[route_id] = std::move(entry.first);
        }
    }
    try {
        return NetworkInstance(node_count, std::move(arc_vec), std::move(demand_vec));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("instance validation failed: ") + e.what());
    }
}

void serialize_instance(std::ostream& out, const NetworkInstance& inst) {
    out << "# wpflf instance\n";
    out << "nodes " << inst.node_count() << "\n";
    for (size_t a = 0; a < inst.arcs().size(); ++a) {
        const Arc& arc = inst.arcs()[a];
        out << "arc " << a << ' ' << arc.origin << ' ' << arc.dest << ' '
            << format_double(arc.capacity) << "\n";
    }
    for (size_t p = 0; p < inst.demands().size(); ++p) {
        out << "demand " << p << ' ' << format_double(inst.demands()[p].volume) << "\n";
    }
    for (size_t p = 0; p < inst.demands().size(); ++p) {
        const Demand& d = inst.demands()[p];
        for (size_t r = 0; r < d.routes.size(); ++r) {
            out << "route " << p << ' ' << r;
            for (int a : d.routes[r]) out << ' ' << a;
            out << "\n";
        }
    }
}

NetworkInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file: " + path);
    return parse_instance(in);
}

void save_instance(const std::string& path, const NetworkInstance& inst) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write instance file: " + path);
    serialize_instance(out, inst);
}

}  // namespace lbp::flow
