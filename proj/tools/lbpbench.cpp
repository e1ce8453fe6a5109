#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "lbp/experiment.hpp"
#include "lbp/problem_spec.hpp"
#include "lbp/wpflf.hpp"

namespace {

// Seed specs: "7", "1..30" (inclusive) or "1,4,9".
std::vector<uint64_t> parse_seeds(const std::string& text) {
    std::vector<uint64_t> seeds;
    const auto range = text.find("..");
    if (range != std::string::npos) {
        const uint64_t lo = std::stoull(text.substr(0, range));
        const uint64_t hi = std::stoull(text.substr(range + 2));
        if (hi < lo) throw std::invalid_argument("seed range is empty");
        for (uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        return seeds;
    }
    size_t pos = 0;
    while (pos < text.size()) {
        const auto comma = text.find(',', pos);
        const std::string item = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!item.empty()) seeds.push_back(std::stoull(item));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (seeds.empty()) throw std::invalid_argument("no seeds given");
    return seeds;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Leading-blocks / flow-assignment optimization workbench"};
    app.require_subcommand(1);

    // --- run ---------------------------------------------------------------
    auto* run = app.add_subcommand("run", "Run one experiment configuration");
    std::string problem, optimizer, seeds_text, out_dir;
    long long ffe = -1;
    double time_limit = -1.0;
    int threads = 0;
    run->add_option("--problem", problem, "Problem spec string or instance file")->required();
    run->add_option("--optimizer", optimizer,
                    "ltgomea-sll | ltgomea-dled | ils-sll | fihc-restart")
        ->required();
    run->add_option("--ffe", ffe, "FFE limit per run");
    run->add_option("--time", time_limit, "Wall-clock limit per run in seconds");
    run->add_option("--seeds", seeds_text, "Seed list: a..b or comma separated")->required();
    run->add_option("--out", out_dir, "Output directory")->required();
    run->add_option("--threads", threads, "Concurrent runs (0 = OpenMP default)");

    // --- report ------------------------------------------------------------
    auto* report = app.add_subcommand("report", "Aggregate run outputs into a CSV table");
    std::string report_kind, report_in, report_out;
    report->add_option("kind", report_kind, "scalability | applicability | hops")->required();
    report->add_option("--in", report_in, "Directory holding run outputs")->required();
    report->add_option("--out", report_out, "Output CSV path")->required();

    // --- gen-instance ------------------------------------------------------
    auto* gen = app.add_subcommand("gen-instance", "Generate a flow-assignment instance");
    std::string group = "C", gen_out, preset;
    int nodes = 36, arcs = 144, demands = 100, routes = 4;
    uint64_t gen_seed = 1;
    bool grid = false;
    double capfactor = -1.0;
    gen->add_option("--group", group, "Experiment group: A, B or C");
    gen->add_option("--nodes", nodes, "Node count");
    gen->add_option("--arcs", arcs, "Arc count (ignored for --grid)");
    gen->add_option("--demands", demands, "Demand count (ignored for group A)");
    gen->add_option("--routes", routes, "Candidate routes per demand");
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--preset", preset, "mini-c | paper36");
    gen->add_flag("--grid", grid, "Grid topology");
    gen->add_option("--capfactor", capfactor, "Capacity factor vs. default-route peak load");
    gen->add_option("--out", gen_out, "Output instance file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            lbp::exp::ExperimentConfig config;
            config.problem = problem;
            config.optimizer = optimizer;
            if (ffe >= 0) config.ffe_limit = ffe;
            if (time_limit >= 0) config.time_limit_sec = time_limit;
            config.seeds = parse_seeds(seeds_text);
            config.out_dir = out_dir;
            config.threads = threads;
            const auto records = lbp::exp::run_experiment(config);
            std::cout << "completed " << records.size() << " runs under " << out_dir << "\n";
        } else if (*report) {
            const auto runs = lbp::exp::load_records(report_in);
            std::ofstream out(report_out);
            if (!out) throw std::runtime_error("cannot write " + report_out);
            if (report_kind == "scalability") lbp::exp::summarize_scalability(runs, out);
            else if (report_kind == "applicability") lbp::exp::summarize_applicability(runs, out);
            else if (report_kind == "hops") lbp::exp::summarize_hop_stats(runs, report_in, out);
            else throw std::invalid_argument("unknown report kind '" + report_kind + "'");
            std::cout << "wrote " << report_out << "\n";
        } else if (*gen) {
            lbp::flow::GenParams params;
            if (preset == "mini-c") params = lbp::flow::GenParams::mini_c(gen_seed);
            else if (preset == "paper36") params = lbp::flow::GenParams::paper36(group[0], gen_seed);
            else if (!preset.empty()) throw std::invalid_argument("unknown preset '" + preset + "'");
            if (preset.empty()) {
                params.nodes = nodes;
                params.arcs = arcs;
                params.demands = demands;
                params.routes = routes;
            }
            if (group.size() != 1) throw std::invalid_argument("group must be A, B or C");
            params.group = group[0];
            params.seed = gen_seed;
            params.grid = grid;
            if (capfactor > 0) params.capacity_factor = capfactor;
            const auto instance = lbp::flow::generate_instance(params);
            lbp::flow::save_instance(gen_out, instance);
            std::cout << "wrote " << gen_out << " (" << instance.node_count() << " nodes, "
                      << instance.arcs().size() << " arcs, " << instance.demands().size()
                      << " demands)\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
