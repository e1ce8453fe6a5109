#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "lbp/benchmarks.hpp"
#include "lbp/linkage.hpp"

using namespace lbp;
using namespace lbp::linkage;

namespace {

Genotype bits(const std::string& s) {
    Genotype x;
    for (char c : s) {
        if (c == '0' || c == '1') x.genes.push_back(c - '0');
    }
    x.alphabet = Alphabet::binary(static_cast<int>(x.genes.size()));
    return x;
}

std::vector<Genotype> population(const std::vector<std::string>& rows) {
    std::vector<Genotype> pop;
    for (const auto& row : rows) pop.push_back(bits(row));
    return pop;
}

void for_all_binary(int n, const std::function<void(const Genotype&)>& fn) {
    auto alphabet = Alphabet::binary(n);
    Genotype x{std::vector<int32_t>(n, 0), alphabet};
    for (uint32_t v = 0; v < (1u << n); ++v) {
        for (int i = 0; i < n; ++i) x.genes[i] = (v >> i) & 1;
        fn(x);
    }
}

/// Textbook greedy merging used to cross-check the cached implementation.
LinkageTree naive_greedy_tree(const DependencyMatrix& dsm) {
    const int n = dsm.n;
    LinkageTree tree;
    tree.n = n;
    for (int i = 0; i < n; ++i) tree.clusters.push_back({i});
    std::vector<int> active(n);
    std::iota(active.begin(), active.end(), 0);
    while (active.size() > 1) {
        double best = -1.0;
        std::pair<int, int> best_key{-1, -1};
        size_t bi = 0, bj = 1;
        for (size_t i = 0; i < active.size(); ++i) {
            for (size_t j = i + 1; j < active.size(); ++j) {
                const auto& a = tree.clusters[active[i]];
                const auto& b = tree.clusters[active[j]];
                double sum = 0.0;
                for (int g : a)
                    for (int h : b) sum += dsm.at(g, h);
                const double avg = sum / (double(a.size()) * double(b.size()));
                std::pair<int, int> key{std::min(a.front(), b.front()),
                                        std::max(a.front(), b.front())};
                if (avg > best || (avg == best && key < best_key)) {
                    best = avg;
                    best_key = key;
                    bi = i;
                    bj = j;
                }
            }
        }
        std::vector<int> merged;
        const auto& a = tree.clusters[active[bi]];
        const auto& b = tree.clusters[active[bj]];
        std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(merged));
        tree.merge_children.push_back({active[bi], active[bj]});
        tree.clusters.push_back(std::move(merged));
        active[bi] = static_cast<int>(tree.clusters.size()) - 1;
        active.erase(active.begin() + bj);
    }
    return tree;
}

void check_tree_invariants(const LinkageTree& tree) {
    REQUIRE(tree.clusters.size() == 2 * size_t(tree.n) - 1);
    for (int i = 0; i < tree.n; ++i) {
        REQUIRE(tree.clusters[i] == std::vector<int>{i});
    }
    for (size_t m = 0; m < tree.merge_children.size(); ++m) {
        const auto [a, b] = tree.merge_children[m];
        const auto& parent = tree.clusters[tree.n + m];
        std::set<int> expect(tree.clusters[a].begin(), tree.clusters[a].end());
        for (int g : tree.clusters[b]) REQUIRE(expect.insert(g).second);  // disjoint children
        REQUIRE(std::vector<int>(expect.begin(), expect.end()) == parent);
    }
    std::vector<int> root(tree.n);
    std::iota(root.begin(), root.end(), 0);
    REQUIRE(tree.clusters.back() == root);
}

}  // namespace

TEST_CASE("mutual information of perfectly correlated and independent genes") {
    // Gene pairs always equal, both alleles at frequency 1/2 -> 1 bit.
    const auto mirrored = population({"00", "11", "00", "11"});
    const auto dsm = mutual_information_dsm(mirrored);
    CHECK(dsm.at(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dsm.at(0, 0) == 0.0);

    // All four combinations equally often -> exactly zero.
    const auto uniform = population({"00", "01", "10", "11"});
    CHECK(mutual_information_dsm(uniform).at(0, 1) == 0.0);

    // Finite samples of independent genes stay non-negative.
    Rng rng(5);
    std::vector<Genotype> sample;
    for (int i = 0; i < 40; ++i) sample.push_back(random_genotype(Alphabet::binary(6), rng));
    const auto rnd = mutual_information_dsm(sample);
    for (int g = 0; g < 6; ++g) {
        for (int h = 0; h < 6; ++h) {
            CHECK(rnd.at(g, h) >= 0.0);
            CHECK(rnd.at(g, h) == rnd.at(h, g));
            CHECK(std::isfinite(rnd.at(g, h)));
        }
    }
    CHECK_THROWS_AS(mutual_information_dsm(std::vector<Genotype>{}), std::invalid_argument);
}

TEST_CASE("parallel DSM equals the serial reference bit for bit") {
    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Genotype> pop;
        const int n = 3 + static_cast<int>(rng() % 30);
        const int size = 2 + static_cast<int>(rng() % 60);
        for (int i = 0; i < size; ++i) pop.push_back(random_genotype(Alphabet::binary(n), rng));
        const auto parallel = mutual_information_dsm(pop);
        const auto serial = mutual_information_dsm_serial(pop);
        REQUIRE(parallel.values.size() == serial.values.size());
        for (size_t i = 0; i < parallel.values.size(); ++i) {
            CHECK(parallel.values[i] == serial.values[i]);
        }
    }
}

TEST_CASE("incremental pair frequencies match a fresh count") {
    Rng rng(23);
    PairFrequencies freqs(8);
    std::vector<Genotype> window;
    std::vector<Genotype> all;
    for (int step = 0; step < 50; ++step) {
        Genotype x = random_genotype(Alphabet::binary(8), rng);
        freqs.add(x);
        window.push_back(x);
        if (window.size() > 16) {
            freqs.remove(window.front());
            window.erase(window.begin());
        }
        const auto inc = freqs.mutual_information();
        const auto ref = mutual_information_dsm_serial(window);
        for (size_t i = 0; i < inc.values.size(); ++i) CHECK(inc.values[i] == ref.values[i]);
    }
    (void)all;
}

TEST_CASE("tree shape on forced and degenerate inputs") {
    Rng rng(1);
    DependencyMatrix pairwise(2);
    pairwise.set(0, 1, 0.5);
    const auto two = build_linkage_tree(pairwise, rng);
    REQUIRE(two.clusters.size() == 3);
    CHECK(two.clusters[2] == std::vector<int>{0, 1});

    const auto zero = build_linkage_tree(DependencyMatrix(6), rng);
    check_tree_invariants(zero);

    const auto single = build_linkage_tree(DependencyMatrix(1), rng);
    CHECK(single.clusters.size() == 1);
    CHECK(mixing_cluster_indices(single) == std::vector<int>{0});
}

TEST_CASE("block-diagonal strengths merge blocks before anything else") {
    DependencyMatrix dsm(6);
    for (int g = 0; g < 3; ++g)
        for (int h = 0; h < 3; ++h)
            if (g != h) dsm.set(g, h, 1.0);
    for (int g = 3; g < 6; ++g)
        for (int h = 3; h < 6; ++h)
            if (g != h) dsm.set(g, h, 1.0);
    Rng rng(2);
    const auto tree = build_linkage_tree(dsm, rng);
    check_tree_invariants(tree);

    // The first four merges stay inside one block each.
    for (int m = 0; m < 4; ++m) {
        const auto& cluster = tree.clusters[6 + m];
        const bool low = std::all_of(cluster.begin(), cluster.end(), [](int g) { return g < 3; });
        const bool high = std::all_of(cluster.begin(), cluster.end(), [](int g) { return g >= 3; });
        CHECK((low || high));
    }
}

TEST_CASE("cached greedy merging matches the naive greedy reference") {
    Rng rng(97);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 11);
        DependencyMatrix dsm(n);
        // Dyadic strengths keep folded sums exact, so ties are exact too.
        std::uniform_int_distribution<int> quarters(0, 8);
        for (int g = 0; g < n; ++g) {
            for (int h = g + 1; h < n; ++h) dsm.set(g, h, quarters(rng) / 8.0);
        }
        Rng tree_rng(0);
        const auto fast = build_linkage_tree(dsm, tree_rng);
        const auto naive = naive_greedy_tree(dsm);
        REQUIRE(fast.clusters.size() == naive.clusters.size());
        for (size_t i = 0; i < fast.clusters.size(); ++i) {
            CHECK(fast.clusters[i] == naive.clusters[i]);
        }
        check_tree_invariants(fast);
    }
}

TEST_CASE("cluster selections for mixing and perturbation") {
    DependencyMatrix dsm(4);
    dsm.set(0, 1, 1.0);
    dsm.set(2, 3, 0.75);
    Rng rng(3);
    const auto tree = build_linkage_tree(dsm, rng);
    const auto mixing = mixing_cluster_indices(tree);
    CHECK(mixing.size() == tree.clusters.size() - 1);
    CHECK(std::find(mixing.begin(), mixing.end(), tree.root_index()) == mixing.end());

    const auto perturb = perturbation_cluster_indices(tree);
    for (int c : perturb) {
        CHECK(c != tree.root_index());
        CHECK(tree.clusters[c].size() >= 2);
    }

    DependencyMatrix two(2);
    Rng rng2(4);
    const auto tiny = build_linkage_tree(two, rng2);
    const auto fallback = perturbation_cluster_indices(tiny);
    REQUIRE(fallback.size() == 2);  // singletons only
    CHECK(tiny.clusters[fallback[0]].size() == 1);
}

TEST_CASE("dependency test on separable and coupled functions") {
    // Additively separable: never detected, over every probe.
    bench::OneMaxProblem onemax(4);
    EvaluationBudget budget;
    for_all_binary(4, [&](const Genotype& x) {
        CHECK(dled_check(x, 0, 2, onemax, budget) == DledOutcome::not_detected);
    });

    // Two genes of one bimodal block: some probe witnesses the dependency.
    bench::ConcatProblem trap(bench::ConcatSpec{4, 4, 0, false,
                                                bench::Subfunction::bimodal_trap, 1});
    bool witnessed = false;
    for_all_binary(4, [&](const Genotype& x) {
        if (dled_check(x, 0, 1, trap, budget) == DledOutcome::dependent) witnessed = true;
    });
    CHECK(witnessed);

    // Cross-block pairs of a disjoint concatenation: never detected.
    bench::ConcatProblem two_blocks(bench::ConcatSpec{8, 4, 0, false,
                                                      bench::Subfunction::bimodal_trap, 1});
    for_all_binary(8, [&](const Genotype& x) {
        CHECK(dled_check(x, 1, 5, two_blocks, budget) == DledOutcome::not_detected);
    });
}

TEST_CASE("dependency test is symmetric in its gene arguments") {
    bench::ConcatProblem problem(bench::ConcatSpec{10, 4, 1, false,
                                                   bench::Subfunction::bimodal_trap, 1});
    Rng rng(31);
    EvaluationBudget budget;
    for (int trial = 0; trial < 300; ++trial) {
        const Genotype x = random_genotype(Alphabet::binary(10), rng);
        const int g = static_cast<int>(rng() % 10);
        int h = static_cast<int>(rng() % 10);
        if (h == g) h = (h + 1) % 10;
        CHECK(dled_check(x, g, h, problem, budget) == dled_check(x, h, g, problem, budget));
    }
}

TEST_CASE("budget-bounded probing fills the ledger monotonically") {
    bench::ConcatProblem problem(bench::ConcatSpec{8, 4, 0, false,
                                                   bench::Subfunction::bimodal_trap, 1});
    DependencyLedger ledger(8);
    std::vector<Genotype> probes;
    for_all_binary(8, [&](const Genotype& x) { probes.push_back(x); });

    EvaluationBudget budget;
    const auto dsm = dled_dsm(ledger, probes, problem, budget);
    for (int g = 0; g < 8; ++g) {
        for (int h = g + 1; h < 8; ++h) {
            const bool same_block = (g < 4) == (h < 4);
            CHECK(dsm.at(g, h) == (same_block ? 1.0 : 0.0));
        }
    }

    // A second call never clears a verified pair.
    const long long before = ledger.verified_count();
    const auto again = dled_dsm(ledger, probes, problem, budget);
    CHECK(ledger.verified_count() == before);
    for (size_t i = 0; i < dsm.values.size(); ++i) CHECK(again.values[i] >= dsm.values[i]);
}

TEST_CASE("constant fitness yields an empty ledger") {
    class ConstantProblem : public Problem {
    public:
        int length() const override { return 6; }
        std::shared_ptr<const Alphabet> alphabet() const override { return alpha_; }
        double evaluate_raw(const Genotype&) const override { return 3.0; }
        std::string id() const override { return "constant"; }

    private:
        std::shared_ptr<const Alphabet> alpha_ = Alphabet::binary(6);
    };
    ConstantProblem problem;
    DependencyLedger ledger(6);
    Rng rng(9);
    std::vector<Genotype> probes;
    for (int i = 0; i < 8; ++i) probes.push_back(random_genotype(Alphabet::binary(6), rng));
    EvaluationBudget budget;
    const auto dsm = dled_dsm(ledger, probes, problem, budget);
    for (double v : dsm.values) CHECK(v == 0.0);
    CHECK(ledger.verified_count() == 0);
    CHECK(ledger.checks_done > 0);
}

TEST_CASE("partial ledger is returned when the budget runs dry") {
    bench::ConcatProblem problem(bench::ConcatSpec{8, 4, 0, false,
                                                   bench::Subfunction::bimodal_trap, 1});
    DependencyLedger ledger(8);
    Rng rng(21);
    std::vector<Genotype> probes;
    for (int i = 0; i < 6; ++i) probes.push_back(random_genotype(Alphabet::binary(8), rng));
    EvaluationBudget budget;
    budget.ffe_limit = 17;
    const auto dsm = dled_dsm(ledger, probes, problem, budget);
    CHECK(budget.ffe_used <= 17);
    (void)dsm;
}

TEST_CASE("dumps are well-formed") {
    DependencyMatrix dsm(3);
    dsm.set(0, 1, 0.5);
    std::stringstream ds;
    write_dsm_csv(ds, dsm);
    CHECK(ds.str() == "0,0.5,0\n0.5,0,0\n0,0,0\n");

    Rng rng(5);
    const auto tree = build_linkage_tree(dsm, rng);
    std::stringstream ts;
    write_tree(ts, tree);
    std::string first;
    std::getline(ts, first);
    CHECK(first == "0");
}
