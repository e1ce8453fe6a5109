#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <set>
#include <sstream>

#include "lbp/benchmarks.hpp"
#include "oracles.hpp"

using namespace lbp;
using namespace lbp::bench;

namespace {

// Spaces in the literal are ignored so block boundaries stay readable.
Genotype bits(const std::string& s) {
    Genotype x;
    for (char c : s) {
        if (c == '0' || c == '1') x.genes.push_back(c - '0');
    }
    x.alphabet = Alphabet::binary(static_cast<int>(x.genes.size()));
    return x;
}

Genotype all_ones(int n) { return bits(std::string(n, '1')); }

void for_all_binary(int n, const std::function<void(const Genotype&)>& fn) {
    auto alphabet = Alphabet::binary(n);
    Genotype x{std::vector<int32_t>(n, 0), alphabet};
    for (uint32_t v = 0; v < (1u << n); ++v) {
        for (int i = 0; i < n; ++i) x.genes[i] = (v >> i) & 1;
        fn(x);
    }
}

}  // namespace

TEST_CASE("bimodal trap values") {
    CHECK(bim_trap(1, 4) == 0);
    CHECK(bim_trap(2, 4) == 1);
    CHECK(bim_trap(0, 4) == 2);
    CHECK(bim_trap(4, 4) == 2);
    CHECK(bim_trap(3, 4) == 0);
    for (int u = 0; u <= 10; ++u) CHECK(bim_trap(u, 10) == oracle::bim_trap(u, 10));
    CHECK_THROWS_AS(bim_trap(5, 4), std::out_of_range);
    CHECK_THROWS_AS(bim_trap(1, 3), std::invalid_argument);
}

TEST_CASE("bimodal slope without optima") {
    CHECK(no_opt_bimodal(0, 10) == -1);
    CHECK(no_opt_bimodal(5, 10) == 4);
    CHECK(no_opt_bimodal(10, 10) == -1);
    CHECK_THROWS_AS(no_opt_bimodal(11, 10), std::out_of_range);
}

TEST_CASE("deceptive trap") {
    CHECK(deceptive_trap(8, 8) == 8);
    CHECK(deceptive_trap(0, 8) == 7);
    CHECK(deceptive_trap(7, 8) == 0);
}

TEST_CASE("leading ones lineage") {
    CHECK(leading_ones(all_ones(8)) == 8);
    CHECK(leading_ones(bits("11010000")) == 2);
    CHECK(leading_ones(bits("01111111")) == 0);

    CHECK(block_leading_ones(bits("11111110"), 4) == 1);  // 7 leading ones
    CHECK(block_leading_ones(all_ones(8), 4) == 2);
    CHECK(block_leading_ones(bits("11101111"), 4) == 0);

    CHECK(leading_blocks_royal(all_ones(8), 4) == 2);
    CHECK(leading_blocks_royal(bits("11110111"), 4) == 1);
    CHECK(leading_blocks_royal(bits("01111111"), 4) == 0);
    CHECK_THROWS_AS(leading_blocks_royal(all_ones(8), 3), std::invalid_argument);
}

TEST_CASE("four-block concatenation values from the staged example") {
    ConcatSpec spec{16, 4, 0, false, Subfunction::bimodal_trap, 1};
    CHECK(concat_eval(bits("1011 1010 0100 0111"), spec) == 1.0);
    CHECK(concat_eval(all_ones(16), spec) == 8.0);
}

TEST_CASE("cyclic overlapping layout wraps the last block") {
    ConcatSpec spec{12, 4, 1, true, Subfunction::bimodal_trap, 1};
    const auto blocks = spec.block_index_sets();
    REQUIRE(blocks.size() == 4);
    CHECK(blocks[0] == std::vector<int>{0, 1, 2, 3});
    CHECK(blocks[1] == std::vector<int>{3, 4, 5, 6});
    CHECK(blocks[2] == std::vector<int>{6, 7, 8, 9});
    CHECK(blocks[3] == std::vector<int>{9, 10, 11, 0});
    CHECK(concat_eval(all_ones(12), spec) == 8.0);
    CHECK(concat_eval(bits("101101010011"), spec) == 1.0);
}

TEST_CASE("enable flags on the worked four-block genotype") {
    auto spec = LeadingBlocksSpec::contiguous(16, 4, 1, LbpVariant::rest_off);
    const Genotype xa = bits("1111 0110 0000 0010");
    CHECK(enable_flags(xa, spec) == std::vector<uint8_t>{1, 1, 0, 0});

    auto spec2 = LeadingBlocksSpec::contiguous(16, 4, 2, LbpVariant::rest_off);
    CHECK(enable_flags(xa, spec2) == std::vector<uint8_t>{1, 1, 1, 1});

    auto spec_r8 = LeadingBlocksSpec::contiguous(16, 4, 8, LbpVariant::rest_off);
    CHECK(enable_flags(bits("0000 0010 0110 1000"), spec_r8) ==
          std::vector<uint8_t>{1, 1, 1, 1});
}

TEST_CASE("gated evaluation on the worked genotype") {
    const Genotype xa = bits("1111 0110 0000 0010");
    CHECK(lbp_eval(xa, LeadingBlocksSpec::contiguous(16, 4, 1, LbpVariant::rest_off)) == 3.0);
    CHECK(lbp_eval(xa, LeadingBlocksSpec::contiguous(16, 4, 2, LbpVariant::rest_off)) == 5.0);

    // Disabled part: both trailing blocks, 8 genes holding a single one.
    auto hoh = LeadingBlocksSpec::contiguous(16, 4, 1, LbpVariant::half_on_half, 0.1);
    CHECK(lbp_eval(xa, hoh) == doctest::Approx(3.1).epsilon(1e-12));
    CHECK(oracle::lbp_eval(xa, hoh) == doctest::Approx(3.1).epsilon(1e-12));
}

TEST_CASE("half-on-half boundary behaviour") {
    auto spec = LeadingBlocksSpec::contiguous(16, 4, 1, LbpVariant::half_on_half, 0.25);
    // Block 0 suboptimal => blocks 1..3 disabled, 12 disabled genes.
    Genotype x = bits("0110 0000 0000 0000");
    const double base = lbp_eval(x, spec);
    CHECK(base == 1.0);  // u_d = 0 -> no disabled contribution

    Genotype half = bits("0110 1110 1110 0000");  // u_d = 6 = size_d/2
    const double expect = 1.0 + 0.25 * (3 * 2);   // alpha * f_dmax
    CHECK(lbp_eval(half, spec) == doctest::Approx(expect).epsilon(1e-12));

    Genotype full = bits("0110 1111 1111 1111");  // u_d = size_d
    CHECK(lbp_eval(full, spec) == 1.0);
}

TEST_CASE("gated and plain sums agree when everything is enabled") {
    auto spec = LeadingBlocksSpec::contiguous(16, 4, 1, LbpVariant::rest_off);
    ConcatSpec concat{16, 4, 0, false, Subfunction::bimodal_trap, 1};
    for_all_binary(16, [&](const Genotype& x) {
        const auto flags = enable_flags(x, spec);
        bool all = true;
        for (uint8_t f : flags) all = all && f;
        if (all) CHECK(lbp_eval(x, spec) == concat_eval(x, concat));
        CHECK(lbp_eval(x, spec) <= concat_eval(x, concat));  // dropped blocks never negative
    });
}

TEST_CASE("changing disabled genes never changes the flags") {
    auto spec = LeadingBlocksSpec::contiguous(12, 4, 1, LbpVariant::rest_off);
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        Genotype x = random_genotype(Alphabet::binary(12), rng);
        const auto flags = enable_flags(x, spec);
        Genotype y = x;
        for (size_t s = 0; s < spec.blocks.size(); ++s) {
            if (flags[s]) continue;
            for (int i : spec.blocks[s]) y.genes[i] = rng() & 1;
        }
        CHECK(enable_flags(y, spec) == flags);
    }
}

TEST_CASE("all-ones attains the optimum for every variant") {
    for (LbpVariant variant :
         {LbpVariant::rest_off, LbpVariant::half_on_half, LbpVariant::alter}) {
        auto spec = LeadingBlocksSpec::contiguous(20, 4, 1, variant, 0.1);
        CHECK(lbp_eval(all_ones(20), spec) == known_optimum(spec));
        CHECK(known_optimum(spec) == 10.0);
    }
}

TEST_CASE("optimum of overlapping layouts matches exhaustive search") {
    ConcatSpec cyc{12, 4, 1, true, Subfunction::bimodal_trap, 1};
    double best = -1e9;
    for_all_binary(12, [&](const Genotype& x) { best = std::max(best, concat_eval(x, cyc)); });
    CHECK(known_optimum(cyc) == best);

    ConcatSpec chain{13, 4, 1, false, Subfunction::bimodal_trap, 1};
    double chain_best = -1e9;
    for_all_binary(13, [&](const Genotype& x) {
        chain_best = std::max(chain_best, concat_eval(x, chain));
    });
    CHECK(known_optimum(chain) == chain_best);

    ConcatSpec dec{12, 4, 2, false, Subfunction::deceptive_trap, 1};
    double dec_best = -1e9;
    for_all_binary(12, [&](const Genotype& x) { dec_best = std::max(dec_best, concat_eval(x, dec)); });
    CHECK(known_optimum(dec) == dec_best);
}

TEST_CASE("chain-count splits the genotype into independent chains") {
    ConcatSpec two{26, 4, 1, false, Subfunction::bimodal_trap, 2};
    const auto blocks = two.block_index_sets();
    CHECK(blocks.size() == 8);  // (13-4)/3+1 = 4 per chain
    CHECK(blocks[4].front() == 13);
    CHECK(known_optimum(two) == 2 * known_optimum(ConcatSpec{13, 4, 1, false,
                                                             Subfunction::bimodal_trap, 1}));
}

TEST_CASE("max3sat generation and evaluation") {
    const auto a = max3sat_generate(100, 427, 7);
    const auto b = max3sat_generate(100, 427, 7);
    CHECK(a == b);
    CHECK(a.clauses.size() == 427);
    for (const Clause& cl : a.clauses) {
        CHECK(cl.var[0] != cl.var[1]);
        CHECK(cl.var[0] != cl.var[2]);
        CHECK(cl.var[1] != cl.var[2]);
        for (int i = 0; i < 3; ++i) CHECK(cl.var[i] < 100);
    }

    const auto tiny = max3sat_generate(3, 1, 3);
    std::set<int> vars(tiny.clauses[0].var.begin(), tiny.clauses[0].var.end());
    CHECK(vars == std::set<int>{0, 1, 2});

    // All-positive clause on three zero genes is unsatisfied.
    Max3SatInstance inst;
    inst.n = 3;
    inst.clauses.push_back(Clause{{0, 1, 2}, {1, 1, 1}});
    CHECK(max3sat_eval(bits("000"), inst) == 0);
    CHECK(max3sat_eval(bits("100"), inst) == 1);

    const auto rnd = max3sat_generate(12, 51, 13);
    for_all_binary(12, [&](const Genotype& x) {
        CHECK(max3sat_eval(x, rnd) == oracle::max3sat_recount(x, rnd));
    });
    CHECK_THROWS_AS(max3sat_generate(2, 1, 0), std::invalid_argument);
}

TEST_CASE("dimacs round-trip") {
    const auto inst = max3sat_generate(20, 85, 99);
    std::stringstream buffer;
    write_dimacs(buffer, inst);
    const auto back = read_dimacs(buffer);
    CHECK(back == inst);
}

TEST_CASE("spec construction rejects malformed block layouts") {
    LeadingBlocksSpec bad;
    bad.n = 8;
    bad.reach = 1;
    bad.alpha = 0.1;
    bad.blocks = {{0, 1, 2, 3}, {3, 4, 5, 6}};
    bad.block_optimum = {2, 2};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    LeadingBlocksSpec wrong_opt;
    wrong_opt.n = 8;
    wrong_opt.reach = 1;
    wrong_opt.alpha = 0.1;
    wrong_opt.blocks = {{0, 1, 2, 3}, {4, 5, 6, 7}};
    wrong_opt.block_optimum = {2, 3};
    CHECK_THROWS_AS(wrong_opt.validate(), std::invalid_argument);

    CHECK_THROWS_AS(LeadingBlocksSpec::contiguous(16, 4, 0, LbpVariant::rest_off),
                    std::invalid_argument);
    CHECK_THROWS_AS(LeadingBlocksSpec::contiguous(16, 4, 1, LbpVariant::rest_off, 1.0),
                    std::invalid_argument);
}

TEST_CASE("known optima of the leading-ones family") {
    CHECK(LeadingOnesProblem(300).optimum_raw() == 300.0);
    CHECK(BlockLeadingOnesProblem(300, 4).optimum_raw() == 75.0);
    CHECK(RoyalStaircaseProblem(300, 4).optimum_raw() == 75.0);
    CHECK(ConcatProblem(ConcatSpec{16, 4, 0, false, Subfunction::bimodal_trap, 1}).optimum_raw() ==
          8.0);
}
