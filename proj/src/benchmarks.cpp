#include "lbp/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace lbp::bench {

namespace {

void check_unitation_range(int u, int k) {
    if (u < 0 || u > k) {
        throw std::out_of_range("unitation " + std::to_string(u) + " out of range for order " +
                                std::to_string(k));
    }
}

int unitation(const Genotype& x, const std::vector<int>& indices) {
    int u = 0;
    for (int i : indices) u += x.genes[i];
    return u;
}

void require_binary(const Genotype& x, const char* what) {
    if (!x.alphabet || !x.alphabet->is_binary()) {
        throw std::invalid_argument(std::string(what) + " requires a binary genotype");
    }
}

}  // namespace

int bim_trap(int u, int k) {
    if (k < 2 || k % 2 != 0) throw std::invalid_argument("bim_trap order must be even and >= 2");
    check_unitation_range(u, k);
    if (u == 0 || u == k) return k / 2;
    return k / 2 - std::abs(u - k / 2) - 1;
}

int no_opt_bimodal(int u, int k) {
    check_unitation_range(u, k);
    return k / 2 - std::abs(u - k / 2) - 1;
}

int deceptive_trap(int u, int k) {
    check_unitation_range(u, k);
    return u == k ? k : k - 1 - u;
}

std::string to_string(Subfunction s) {
    switch (s) {
        case Subfunction::bimodal_trap: return "bim";
        case Subfunction::deceptive_trap: return "dec";
        case Subfunction::no_opt_bimodal: return "nobim";
    }
    return "?";
}

Subfunction subfunction_from_string(const std::string& s) {
    if (s == "bim") return Subfunction::bimodal_trap;
    if (s == "dec") return Subfunction::deceptive_trap;
    if (s == "nobim") return Subfunction::no_opt_bimodal;
    throw std::invalid_argument("unknown subfunction: " + s);
}

int subfunction_value(Subfunction f, int u, int k) {
    switch (f) {
        case Subfunction::bimodal_trap: return bim_trap(u, k);
        case Subfunction::deceptive_trap: return deceptive_trap(u, k);
        case Subfunction::no_opt_bimodal: return no_opt_bimodal(u, k);
    }
    throw std::invalid_argument("unknown subfunction");
}

int subfunction_optimum(Subfunction f, int k) {
    int best = std::numeric_limits<int>::min();
    for (int u = 0; u <= k; ++u) best = std::max(best, subfunction_value(f, u, k));
    return best;
}

int leading_ones(const Genotype& x) {
    require_binary(x, "leading_ones");
    int count = 0;
    for (int32_t g : x.genes) {
        if (g != 1) break;
        ++count;
    }
    return count;
}

int block_leading_ones(const Genotype& x, int block_len) {
    if (block_len < 1) throw std::invalid_argument("block length must be >= 1");
    return leading_ones(x) / block_len;
}

int leading_blocks_royal(const Genotype& x, int block_size) {
    require_binary(x, "leading_blocks_royal");
    if (block_size < 1 || x.size() % block_size != 0) {
        throw std::invalid_argument("block size must divide the genotype length");
    }
    return leading_ones(x) / block_size;
}

// ---------------------------------------------------------------------------
// Concatenations
// ---------------------------------------------------------------------------

void ConcatSpec::validate() const {
    if (n < 1 || k < 1) throw std::invalid_argument("concat spec needs n >= 1, k >= 1");
    if (o < 0 || o >= k) throw std::invalid_argument("overlap must satisfy 0 <= o < k");
    if (chains < 1 || n % chains != 0) {
        throw std::invalid_argument("chain count must divide n");
    }
    const int cn = n / chains;
    if (o == 0) {
        if (cn % k != 0) throw std::invalid_argument("k must divide the chain length for o=0");
    } else if (cyclic) {
        if (chains != 1) throw std::invalid_argument("cyclic layout supports a single chain");
        if (n % (k - o) != 0) {
            throw std::invalid_argument("cyclic layout needs (k-o) dividing n");
        }
        if (n / (k - o) < 2) throw std::invalid_argument("cyclic layout needs >= 2 blocks");
    } else {
        if (cn < k || (cn - k) % (k - o) != 0) {
            throw std::invalid_argument("overlapping chain needs (chain length - k) divisible by (k-o)");
        }
    }
}

std::vector<std::vector<int>> ConcatSpec::block_index_sets() const {
    validate();
    std::vector<std::vector<int>> blocks;
    const int cn = n / chains;
    for (int c = 0; c < chains; ++c) {
        const int base = c * cn;
        if (o == 0) {
            for (int s = 0; s < cn / k; ++s) {
                std::vector<int> b(k);
                std::iota(b.begin(), b.end(), base + s * k);
                blocks.push_back(std::move(b));
            }
        } else if (cyclic) {
            const int stride = k - o;
            const int count = n / stride;
            for (int s = 0; s < count; ++s) {
                std::vector<int> b(k);
                for (int j = 0; j < k; ++j) b[j] = (s * stride + j) % n;
                blocks.push_back(std::move(b));
            }
        } else {
            const int stride = k - o;
            const int count = (cn - k) / stride + 1;
            for (int s = 0; s < count; ++s) {
                std::vector<int> b(k);
                std::iota(b.begin(), b.end(), base + s * stride);
                blocks.push_back(std::move(b));
            }
        }
    }
    return blocks;
}

double concat_eval(const Genotype& x, const ConcatSpec& spec) {
    require_binary(x, "concat_eval");
    if (x.size() != spec.n) throw std::invalid_argument("genotype length does not match concat spec");
    double total = 0.0;
    for (const auto& block : spec.block_index_sets()) {
        total += subfunction_value(spec.sub, unitation(x, block), static_cast<int>(block.size()));
    }
    return total;
}

namespace {

/// Best total over one chain of unitation blocks sharing o boundary genes,
/// by dynamic programming over the boundary unitation. Needs k >= 2*o.
double chain_best(Subfunction sub, int k, int o, int block_count) {
    const double ninf = -std::numeric_limits<double>::infinity();
    if (block_count == 1) return subfunction_optimum(sub, k);
    std::vector<double> dp(o + 1, ninf);
    const int first_free = k - o;
    for (int j = 0; j <= o; ++j) {
        for (int m = 0; m <= first_free; ++m) {
            dp[j] = std::max(dp[j], double(subfunction_value(sub, m + j, k)));
        }
    }
    const int mid_free = k - 2 * o;
    for (int s = 1; s < block_count - 1; ++s) {
        std::vector<double> next(o + 1, ninf);
        for (int j = 0; j <= o; ++j) {
            if (dp[j] == ninf) continue;
            for (int jn = 0; jn <= o; ++jn) {
                for (int m = 0; m <= mid_free; ++m) {
                    next[jn] = std::max(next[jn], dp[j] + subfunction_value(sub, j + m + jn, k));
                }
            }
        }
        dp = std::move(next);
    }
    double best = ninf;
    const int last_free = k - o;
    for (int j = 0; j <= o; ++j) {
        if (dp[j] == ninf) continue;
        for (int m = 0; m <= last_free; ++m) {
            best = std::max(best, dp[j] + subfunction_value(sub, j + m, k));
        }
    }
    return best;
}

/// Cyclic variant: the closing boundary's unitation is pinned and enumerated.
double cycle_best(Subfunction sub, int k, int o, int block_count) {
    const double ninf = -std::numeric_limits<double>::infinity();
    const int mid_free = k - 2 * o;
    double best = ninf;
    for (int u0 = 0; u0 <= o; ++u0) {
        std::vector<double> dp(o + 1, ninf);
        for (int j = 0; j <= o; ++j) {
            for (int m = 0; m <= mid_free; ++m) {
                dp[j] = std::max(dp[j], double(subfunction_value(sub, u0 + m + j, k)));
            }
        }
        for (int s = 1; s < block_count - 1; ++s) {
            std::vector<double> next(o + 1, ninf);
            for (int j = 0; j <= o; ++j) {
                if (dp[j] == ninf) continue;
                for (int jn = 0; jn <= o; ++jn) {
                    for (int m = 0; m <= mid_free; ++m) {
                        next[jn] = std::max(next[jn], dp[j] + subfunction_value(sub, j + m + jn, k));
                    }
                }
            }
            dp = std::move(next);
        }
        for (int j = 0; j <= o; ++j) {
            if (dp[j] == ninf) continue;
            for (int m = 0; m <= mid_free; ++m) {
                best = std::max(best, dp[j] + subfunction_value(sub, j + m + u0, k));
            }
        }
    }
    return best;
}

double exhaustive_best(const ConcatSpec& spec) {
    auto alphabet = Alphabet::binary(spec.n);
    Genotype x{std::vector<int32_t>(spec.n, 0), alphabet};
    double best = -std::numeric_limits<double>::infinity();
    const uint64_t total = 1ull << spec.n;
    for (uint64_t bits = 0; bits < total; ++bits) {
        for (int i = 0; i < spec.n; ++i) x.genes[i] = (bits >> i) & 1;
        best = std::max(best, concat_eval(x, spec));
    }
    return best;
}

}  // namespace

double known_optimum(const ConcatSpec& spec) {
    spec.validate();
    if (spec.o == 0) {
        const int blocks = spec.n / spec.k;
        return double(blocks) * subfunction_optimum(spec.sub, spec.k);
    }
    if (spec.k >= 2 * spec.o) {
        const int stride = spec.k - spec.o;
        if (spec.cyclic) return cycle_best(spec.sub, spec.k, spec.o, spec.n / stride);
        const int cn = spec.n / spec.chains;
        const int per_chain = (cn - spec.k) / stride + 1;
        return double(spec.chains) * chain_best(spec.sub, spec.k, spec.o, per_chain);
    }
    if (spec.n <= 24) return exhaustive_best(spec);
    throw std::invalid_argument("optimum unsupported for o > k/2 with n > 24");
}

// ---------------------------------------------------------------------------
// Leading Blocks Problem
// ---------------------------------------------------------------------------

std::string to_string(LbpVariant v) {
    switch (v) {
        case LbpVariant::rest_off: return "restoff";
        case LbpVariant::half_on_half: return "halfonhalf";
        case LbpVariant::alter: return "alter";
    }
    return "?";
}

LbpVariant lbp_variant_from_string(const std::string& s) {
    if (s == "restoff") return LbpVariant::rest_off;
    if (s == "halfonhalf") return LbpVariant::half_on_half;
    if (s == "alter") return LbpVariant::alter;
    throw std::invalid_argument("unknown variant: " + s);
}

LeadingBlocksSpec LeadingBlocksSpec::contiguous(int n, int k, int reach, LbpVariant variant,
                                                double alpha, Subfunction sub) {
    if (k < 1 || n % k != 0) throw std::invalid_argument("k must divide n for the contiguous layout");
    LeadingBlocksSpec spec;
    spec.n = n;
    spec.reach = reach;
    spec.variant = variant;
    spec.alpha = alpha;
    spec.sub = sub;
    for (int s = 0; s < n / k; ++s) {
        std::vector<int> block(k);
        std::iota(block.begin(), block.end(), s * k);
        spec.blocks.push_back(std::move(block));
        spec.block_optimum.push_back(subfunction_optimum(sub, k));
    }
    spec.validate();
    return spec;
}

void LeadingBlocksSpec::validate() const {
    if (reach < 1) throw std::invalid_argument("reach must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (blocks.empty()) throw std::invalid_argument("at least one block required");
    if (blocks.size() != block_optimum.size()) {
        throw std::invalid_argument("per-block optimum count does not match block count");
    }
    std::unordered_set<int> seen;
    for (const auto& block : blocks) {
        if (block.empty()) throw std::invalid_argument("empty block");
        for (int i : block) {
            if (i < 0 || i >= n) throw std::invalid_argument("block index out of range");
            if (!seen.insert(i).second) throw std::invalid_argument("blocks must be disjoint");
        }
    }
    for (size_t s = 0; s < blocks.size(); ++s) {
        const int k = static_cast<int>(blocks[s].size());
        if (k <= 20 && block_optimum[s] != subfunction_optimum(sub, k)) {
            throw std::invalid_argument("per-block optimum does not match the subfunction maximum");
        }
    }
}

std::vector<uint8_t> enable_flags(const Genotype& x, const LeadingBlocksSpec& spec) {
    require_binary(x, "enable_flags");
    if (x.size() != spec.n) throw std::invalid_argument("genotype length does not match spec");
    const int blocks = static_cast<int>(spec.blocks.size());
    std::vector<uint8_t> flags(blocks, 0);
    std::vector<uint8_t> at_optimum(blocks, 0);
    for (int s = 0; s < blocks; ++s) {
        const int k = static_cast<int>(spec.blocks[s].size());
        const int value = subfunction_value(spec.sub, unitation(x, spec.blocks[s]), k);
        at_optimum[s] = value == spec.block_optimum[s];
        if (s < spec.reach) {
            flags[s] = 1;
            continue;
        }
        for (int i = std::max(0, s - spec.reach); i < s; ++i) {
            if (flags[i] && at_optimum[i]) {
                flags[s] = 1;
                break;
            }
        }
    }
    return flags;
}

double lbp_eval(const Genotype& x, const LeadingBlocksSpec& spec) {
    const auto flags = enable_flags(x, spec);
    const int blocks = static_cast<int>(spec.blocks.size());

    double enabled_sum = 0.0;
    for (int s = 0; s < blocks; ++s) {
        if (!flags[s]) continue;
        const int k = static_cast<int>(spec.blocks[s].size());
        enabled_sum += subfunction_value(spec.sub, unitation(x, spec.blocks[s]), k);
    }

    double fd = 0.0;
    switch (spec.variant) {
        case LbpVariant::rest_off:
            break;
        case LbpVariant::half_on_half: {
            double fdmax = 0.0;
            long long size_d = 0, u_d = 0;
            for (int s = 0; s < blocks; ++s) {
                if (flags[s]) continue;
                fdmax += spec.block_optimum[s];
                size_d += static_cast<long long>(spec.blocks[s].size());
                u_d += unitation(x, spec.blocks[s]);
            }
            if (size_d > 0) {
                const double half = size_d / 2.0;
                fd = (fdmax * spec.alpha) * (1.0 - std::abs(u_d - half) / half);
            }
            break;
        }
        case LbpVariant::alter: {
            for (int s = 0; s < blocks; ++s) {
                if (flags[s]) continue;
                const int k = static_cast<int>(spec.blocks[s].size());
                fd += no_opt_bimodal(unitation(x, spec.blocks[s]), k);
            }
            break;
        }
    }
    return enabled_sum + fd;
}

double known_optimum(const LeadingBlocksSpec& spec) {
    spec.validate();
    double total = 0.0;
    for (int opt : spec.block_optimum) total += opt;
    return total;
}

// ---------------------------------------------------------------------------
// Max3Sat
// ---------------------------------------------------------------------------

Max3SatInstance max3sat_generate(int n, long long m, uint64_t seed) {
    if (n < 3) throw std::invalid_argument("max3sat needs n >= 3");
    if (m < 1) throw std::invalid_argument("max3sat needs m >= 1");
    Max3SatInstance inst;
    inst.n = n;
    inst.seed = seed;
    inst.clauses.reserve(m);
    Rng rng(seed);
    std::uniform_int_distribution<int32_t> var(0, n - 1);
    std::uniform_int_distribution<int> sign(0, 1);
    for (long long c = 0; c < m; ++c) {
        Clause cl;
        cl.var[0] = var(rng);
        do cl.var[1] = var(rng); while (cl.var[1] == cl.var[0]);
        do cl.var[2] = var(rng); while (cl.var[2] == cl.var[0] || cl.var[2] == cl.var[1]);
        for (int i = 0; i < 3; ++i) cl.positive[i] = static_cast<uint8_t>(sign(rng));
        inst.clauses.push_back(cl);
    }
    return inst;
}

int max3sat_eval(const Genotype& x, const Max3SatInstance& inst) {
    require_binary(x, "max3sat_eval");
    if (x.size() != inst.n) throw std::invalid_argument("genotype length does not match instance");
    int satisfied = 0;
    for (const Clause& cl : inst.clauses) {
        for (int i = 0; i < 3; ++i) {
            if ((x.genes[cl.var[i]] == 1) == (cl.positive[i] != 0)) {
                ++satisfied;
                break;
            }
        }
    }
    return satisfied;
}

void write_dimacs(std::ostream& out, const Max3SatInstance& inst) {
    out << "c max3sat n=" << inst.n << " m=" << inst.clauses.size() << " seed=" << inst.seed << "\n";
    out << "p cnf " << inst.n << ' ' << inst.clauses.size() << "\n";
    for (const Clause& cl : inst.clauses) {
        for (int i = 0; i < 3; ++i) {
            int32_t lit = cl.var[i] + 1;
            out << (cl.positive[i] ? lit : -lit) << ' ';
        }
        out << "0\n";
    }
}

Max3SatInstance read_dimacs(std::istream& in) {
    Max3SatInstance inst;
    std::string line;
    long long declared = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == 'c') {
            auto pos = line.find("seed=");
            if (pos != std::string::npos) inst.seed = std::stoull(line.substr(pos + 5));
            continue;
        }
        if (line[0] == 'p') {
            std::istringstream ps(line);
            std::string p, cnf;
            ps >> p >> cnf >> inst.n >> declared;
            if (cnf != "cnf") throw std::runtime_error("dimacs: expected 'p cnf'");
            continue;
        }
        std::istringstream ls(line);
        std::vector<int> lits;
        int lit;
        while (ls >> lit && lit != 0) lits.push_back(lit);
        if (lits.empty()) continue;
        if (lits.size() != 3) throw std::runtime_error("dimacs: clause is not ternary");
        Clause cl;
        for (int i = 0; i < 3; ++i) {
            cl.var[i] = std::abs(lits[i]) - 1;
            cl.positive[i] = lits[i] > 0;
            if (cl.var[i] < 0 || cl.var[i] >= inst.n) throw std::runtime_error("dimacs: variable out of range");
        }
        if (cl.var[0] == cl.var[1] || cl.var[0] == cl.var[2] || cl.var[1] == cl.var[2]) {
            throw std::runtime_error("dimacs: clause repeats a variable");
        }
        inst.clauses.push_back(cl);
    }
    if (declared >= 0 && declared != static_cast<long long>(inst.clauses.size())) {
        throw std::runtime_error("dimacs: clause count mismatch");
    }
    return inst;
}

// ---------------------------------------------------------------------------
// Problem adapters
// ---------------------------------------------------------------------------

LeadingOnesProblem::LeadingOnesProblem(int n) : n_(n), alphabet_(Alphabet::binary(n)) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
}
double LeadingOnesProblem::evaluate_raw(const Genotype& x) const { return leading_ones(x); }
std::string LeadingOnesProblem::id() const { return "lo-n" + std::to_string(n_); }

BlockLeadingOnesProblem::BlockLeadingOnesProblem(int n, int block_len)
    : n_(n), block_len_(block_len), alphabet_(Alphabet::binary(n)) {
    if (n < 1 || block_len < 1) throw std::invalid_argument("invalid blo parameters");
}
double BlockLeadingOnesProblem::evaluate_raw(const Genotype& x) const {
    return block_leading_ones(x, block_len_);
}
std::string BlockLeadingOnesProblem::id() const {
    return "blo-l" + std::to_string(block_len_) + "-n" + std::to_string(n_);
}

RoyalStaircaseProblem::RoyalStaircaseProblem(int n, int block_size)
    : n_(n), block_size_(block_size), alphabet_(Alphabet::binary(n)) {
    if (block_size < 1 || n % block_size != 0) {
        throw std::invalid_argument("block size must divide n");
    }
}
double RoyalStaircaseProblem::evaluate_raw(const Genotype& x) const {
    return leading_blocks_royal(x, block_size_);
}
std::string RoyalStaircaseProblem::id() const {
    return "lob-b" + std::to_string(block_size_) + "-n" + std::to_string(n_);
}

OneMaxProblem::OneMaxProblem(int n) : n_(n), alphabet_(Alphabet::binary(n)) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
}
double OneMaxProblem::evaluate_raw(const Genotype& x) const {
    int u = 0;
    for (int32_t g : x.genes) u += g;
    return u;
}
std::string OneMaxProblem::id() const { return "onemax-n" + std::to_string(n_); }

ConcatProblem::ConcatProblem(ConcatSpec spec)
    : spec_(std::move(spec)),
      blocks_(spec_.block_index_sets()),
      optimum_(known_optimum(spec_)),
      alphabet_(Alphabet::binary(spec_.n)) {}

double ConcatProblem::evaluate_raw(const Genotype& x) const {
    double total = 0.0;
    for (const auto& block : blocks_) {
        int u = 0;
        for (int i : block) u += x.genes[i];
        total += subfunction_value(spec_.sub, u, static_cast<int>(block.size()));
    }
    return total;
}

std::string ConcatProblem::id() const {
    std::string s = "concat-" + to_string(spec_.sub) + std::to_string(spec_.k);
    if (spec_.o > 0) s += "-o" + std::to_string(spec_.o);
    if (spec_.cyclic) s += "-cyc";
    if (spec_.chains > 1) s += "-c" + std::to_string(spec_.chains);
    return s + "-n" + std::to_string(spec_.n);
}

LbpProblem::LbpProblem(LeadingBlocksSpec spec)
    : spec_(std::move(spec)), optimum_(known_optimum(spec_)), alphabet_(Alphabet::binary(spec_.n)) {}

double LbpProblem::evaluate_raw(const Genotype& x) const { return lbp_eval(x, spec_); }

std::string LbpProblem::id() const {
    const int k = static_cast<int>(spec_.blocks.front().size());
    return "lbp-" + to_string(spec_.variant) + "-" + to_string(spec_.sub) + std::to_string(k) +
           "-R" + std::to_string(spec_.reach) + "-n" + std::to_string(spec_.n);
}

Max3SatProblem::Max3SatProblem(Max3SatInstance inst)
    : inst_(std::move(inst)), alphabet_(Alphabet::binary(inst_.n)) {}

double Max3SatProblem::evaluate_raw(const Genotype& x) const { return max3sat_eval(x, inst_); }

std::string Max3SatProblem::id() const {
    return "max3sat-n" + std::to_string(inst_.n) + "-m" + std::to_string(inst_.clauses.size()) +
           "-s" + std::to_string(inst_.seed);
}

}  // namespace lbp::bench
