#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lbp/core.hpp"

namespace lbp::bench {

// ---------------------------------------------------------------------------
// Unitation-based subfunctions
// ---------------------------------------------------------------------------

/// Bimodal deceptive trap: two global optima at u=0 and u=k, k even.
int bim_trap(int u, int k);

/// Bimodal slope without its optima; negative at u in {0,k}.
int no_opt_bimodal(int u, int k);

/// Conventional deceptive trap: k at u=k, else k-1-u.
int deceptive_trap(int u, int k);

enum class Subfunction { bimodal_trap, deceptive_trap, no_opt_bimodal };

std::string to_string(Subfunction s);
Subfunction subfunction_from_string(const std::string& s);

int subfunction_value(Subfunction f, int u, int k);
/// Maximum over u = 0..k, found by enumeration.
int subfunction_optimum(Subfunction f, int k);

// ---------------------------------------------------------------------------
// Leading Ones lineage
// ---------------------------------------------------------------------------

int leading_ones(const Genotype& x);
int block_leading_ones(const Genotype& x, int block_len);
/// Count of complete leading all-ones blocks; block_size must divide n.
int leading_blocks_royal(const Genotype& x, int block_size);

// ---------------------------------------------------------------------------
// Subfunction concatenations (disjoint, overlapping chains, cyclic)
// ---------------------------------------------------------------------------

/// Block layout for sums of unitation subfunctions. Disjoint (o=0) blocks
/// are {k*s .. k*s+k-1}. With overlap o>0 consecutive blocks share o genes
/// (stride k-o); a cyclic layout wraps the last block onto the first.
/// `chains` splits the genotype into that many independent equal chains.
struct ConcatSpec {
    int n = 0;
    int k = 0;
    int o = 0;
    bool cyclic = false;
    Subfunction sub = Subfunction::bimodal_trap;
    int chains = 1;

    void validate() const;
    std::vector<std::vector<int>> block_index_sets() const;
};

double concat_eval(const Genotype& x, const ConcatSpec& spec);
double known_optimum(const ConcatSpec& spec);

// ---------------------------------------------------------------------------
// Leading Blocks Problem
// ---------------------------------------------------------------------------

enum class LbpVariant { rest_off, half_on_half, alter };

std::string to_string(LbpVariant v);
LbpVariant lbp_variant_from_string(const std::string& s);

struct LeadingBlocksSpec {
    int n = 0;
    int reach = 1;
    LbpVariant variant = LbpVariant::rest_off;
    double alpha = 0.1;
    Subfunction sub = Subfunction::bimodal_trap;
    std::vector<std::vector<int>> blocks;       // I_s, pairwise disjoint
    std::vector<int> block_optimum;             // f_{s,opt}

    /// Contiguous layout I_s = {k*s .. k*s+k-1}, k dividing n.
    static LeadingBlocksSpec contiguous(int n, int k, int reach, LbpVariant variant,
                                        double alpha = 0.1,
                                        Subfunction sub = Subfunction::bimodal_trap);

    void validate() const;
};

/// Left-to-right enabling pass: flag[s] = 1 iff s < reach, or some enabled
/// block among the reach preceding ones sits at its optimum.
std::vector<uint8_t> enable_flags(const Genotype& x, const LeadingBlocksSpec& spec);

double lbp_eval(const Genotype& x, const LeadingBlocksSpec& spec);
double known_optimum(const LeadingBlocksSpec& spec);

// ---------------------------------------------------------------------------
// Max3Sat
// ---------------------------------------------------------------------------

struct Clause {
    std::array<int32_t, 3> var;
    std::array<uint8_t, 3> positive;

    bool operator==(const Clause&) const = default;
};

struct Max3SatInstance {
    int n = 0;
    std::vector<Clause> clauses;
    uint64_t seed = 0;

    bool operator==(const Max3SatInstance&) const = default;
};

/// m clauses over 3 distinct uniformly drawn variables with uniform signs;
/// deterministic in seed.
Max3SatInstance max3sat_generate(int n, long long m, uint64_t seed);
int max3sat_eval(const Genotype& x, const Max3SatInstance& inst);

void write_dimacs(std::ostream& out, const Max3SatInstance& inst);
Max3SatInstance read_dimacs(std::istream& in);

// ---------------------------------------------------------------------------
// Problem adapters
// ---------------------------------------------------------------------------

class LeadingOnesProblem : public Problem {
public:
    explicit LeadingOnesProblem(int n);
    int length() const override { return n_; }
    std::shared_ptr<const Alphabet> alphabet() const override { return alphabet_; }
    double evaluate_raw(const Genotype& x) const override;
    std::optional<double> optimum_raw() const override { return double(n_); }
    std::string id() const override;

private:
    int n_;
    std::shared_ptr<const Alphabet> alphabet_;
};

class BlockLeadingOnesProblem : public Problem {
public:
    BlockLeadingOnesProblem(int n, int block_len);
    int length() const override { return n_; }
    std::shared_ptr<const Alphabet> alphabet() const override { return alphabet_; }
    double evaluate_raw(const Genotype& x) const override;
    std::optional<double> optimum_raw() const override { return double(n_ / block_len_); }
    std::string id() const override;

private:
    int n_, block_len_;
    std::shared_ptr<const Alphabet> alphabet_;
};

class RoyalStaircaseProblem : public Problem {
public:
    RoyalStaircaseProblem(int n, int block_size);
    int length() const override { return n_; }
    std::shared_ptr<const Alphabet> alphabet() const override { return alphabet_; }
    double evaluate_raw(const Genotype& x) const override;
    std::optional<double> optimum_raw() const override { return double(n_ / block_size_); }
    std::string id() const override;

private:
    int n_, block_size_;
    std::shared_ptr<const Alphabet> alphabet_;
};

class OneMaxProblem : public Problem {
public:
    explicit OneMaxProblem(int n);
    int length() const override { return n_; }
    std::shared_ptr<const Alphabet> alphabet() const override { return alphabet_; }
    double evaluate_raw(const Genotype& x) const override;
    std::optional<double> optimum_raw() const override { return double(n_); }
    std::string id() const override;

private:
    int n_;
    std::shared_ptr<const Alphabet> alphabet_;
};

class ConcatProblem : public Problem {
public:
    explicit ConcatProblem(ConcatSpec spec);
    int length() const override { return spec_.n; }
    std::shared_ptr<const Alphabet> alphabet() const override { return alphabet_; }
    double evaluate_raw(const Genotype& x) const override;
    std::optional<double> optimum_raw() const override { return optimum_; }
    std::string id() const override;
    const ConcatSpec& spec() const { return spec_; }

private:
    ConcatSpec spec_;
    std::vector<std::vector<int>> blocks_;
    double optimum_;
    std::shared_ptr<const Alphabet> alphabet_;
};

class LbpProblem : public Problem {
public:
    explicit LbpProblem(LeadingBlocksSpec spec);
    int length() const override { return spec_.n; }
    std::shared_ptr<const Alphabet> alphabet() const override { return alphabet_; }
    double evaluate_raw(const Genotype& x) const override;
    std::optional<double> optimum_raw() const override { return optimum_; }
    std::string id() const override;
    const LeadingBlocksSpec& spec() const { return spec_; }

private:
    LeadingBlocksSpec spec_;
    double optimum_;
    std::shared_ptr<const Alphabet> alphabet_;
};

class Max3SatProblem : public Problem {
public:
    explicit Max3SatProblem(Max3SatInstance inst);
    int length() const override { return inst_.n; }
    std::shared_ptr<const Alphabet> alphabet() const override { return alphabet_; }
    double evaluate_raw(const Genotype& x) const override;
    std::string id() const override;
    const Max3SatInstance& instance() const { return inst_; }

private:
    Max3SatInstance inst_;
    std::shared_ptr<const Alphabet> alphabet_;
};

}  // namespace lbp::bench
