#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace lbp {

using Rng = std::mt19937_64;

/// Per-position gene cardinalities. Shared between all genotypes of one
/// problem so copying a genotype stays cheap.
class Alphabet {
public:
    explicit Alphabet(std::vector<int32_t> sizes);

    static std::shared_ptr<const Alphabet> binary(int n);
    static std::shared_ptr<const Alphabet> uniform(int n, int32_t radix);

    int size() const { return static_cast<int>(sizes_.size()); }
    int32_t cardinality(int pos) const { return sizes_[pos]; }
    bool is_binary() const { return all_binary_; }
    const std::vector<int32_t>& sizes() const { return sizes_; }

    bool operator==(const Alphabet& other) const { return sizes_ == other.sizes_; }

private:
    std::vector<int32_t> sizes_;
    bool all_binary_;
};

/// Fixed-length gene vector over a per-position finite alphabet.
struct Genotype {
    std::vector<int32_t> genes;
    std::shared_ptr<const Alphabet> alphabet;

    int size() const { return static_cast<int>(genes.size()); }
    bool valid() const;

    bool operator==(const Genotype& other) const;
};

Genotype random_genotype(std::shared_ptr<const Alphabet> alphabet, Rng& rng);

enum class Orientation { maximize, minimize };

std::string to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);

/// Externally-oriented fitness. Optimizer internals work on raw
/// maximize-oriented doubles; minimization problems negate at the
/// problem boundary.
struct FitnessValue {
    double value;
    Orientation orientation;
};

inline double to_external(double raw, Orientation o) {
    return o == Orientation::minimize ? -raw : raw;
}
inline double to_raw(double external, Orientation o) {
    return o == Orientation::minimize ? -external : external;
}

/// Strict improvement / non-decrease on raw (maximize-oriented) values.
inline bool improves(double candidate, double incumbent, double tol) {
    return candidate > incumbent + tol;
}
inline bool not_worse(double candidate, double incumbent, double tol) {
    return candidate >= incumbent - tol;
}

class BudgetExhausted : public std::runtime_error {
public:
    BudgetExhausted() : std::runtime_error("evaluation budget exhausted") {}
};

/// FFE / wall-clock accounting. Wall-clock limits are only checked between
/// evaluations so FFE counts stay exact.
struct EvaluationBudget {
    long long ffe_used = 0;
    std::optional<long long> ffe_limit;
    std::optional<std::chrono::steady_clock::duration> wall_limit;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    bool exhausted() const {
        if (ffe_limit && ffe_used >= *ffe_limit) return true;
        if (wall_limit && std::chrono::steady_clock::now() - start >= *wall_limit) return true;
        return false;
    }
};

/// Uniform problem abstraction. evaluate_raw is maximize-oriented and pure;
/// handles are immutable after construction and safe to share across runs.
class Problem {
public:
    virtual ~Problem() = default;

    virtual int length() const = 0;
    virtual std::shared_ptr<const Alphabet> alphabet() const = 0;
    virtual double evaluate_raw(const Genotype& x) const = 0;
    virtual Orientation orientation() const { return Orientation::maximize; }
    virtual double tolerance() const { return 0.0; }
    virtual std::optional<double> optimum_raw() const { return std::nullopt; }
    virtual std::string id() const = 0;
};

bool shape_matches(const Problem& p, const Genotype& x);

/// Charges exactly one FFE and evaluates. Throws BudgetExhausted before
/// evaluating when the budget is spent, std::invalid_argument on shape
/// mismatch.
double evaluate_raw_budgeted(const Problem& p, const Genotype& x, EvaluationBudget& budget);
FitnessValue evaluate(const Problem& p, const Genotype& x, EvaluationBudget& budget);

struct TraceEntry {
    Genotype genotype;
    double fitness_raw;
    long long ffe;
};

/// Ordered sequence of strictly-improving best-so-far genotypes.
class ImprovementTrace {
public:
    ImprovementTrace() = default;
    ImprovementTrace(std::string problem_id, Orientation orientation, double tolerance);

    /// Appends one entry; rejects non-improving fitness after entry 0.
    void record(Genotype x, double fitness_raw, long long ffe);

    const std::vector<TraceEntry>& entries() const { return entries_; }
    const TraceEntry& entry(size_t i) const { return entries_[i]; }
    size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::string& problem_id() const { return problem_id_; }
    Orientation orientation() const { return orientation_; }
    double tolerance() const { return tolerance_; }

private:
    std::string problem_id_;
    Orientation orientation_ = Orientation::maximize;
    double tolerance_ = 0.0;
    std::vector<TraceEntry> entries_;
};

/// Line-oriented trace file: header "n=<n> orientation=<max|min>", then one
/// line per entry "<ffe> <fitness> <genes...>" with externally-oriented
/// fitness values.
void write_trace(std::ostream& out, const ImprovementTrace& trace);
ImprovementTrace read_trace(std::istream& in,
                            std::shared_ptr<const Alphabet> alphabet = nullptr,
                            double tolerance = 0.0);

std::string format_double(double v);

}  // namespace lbp
