#include "lbp/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace lbp {

Alphabet::Alphabet(std::vector<int32_t> sizes) : sizes_(std::move(sizes)) {
    for (int32_t s : sizes_) {
        if (s < 1) throw std::invalid_argument("alphabet cardinality must be >= 1");
    }
    all_binary_ = std::all_of(sizes_.begin(), sizes_.end(), [](int32_t s) { return s == 2; });
}

std::shared_ptr<const Alphabet> Alphabet::binary(int n) {
    return std::make_shared<Alphabet>(std::vector<int32_t>(n, 2));
}

std::shared_ptr<const Alphabet> Alphabet::uniform(int n, int32_t radix) {
    return std::make_shared<Alphabet>(std::vector<int32_t>(n, radix));
}

bool Genotype::valid() const {
    if (!alphabet || alphabet->size() != size()) return false;
    for (int i = 0; i < size(); ++i) {
        if (genes[i] < 0 || genes[i] >= alphabet->cardinality(i)) return false;
    }
    return true;
}

bool Genotype::operator==(const Genotype& other) const {
    if (genes != other.genes) return false;
    if (alphabet == other.alphabet) return true;
    if (!alphabet || !other.alphabet) return false;
    return *alphabet == *other.alphabet;
}

Genotype random_genotype(std::shared_ptr<const Alphabet> alphabet, Rng& rng) {
    Genotype x;
    x.alphabet = std::move(alphabet);
    const int n = x.alphabet->size();
    x.genes.resize(n);
    for (int i = 0; i < n; ++i) {
        std::uniform_int_distribution<int32_t> d(0, x.alphabet->cardinality(i) - 1);
        x.genes[i] = d(rng);
    }
    return x;
}

std::string to_string(Orientation o) {
    return o == Orientation::maximize ? "max" : "min";
}

Orientation orientation_from_string(const std::string& s) {
    if (s == "max") return Orientation::maximize;
    if (s == "min") return Orientation::minimize;
    throw std::invalid_argument("unknown orientation: " + s);
}

bool shape_matches(const Problem& p, const Genotype& x) {
    if (x.size() != p.length()) return false;
    auto pa = p.alphabet();
    if (x.alphabet == pa) return true;
    return x.alphabet && pa && *x.alphabet == *pa;
}

double evaluate_raw_budgeted(const Problem& p, const Genotype& x, EvaluationBudget& budget) {
    if (budget.exhausted()) throw BudgetExhausted();
    if (!shape_matches(p, x)) {
        throw std::invalid_argument("genotype shape does not match problem " + p.id());
    }
    double raw = p.evaluate_raw(x);
    ++budget.ffe_used;
    return raw;
}

FitnessValue evaluate(const Problem& p, const Genotype& x, EvaluationBudget& budget) {
    double raw = evaluate_raw_budgeted(p, x, budget);
    return FitnessValue{to_external(raw, p.orientation()), p.orientation()};
}

ImprovementTrace::ImprovementTrace(std::string problem_id, Orientation orientation,
                                   double tolerance)
    : problem_id_(std::move(problem_id)), orientation_(orientation), tolerance_(tolerance) {}

void ImprovementTrace::record(Genotype x, double fitness_raw, long long ffe) {
    if (!entries_.empty()) {
        const TraceEntry& last = entries_.back();
        if (!improves(fitness_raw, last.fitness_raw, tolerance_)) {
            throw std::invalid_argument("trace append rejected: fitness does not strictly improve");
        }
        if (x.size() != last.genotype.size() ||
            !(x.alphabet == last.genotype.alphabet ||
              (x.alphabet && last.genotype.alphabet && *x.alphabet == *last.genotype.alphabet))) {
            throw std::invalid_argument("trace append rejected: genotype shape mismatch");
        }
    }
    entries_.push_back(TraceEntry{std::move(x), fitness_raw, ffe});
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_trace(std::ostream& out, const ImprovementTrace& trace) {
    int n = trace.empty() ? 0 : trace.entry(0).genotype.size();
    out << "n=" << n << " orientation=" << to_string(trace.orientation()) << "\n";
    for (const TraceEntry& e : trace.entries()) {
        out << e.ffe << ' ' << format_double(to_external(e.fitness_raw, trace.orientation()));
        for (int32_t g : e.genotype.genes) out << ' ' << g;
        out << "\n";
    }
}

ImprovementTrace read_trace(std::istream& in, std::shared_ptr<const Alphabet> alphabet,
                            double tolerance) {
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("trace file: missing header");
    int n = -1;
    std::string orient_str;
    {
        std::istringstream hs(header);
        std::string tok;
        while (hs >> tok) {
            if (tok.rfind("n=", 0) == 0) n = std::stoi(tok.substr(2));
            else if (tok.rfind("orientation=", 0) == 0) orient_str = tok.substr(12);
        }
    }
    if (n < 0 || orient_str.empty()) throw std::runtime_error("trace file: malformed header");
    Orientation orientation = orientation_from_string(orient_str);

    struct Row {
        long long ffe;
        double fitness;
        std::vector<int32_t> genes;
    };
    std::vector<Row> rows;
    std::string line;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        Row r;
        if (!(ls >> r.ffe >> r.fitness)) {
            throw std::runtime_error("trace file: malformed entry at line " + std::to_string(lineno));
        }
        int32_t g;
        while (ls >> g) r.genes.push_back(g);
        if (static_cast<int>(r.genes.size()) != n) {
            throw std::runtime_error("trace file: wrong gene count at line " + std::to_string(lineno));
        }
        rows.push_back(std::move(r));
    }

    if (!alphabet) {
        std::vector<int32_t> sizes(n, 2);
        for (const Row& r : rows) {
            for (int i = 0; i < n; ++i) sizes[i] = std::max(sizes[i], r.genes[i] + 1);
        }
        alphabet = std::make_shared<Alphabet>(std::move(sizes));
    }

    ImprovementTrace trace("", orientation, tolerance);
    for (Row& r : rows) {
        Genotype x{std::move(r.genes), alphabet};
        trace.record(std::move(x), to_raw(r.fitness, orientation), r.ffe);
    }
    return trace;
}

}  // namespace lbp
