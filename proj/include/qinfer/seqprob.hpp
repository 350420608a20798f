#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "qinfer/dist.hpp"
#include "qinfer/types.hpp"

namespace qinfer::seqprob {

/// One finite random variable: a name and its outcome alphabet.
struct VariableSpec {
    std::string name;
    std::vector<std::string> alphabet;
};

/// A permutation of the variables; position 0 comes first in a sequence.
class Ordering {
public:
    explicit Ordering(std::vector<int> perm) : perm_(std::move(perm)) {
        std::vector<bool> seen(perm_.size(), false);
        for (int v : perm_) {
            if (v < 0 || v >= static_cast<int>(perm_.size()) || seen[static_cast<std::size_t>(v)])
                throw DomainError("Ordering: not a permutation");
            seen[static_cast<std::size_t>(v)] = true;
        }
    }

    static Ordering identity(int n) {
        std::vector<int> p(static_cast<std::size_t>(n));
        std::iota(p.begin(), p.end(), 0);
        return Ordering(std::move(p));
    }

    int size() const { return static_cast<int>(perm_.size()); }
    int var_at(int pos) const { return perm_[static_cast<std::size_t>(pos)]; }
    int position_of(int var) const {
        for (std::size_t p = 0; p < perm_.size(); ++p)
            if (perm_[p] == var)
                return static_cast<int>(p);
        throw DomainError("Ordering: unknown variable index");
    }
    const std::vector<int>& perm() const { return perm_; }

    bool operator==(const Ordering&) const = default;
    bool operator<(const Ordering& o) const { return perm_ < o.perm_; }

private:
    std::vector<int> perm_;
};

/// One element of a sequence: a variable together with one of its outcomes.
struct Item {
    int var = 0;
    int outcome = 0;
    bool operator==(const Item&) const = default;
    bool operator<(const Item& o) const {
        return std::pair(var, outcome) < std::pair(o.var, o.outcome);
    }
};

/// A (possibly partial) sequence of outcomes listed in the relative order the
/// ordering dictates. A sequence naming all variables is "full"; the
/// membership set is simply its item set, since no variable repeats.
class Sequence {
public:
    Sequence(Ordering order, std::vector<Item> items)
        : order_(std::move(order)), items_(std::move(items)) {
        int last_pos = -1;
        for (const Item& it : items_) {
            const int pos = order_.position_of(it.var);
            if (pos <= last_pos)
                throw DomainError("Sequence: items out of order (or a variable repeats)");
            last_pos = pos;
        }
    }

    const Ordering& order() const { return order_; }
    const std::vector<Item>& items() const { return items_; }
    bool is_full() const { return static_cast<int>(items_.size()) == order_.size(); }
    bool is_empty() const { return items_.empty(); }

    bool operator==(const Sequence&) const = default;

private:
    Ordering order_;
    std::vector<Item> items_;
};

/// The sequence spaces over a fixed set of variables: E_s enumeration, the
/// subsequence closure F_s, containment sets and the induced meet/join.
/// Enumeration is exponential, so desk-scale bounds (at most 4 variables,
/// alphabets of at most 5) are enforced up front.
class SequenceSpace {
public:
    static constexpr int max_variables = 4;
    static constexpr int max_alphabet = 5;

    explicit SequenceSpace(std::vector<VariableSpec> vars) : vars_(std::move(vars)) {
        if (vars_.empty() || static_cast<int>(vars_.size()) > max_variables)
            throw BoundsError("SequenceSpace: need 1.." + std::to_string(max_variables) +
                              " variables, got " + std::to_string(vars_.size()));
        for (const auto& v : vars_) {
            if (v.alphabet.empty() || static_cast<int>(v.alphabet.size()) > max_alphabet)
                throw BoundsError("SequenceSpace: variable '" + v.name + "' needs 1.." +
                                  std::to_string(max_alphabet) + " outcomes");
            auto sorted = v.alphabet;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                throw DomainError("SequenceSpace: duplicate outcome label in '" + v.name + "'");
        }
        for (std::size_t i = 0; i < vars_.size(); ++i)
            for (std::size_t j = i + 1; j < vars_.size(); ++j)
                if (vars_[i].name == vars_[j].name)
                    throw DomainError("SequenceSpace: duplicate variable name '" + vars_[i].name +
                                      "'");
    }

    int num_vars() const { return static_cast<int>(vars_.size()); }
    const std::vector<VariableSpec>& variables() const { return vars_; }
    int alphabet_size(int var) const {
        return static_cast<int>(vars_[static_cast<std::size_t>(var)].alphabet.size());
    }
    int var_index(const std::string& name) const {
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i].name == name)
                return static_cast<int>(i);
        throw DomainError("SequenceSpace: unknown variable '" + name + "'");
    }
    int outcome_index(int var, const std::string& label) const {
        const auto& alpha = vars_[static_cast<std::size_t>(var)].alphabet;
        for (std::size_t i = 0; i < alpha.size(); ++i)
            if (alpha[i] == label)
                return static_cast<int>(i);
        throw DomainError("SequenceSpace: variable '" + vars_[static_cast<std::size_t>(var)].name +
                          "' has no outcome '" + label + "'");
    }

    long long full_count() const {
        long long c = 1;
        for (const auto& v : vars_)
            c *= static_cast<long long>(v.alphabet.size());
        return c;
    }

    /// All N! orderings, lexicographic by permutation.
    std::vector<Ordering> orderings() const {
        std::vector<int> p(vars_.size());
        std::iota(p.begin(), p.end(), 0);
        std::vector<Ordering> out;
        do {
            out.push_back(Ordering(p));
        } while (std::next_permutation(p.begin(), p.end()));
        return out;
    }

    Ordering ordering_of(const std::vector<std::string>& names) const {
        std::vector<int> p;
        p.reserve(names.size());
        for (const auto& n : names)
            p.push_back(var_index(n));
        if (p.size() != vars_.size())
            throw DomainError("ordering_of: expected " + std::to_string(vars_.size()) +
                              " variable names");
        return Ordering(std::move(p));
    }

    /// Build a sequence from (variable name, outcome label) pairs; the pairs
    /// must already respect the ordering.
    Sequence make(const Ordering& s,
                  const std::vector<std::pair<std::string, std::string>>& named) const {
        std::vector<Item> items;
        items.reserve(named.size());
        for (const auto& [var, outcome] : named) {
            const int v = var_index(var);
            items.push_back({v, outcome_index(v, outcome)});
        }
        return Sequence(s, std::move(items));
    }

    /// E_s: every full sequence with order s. Enumerated with the last
    /// position varying fastest; full_index() matches this order.
    std::vector<Sequence> enumerate_full(const Ordering& s) const {
        require_order(s);
        const int n = num_vars();
        std::vector<Sequence> out;
        out.reserve(static_cast<std::size_t>(full_count()));
        std::vector<int> digits(static_cast<std::size_t>(n), 0);
        while (true) {
            std::vector<Item> items;
            items.reserve(static_cast<std::size_t>(n));
            for (int pos = 0; pos < n; ++pos)
                items.push_back({s.var_at(pos), digits[static_cast<std::size_t>(pos)]});
            out.push_back(Sequence(s, std::move(items)));
            int pos = n - 1;
            while (pos >= 0) {
                auto& d = digits[static_cast<std::size_t>(pos)];
                if (++d < alphabet_size(s.var_at(pos)))
                    break;
                d = 0;
                --pos;
            }
            if (pos < 0)
                break;
        }
        return out;
    }

    /// Index of a full sequence within the enumerate_full() order.
    long long full_index(const Sequence& q) const {
        if (!q.is_full())
            throw DomainError("full_index: sequence is not full");
        long long idx = 0;
        for (int pos = 0; pos < q.order().size(); ++pos) {
            const Item& it = q.items()[static_cast<std::size_t>(pos)];
            idx = idx * alphabet_size(it.var) + it.outcome;
        }
        return idx;
    }

    /// F_s: all subsequences of elements of E_s, including the empty sequence
    /// and the full sequences themselves.
    std::vector<Sequence> enumerate_partial(const Ordering& s) const {
        require_order(s);
        const int n = num_vars();
        std::vector<Sequence> out;
        std::vector<int> digits(static_cast<std::size_t>(n), -1); // -1 = variable absent
        while (true) {
            std::vector<Item> items;
            for (int pos = 0; pos < n; ++pos)
                if (digits[static_cast<std::size_t>(pos)] >= 0)
                    items.push_back({s.var_at(pos), digits[static_cast<std::size_t>(pos)]});
            out.push_back(Sequence(s, std::move(items)));
            int pos = n - 1;
            while (pos >= 0) {
                auto& d = digits[static_cast<std::size_t>(pos)];
                if (++d < alphabet_size(s.var_at(pos)))
                    break;
                d = -1;
                --pos;
            }
            if (pos < 0)
                break;
        }
        return out;
    }

    /// Membership-set containment between sequences of the same order. With no
    /// repeated variables this coincides with "erase elements" subsequence-ness.
    bool contains(const Sequence& partial, const Sequence& full) const {
        if (!(partial.order() == full.order()))
            throw DomainError("contains: sequences have different orders");
        for (const Item& it : partial.items()) {
            bool found = false;
            for (const Item& other : full.items())
                if (other == it) {
                    found = true;
                    break;
                }
            if (!found)
                return false;
        }
        return true;
    }

    /// R_s(q): the full sequences of which q is a subsequence.
    std::vector<Sequence> containing_set(const Sequence& q) const {
        std::vector<Sequence> out;
        for (auto& full : enumerate_full(q.order()))
            if (contains(q, full))
                out.push_back(std::move(full));
        return out;
    }

    /// Meet: R_s(q1) intersected with R_s(q2), as a set of full sequences.
    std::vector<Sequence> meet(const Sequence& q1, const Sequence& q2) const {
        require_same_order(q1, q2);
        std::vector<Sequence> out;
        for (auto& full : enumerate_full(q1.order()))
            if (contains(q1, full) && contains(q2, full))
                out.push_back(std::move(full));
        return out;
    }

    /// Join: R_s(q1) united with R_s(q2).
    std::vector<Sequence> join(const Sequence& q1, const Sequence& q2) const {
        require_same_order(q1, q2);
        std::vector<Sequence> out;
        for (auto& full : enumerate_full(q1.order()))
            if (contains(q1, full) || contains(q2, full))
                out.push_back(std::move(full));
        return out;
    }

    std::string ordering_str(const Ordering& s) const {
        std::string out;
        for (int pos = 0; pos < s.size(); ++pos) {
            if (pos)
                out += ',';
            out += vars_[static_cast<std::size_t>(s.var_at(pos))].name;
        }
        return out;
    }

    std::string sequence_str(const Sequence& q) const {
        std::string out = "(";
        for (std::size_t i = 0; i < q.items().size(); ++i) {
            if (i)
                out += ',';
            const Item& it = q.items()[i];
            out += vars_[static_cast<std::size_t>(it.var)]
                       .alphabet[static_cast<std::size_t>(it.outcome)];
        }
        out += ')';
        return out;
    }

private:
    void require_order(const Ordering& s) const {
        if (s.size() != num_vars())
            throw DomainError("Ordering size " + std::to_string(s.size()) + " does not match " +
                              std::to_string(num_vars()) + " variables");
    }
    void require_same_order(const Sequence& a, const Sequence& b) const {
        if (!(a.order() == b.order()))
            throw DomainError("sequences have different orders");
    }

    std::vector<VariableSpec> vars_;
};

/// A real-valued probability for every full sequence of every ordering.
/// Values are unrestricted in sign; the axioms never require non-negativity.
class ProbabilityAssignment {
public:
    explicit ProbabilityAssignment(SequenceSpace space) : space_(std::move(space)) {
        const double nan = std::nan("");
        for (const auto& s : space_.orderings())
            values_[s.perm()] = std::vector<double>(static_cast<std::size_t>(space_.full_count()),
                                                    nan);
    }

    const SequenceSpace& space() const { return space_; }

    void set(const Sequence& full, double value) {
        values_.at(full.order().perm())[static_cast<std::size_t>(space_.full_index(full))] = value;
    }

    double at(const Sequence& full) const {
        const double v =
            values_.at(full.order().perm())[static_cast<std::size_t>(space_.full_index(full))];
        if (std::isnan(v))
            throw DomainError("ProbabilityAssignment: value not set for " +
                              space_.sequence_str(full));
        return v;
    }

    /// Values for an ordering, aligned with enumerate_full().
    const std::vector<double>& values(const Ordering& s) const { return values_.at(s.perm()); }

    void scale_ordering(const Ordering& s, double factor) {
        for (double& v : values_.at(s.perm()))
            v *= factor;
    }

    bool complete() const {
        for (const auto& [perm, vals] : values_)
            for (double v : vals)
                if (std::isnan(v))
                    return false;
        return true;
    }

    /// Two-variable assignment from a joint and the joint of the opposite
    /// ordering. Variable 0 is the row variable of `forward`, variable 1 its
    /// column variable (which precedes it).
    static ProbabilityAssignment from_joints(const JointDist& forward, const JointDist& reverse) {
        if (reverse.rows() != forward.cols() || reverse.cols() != forward.rows())
            throw DimensionError("from_joints: reverse joint has transposed shape mismatch");
        if (!(reverse.order() == forward.order().reversed()))
            throw DomainError("from_joints: reverse joint must carry the opposite ordering tag");
        SequenceSpace space({{forward.order().following, forward.row_labels()},
                             {forward.order().preceding, forward.col_labels()}});
        ProbabilityAssignment p(space);
        const Ordering s_fwd({1, 0}); // column variable precedes: sequence (b, a)
        const Ordering s_rev({0, 1});
        for (Index i = 0; i < forward.rows(); ++i)
            for (Index j = 0; j < forward.cols(); ++j) {
                p.set(Sequence(s_fwd, {{1, static_cast<int>(j)}, {0, static_cast<int>(i)}}),
                      forward.entries()(i, j));
                p.set(Sequence(s_rev, {{0, static_cast<int>(i)}, {1, static_cast<int>(j)}}),
                      reverse.entries()(j, i));
            }
        return p;
    }

    /// As from_joints, deriving the opposite ordering from the joint itself.
    static ProbabilityAssignment from_joint(const JointDist& forward, const Tolerances& tol = {}) {
        return from_joints(forward, reverse_joint(forward, tol));
    }

    /// Ordering-independent assignment from a dense tensor indexed by outcome
    /// indices (variable 0 slowest). Satisfies every axiom by construction
    /// whenever the tensor is normalized.
    static ProbabilityAssignment symmetric(const SequenceSpace& space,
                                           const std::vector<double>& tensor) {
        if (static_cast<long long>(tensor.size()) != space.full_count())
            throw DimensionError("symmetric: tensor has " + std::to_string(tensor.size()) +
                                 " entries, expected " + std::to_string(space.full_count()));
        ProbabilityAssignment p(space);
        for (const auto& s : space.orderings())
            for (const auto& full : space.enumerate_full(s)) {
                long long idx = 0;
                std::vector<int> by_var(static_cast<std::size_t>(space.num_vars()));
                for (const Item& it : full.items())
                    by_var[static_cast<std::size_t>(it.var)] = it.outcome;
                for (int v = 0; v < space.num_vars(); ++v)
                    idx = idx * space.alphabet_size(v) + by_var[static_cast<std::size_t>(v)];
                p.set(full, tensor[static_cast<std::size_t>(idx)]);
            }
        return p;
    }

private:
    SequenceSpace space_;
    std::map<std::vector<int>, std::vector<double>> values_;
};

/// Marginal of a partial sequence: the sum of the assignment over R_s(q).
inline double marginal(const ProbabilityAssignment& p, const Sequence& q) {
    double sum = 0.0;
    for (const auto& full : p.space().containing_set(q))
        sum += p.at(full);
    return sum;
}

struct AxiomViolation {
    std::string ordering;
    std::string sequence;
    double magnitude = 0.0;
};

struct AxiomCheck {
    bool pass = true;
    std::size_t violation_count = 0;
    std::vector<AxiomViolation> violations; ///< capped at max_reported

    static constexpr std::size_t max_reported = 100;

    void add(AxiomViolation v) {
        pass = false;
        ++violation_count;
        if (violations.size() < max_reported)
            violations.push_back(std::move(v));
    }
};

struct AxiomReport {
    AxiomCheck normalization; ///< P(E_s) = 1 for every ordering
    AxiomCheck additivity;    ///< P(Q1 u Q2) = P(Q1) + P(Q2) for disjoint pairs
    AxiomCheck causality;     ///< marginals agree across orderings sharing a sequence

    bool pass() const { return normalization.pass && additivity.pass && causality.pass; }
};

namespace detail {

// Bitmask over E_s, one word per 64 full sequences.
using Mask = std::vector<std::uint64_t>;

inline bool disjoint(const Mask& a, const Mask& b) {
    for (std::size_t w = 0; w < a.size(); ++w)
        if (a[w] & b[w])
            return false;
    return true;
}

} // namespace detail

/// Verify a complete assignment against the sequence axioms: per-ordering
/// normalization, additivity over all disjoint pairs of partial sequences, and
/// the cross-ordering consistency of marginals. Failures land in the report;
/// nothing is thrown for them and negative values are not, by themselves,
/// violations.
inline AxiomReport check_axioms(const ProbabilityAssignment& p, double tol) {
    if (!(tol > 0.0))
        throw DomainError("check_axioms: tol must be positive");
    if (!p.complete())
        throw DomainError("check_axioms: assignment is not fully specified");
    const SequenceSpace& space = p.space();
    AxiomReport report;

    // key: the item list itself; sequences shared between orderings collide here
    std::map<std::vector<Item>, std::vector<std::pair<std::string, double>>> shared;

    for (const auto& s : space.orderings()) {
        const auto full = space.enumerate_full(s);
        const auto& vals = p.values(s);
        const std::string s_str = space.ordering_str(s);

        const double total = std::accumulate(vals.begin(), vals.end(), 0.0);
        if (!(std::abs(total - 1.0) <= tol))
            report.normalization.add({s_str, "E_s", std::abs(total - 1.0)});

        const auto partials = space.enumerate_partial(s);
        const std::size_t words = (full.size() + 63) / 64;
        std::vector<detail::Mask> masks(partials.size(), detail::Mask(words, 0));
        std::vector<double> margs(partials.size(), 0.0);
        for (std::size_t qi = 0; qi < partials.size(); ++qi) {
            for (std::size_t f = 0; f < full.size(); ++f)
                if (space.contains(partials[qi], full[f])) {
                    masks[qi][f / 64] |= (std::uint64_t{1} << (f % 64));
                    margs[qi] += vals[f];
                }
            shared[partials[qi].items()].emplace_back(s_str, margs[qi]);
        }

        for (std::size_t i = 0; i < partials.size(); ++i)
            for (std::size_t j = i + 1; j < partials.size(); ++j) {
                if (!detail::disjoint(masks[i], masks[j]))
                    continue;
                // sum over the union, computed independently of the two marginals
                double union_sum = 0.0;
                for (std::size_t w = 0; w < masks[i].size(); ++w) {
                    std::uint64_t bits = masks[i][w] | masks[j][w];
                    while (bits) {
                        const int b = std::countr_zero(bits);
                        union_sum += vals[w * 64 + static_cast<std::size_t>(b)];
                        bits &= bits - 1;
                    }
                }
                const double gap = std::abs(union_sum - (margs[i] + margs[j]));
                if (!(gap <= tol))
                    report.additivity.add({s_str,
                                           space.sequence_str(partials[i]) + " + " +
                                               space.sequence_str(partials[j]),
                                           gap});
            }
    }

    for (const auto& [items, entries] : shared) {
        if (entries.size() < 2)
            continue;
        double lo = entries[0].second, hi = entries[0].second;
        for (const auto& [_, m] : entries) {
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
        if (!(hi - lo <= tol)) {
            std::string orderings;
            for (const auto& [name, _] : entries) {
                if (!orderings.empty())
                    orderings += " vs ";
                orderings += name;
            }
            std::string seq_str = "(";
            for (std::size_t i = 0; i < items.size(); ++i) {
                if (i)
                    seq_str += ',';
                seq_str += space.variables()[static_cast<std::size_t>(items[i].var)]
                               .alphabet[static_cast<std::size_t>(items[i].outcome)];
            }
            seq_str += ')';
            report.causality.add({orderings, seq_str, hi - lo});
        }
    }
    return report;
}

} // namespace qinfer::seqprob
