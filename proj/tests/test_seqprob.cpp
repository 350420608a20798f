#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

#include "qinfer/seqprob.hpp"
#include "qinfer/dist.hpp"

using namespace qinfer;
using namespace qinfer::seqprob;
using Catch::Approx;

namespace {

JointDist fixture_joint() {
    Matrix m(2, 2);
    m << 0.3, 0.2,
         0.1, 0.4;
    return JointDist(m);
}

SequenceSpace binary_ab() {
    return SequenceSpace({{"A", {"a1", "a2"}}, {"B", {"b1", "b2"}}});
}

// Independent subsequence notion: q is obtained from full by erasing elements.
bool erase_subsequence(const Sequence& q, const Sequence& full) {
    std::size_t pos = 0;
    for (const Item& it : full.items()) {
        if (pos < q.items().size() && q.items()[pos] == it)
            ++pos;
    }
    return pos == q.items().size();
}

} // namespace

TEST_CASE("enumerate_full counts") {
    SequenceSpace single({{"A", {"a1", "a2"}}});
    CHECK(single.enumerate_full(Ordering::identity(1)).size() == 2);

    auto ab = binary_ab();
    const Ordering b_then_a({1, 0});
    CHECK(ab.enumerate_full(b_then_a).size() == 4);

    SequenceSpace triple({{"X", {"x1", "x2"}},
                          {"Y", {"y1", "y2", "y3"}},
                          {"Z", {"z1", "z2"}}});
    for (const auto& s : triple.orderings())
        CHECK(triple.enumerate_full(s).size() == 12);
    CHECK(triple.orderings().size() == 6);
}

TEST_CASE("containing set of full, empty, and single-variable sequences") {
    auto ab = binary_ab();
    const Ordering s({1, 0}); // B then A

    auto full = ab.make(s, {{"B", "b1"}, {"A", "a1"}});
    auto r_full = ab.containing_set(full);
    REQUIRE(r_full.size() == 1);
    CHECK(r_full[0] == full);

    auto empty = Sequence(s, {});
    CHECK(ab.containing_set(empty).size() == 4);

    auto b1 = ab.make(s, {{"B", "b1"}});
    auto r_b1 = ab.containing_set(b1);
    REQUIRE(r_b1.size() == 2);
    for (const auto& q : r_b1)
        CHECK(q.items().front() == Item{1, 0});
}

TEST_CASE("meet and join") {
    auto ab = binary_ab();
    const Ordering s({1, 0});

    auto b1 = ab.make(s, {{"B", "b1"}});
    CHECK(ab.meet(b1, b1).size() == ab.containing_set(b1).size()); // idempotent

    auto a1 = ab.make(s, {{"A", "a1"}});
    auto a2 = ab.make(s, {{"A", "a2"}});
    CHECK(ab.meet(a1, a2).empty()); // sibling outcomes are disjoint

    auto both = ab.meet(b1, a1);
    REQUIRE(both.size() == 1);
    CHECK(both[0] == ab.make(s, {{"B", "b1"}, {"A", "a1"}}));

    CHECK(ab.join(a1, a2).size() == 4);
    CHECK_THROWS_AS(ab.meet(b1, ab.make(Ordering({0, 1}), {{"A", "a1"}})), DomainError);
}

TEST_CASE("sequences must respect their ordering") {
    auto ab = binary_ab();
    const Ordering s({1, 0});
    CHECK_THROWS_AS(ab.make(s, {{"A", "a1"}, {"B", "b1"}}), DomainError); // wrong order
    CHECK_THROWS_AS(ab.make(s, {{"B", "b1"}, {"B", "b2"}}), DomainError); // repeat
}

TEST_CASE("marginals of the fixture assignment") {
    auto p = ProbabilityAssignment::from_joint(fixture_joint());
    const auto& space = p.space();
    const Ordering b_then_a({1, 0});
    const Ordering a_then_b({0, 1});

    auto full = space.make(b_then_a, {{"B", "b1"}, {"A", "a1"}});
    CHECK(marginal(p, full) == Approx(0.3).margin(1e-15)); // full sequence: the value itself

    CHECK(marginal(p, Sequence(b_then_a, {})) == Approx(1.0).margin(1e-12));

    // the single-outcome marginal agrees under both orderings
    auto a1_fwd = space.make(b_then_a, {{"A", "a1"}});
    auto a1_rev = space.make(a_then_b, {{"A", "a1"}});
    CHECK(marginal(p, a1_fwd) == Approx(0.5).margin(1e-12));
    CHECK(marginal(p, a1_rev) == Approx(0.5).margin(1e-12));
}

TEST_CASE("check_axioms passes for a joint with its reverse, negatives included") {
    auto p = ProbabilityAssignment::from_joint(fixture_joint());
    // the reverse-ordering values do contain negatives
    const Ordering a_then_b({0, 1});
    const auto& vals = p.values(a_then_b);
    CHECK(*std::min_element(vals.begin(), vals.end()) < 0.0);

    auto report = check_axioms(p, 1e-10);
    CHECK(report.normalization.pass);
    CHECK(report.additivity.pass);
    CHECK(report.causality.pass);
    CHECK(report.pass());
}

TEST_CASE("check_axioms passes for a symmetric assignment") {
    auto space = binary_ab();
    // any normalized tensor used identically for every ordering satisfies all
    // axioms
    auto p = ProbabilityAssignment::symmetric(space, {0.3, 0.2, 0.1, 0.4});
    CHECK(check_axioms(p, 1e-12).pass());
}

TEST_CASE("check_axioms passes for a joint paired with its transpose") {
    // using the transposed joint for the opposite ordering makes the
    // assignment ordering-independent, the classical special case
    auto joint = fixture_joint();
    JointDist transposed(joint.entries().transpose(), joint.order().reversed(),
                         joint.col_labels(), joint.row_labels());
    auto p = ProbabilityAssignment::from_joints(joint, transposed);
    CHECK(check_axioms(p, 1e-12).pass());
}

TEST_CASE("violation reports are capped but counted in full") {
    SequenceSpace space({{"W", {"w1", "w2", "w3"}},
                         {"X", {"x1", "x2", "x3"}},
                         {"Y", {"y1", "y2"}},
                         {"Z", {"z1", "z2"}}});
    std::vector<double> tensor(36, 1.0 / 36.0);
    auto p = ProbabilityAssignment::symmetric(space, tensor);
    // scaling one ordering breaks every marginal shared with the other 23
    p.scale_ordering(space.orderings().front(), 1.1);
    auto report = check_axioms(p, 1e-10);
    CHECK_FALSE(report.pass());
    CHECK(report.causality.violation_count > AxiomCheck::max_reported);
    CHECK(report.causality.violations.size() == AxiomCheck::max_reported);
}

TEST_CASE("check_axioms flags a scaled ordering: normalization and causality fail") {
    auto p = ProbabilityAssignment::from_joint(fixture_joint());
    p.scale_ordering(Ordering({0, 1}), 1.1);
    auto report = check_axioms(p, 1e-10);
    CHECK_FALSE(report.normalization.pass);
    CHECK_FALSE(report.causality.pass);
    CHECK(report.additivity.pass); // scaling preserves additivity within the ordering
    CHECK(report.normalization.violations.front().magnitude == Approx(0.1).margin(1e-9));
}

TEST_CASE("check_axioms: three variables, symmetric construction") {
    SequenceSpace space({{"X", {"x1", "x2", "x3"}},
                         {"Y", {"y1", "y2"}},
                         {"Z", {"z1", "z2", "z3"}}});
    // normalized tensor of 18 entries
    std::vector<double> tensor(18);
    double total = 0.0;
    for (std::size_t i = 0; i < tensor.size(); ++i) {
        tensor[i] = static_cast<double>(i % 5) + 1.0;
        total += tensor[i];
    }
    for (auto& v : tensor)
        v /= total;
    auto p = ProbabilityAssignment::symmetric(space, tensor);
    CHECK(check_axioms(p, 1e-10).pass());
}

TEST_CASE("negative values alone do not violate the axioms") {
    auto space = binary_ab();
    // signed but ordering-symmetric and normalized
    auto p = ProbabilityAssignment::symmetric(space, {0.6, -0.2, 0.1, 0.5});
    CHECK(check_axioms(p, 1e-12).pass());
}

TEST_CASE("desk-scale bounds are enforced") {
    std::vector<VariableSpec> five(5, VariableSpec{"V", {"v1"}});
    for (std::size_t i = 0; i < five.size(); ++i)
        five[i].name = "V" + std::to_string(i);
    CHECK_THROWS_AS(SequenceSpace(five), BoundsError);
    CHECK_THROWS_AS(SequenceSpace({{"A", {"1", "2", "3", "4", "5", "6"}}}), BoundsError);
    CHECK_THROWS_AS(SequenceSpace({VariableSpec{"A", {}}}), BoundsError);
    CHECK_THROWS_AS(SequenceSpace({{"A", {"x", "x"}}}), DomainError);
}

TEST_CASE("property: containing-set size is the product of absent alphabet sizes") {
    SequenceSpace space({{"P", {"p1", "p2"}},
                         {"Q", {"q1", "q2", "q3"}},
                         {"R", {"r1", "r2", "r3", "r4"}}});
    for (const auto& s : space.orderings()) {
        for (const auto& q : space.enumerate_partial(s)) {
            long long expected = 1;
            std::set<int> present;
            for (const Item& it : q.items())
                present.insert(it.var);
            for (int v = 0; v < space.num_vars(); ++v)
                if (!present.count(v))
                    expected *= space.alphabet_size(v);
            CHECK(static_cast<long long>(space.containing_set(q).size()) == expected);
        }
    }
}

TEST_CASE("property: membership containment equals erase-elements subsequence") {
    SequenceSpace space({{"P", {"p1", "p2", "p3"}},
                         {"Q", {"q1", "q2"}},
                         {"R", {"r1", "r2", "r3"}}});
    for (const auto& s : space.orderings()) {
        const auto full = space.enumerate_full(s);
        for (const auto& q : space.enumerate_partial(s))
            for (const auto& f : full)
                CHECK(space.contains(q, f) == erase_subsequence(q, f));
    }
}

TEST_CASE("property: additivity is exact for disjoint unions") {
    auto p = ProbabilityAssignment::from_joint(fixture_joint());
    const auto& space = p.space();
    for (const auto& s : space.orderings()) {
        const auto partials = space.enumerate_partial(s);
        for (std::size_t i = 0; i < partials.size(); ++i)
            for (std::size_t j = i + 1; j < partials.size(); ++j) {
                if (!space.meet(partials[i], partials[j]).empty())
                    continue;
                double union_sum = 0.0;
                for (const auto& f : space.join(partials[i], partials[j]))
                    union_sum += p.at(f);
                CHECK(union_sum ==
                      Approx(marginal(p, partials[i]) + marginal(p, partials[j])).margin(1e-12));
            }
    }
}

TEST_CASE("assignment requires values for every full sequence") {
    auto space = binary_ab();
    ProbabilityAssignment p(space);
    CHECK_FALSE(p.complete());
    CHECK_THROWS_AS(check_axioms(p, 1e-10), DomainError);
}
