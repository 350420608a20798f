#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "qinfer/inference.hpp"
#include "support/corpus.hpp"

using namespace qinfer;
using namespace qinfer::inference;
using Catch::Approx;

namespace {

JointDist fixture_joint() {
    Matrix m(2, 2);
    m << 0.3, 0.2,
         0.1, 0.4;
    return JointDist(m);
}

StochasticMatrix fixture_model() {
    return rules::RuleContext::from_joint(fixture_joint()).model;
}

} // namespace

TEST_CASE("estimate_from_counts") {
    auto even = estimate_from_counts({5, 5});
    CHECK(even.n == 10);
    CHECK(even.estimate.entries()(0) == Approx(0.5));

    auto degenerate = estimate_from_counts({1, 0});
    CHECK(degenerate.estimate.entries()(0) == Approx(1.0));
    CHECK(degenerate.estimate.entries()(1) == Approx(0.0));

    auto skewed = estimate_from_counts({3, 7});
    CHECK(skewed.estimate.entries()(0) == Approx(0.3));
    CHECK(skewed.estimate.entries()(1) == Approx(0.7));

    CHECK_THROWS_AS(estimate_from_counts({0, 0}), EmptySampleError);
    CHECK_THROWS_AS(estimate_from_counts({-1, 2}), DomainError);
}

TEST_CASE("infer_hidden_marginal on the fixture") {
    auto model = fixture_model();
    Vector exact(2);
    exact << 0.5, 0.5;
    auto hidden = infer_hidden_marginal(model, QuasiVector(exact, model.row_labels()));
    CHECK(hidden.entries()(0) == Approx(0.4).margin(1e-13));
    CHECK(hidden.entries()(1) == Approx(0.6).margin(1e-13));

    Vector off(2); // model^{-1} (0.6, 0.4) = (0.64, 0.36) by exact arithmetic
    off << 0.6, 0.4;
    auto skewed = infer_hidden_marginal(model, QuasiVector(off, model.row_labels()));
    CHECK(skewed.entries()(0) == Approx(0.64).margin(1e-13));
    CHECK(skewed.entries()(1) == Approx(0.36).margin(1e-13));
}

TEST_CASE("infer_hidden_marginal with an identity model returns the input") {
    Vector v(3);
    v << 0.2, 0.5, 0.3;
    auto out = infer_hidden_marginal(StochasticMatrix(Matrix::Identity(3, 3)), QuasiVector(v));
    CHECK((out.entries() - v).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("posterior_with_inferred_prior reproduces the classical posterior at the truth") {
    auto model = fixture_model();
    Vector exact(2);
    exact << 0.5, 0.5;
    auto result = posterior_with_inferred_prior(model, ProbVector(exact, model.row_labels()));
    Matrix expected(2, 2);
    expected << 0.6, 0.2,
                0.4, 0.8;
    CHECK((result.posterior.entries() - expected).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(result.diagnostics.max_colsum_dev < 1e-13);
    CHECK_FALSE(result.diagnostics.prior_has_negative);
}

TEST_CASE("posterior_with_inferred_prior: identity model") {
    Vector v(2);
    v << 0.3, 0.7;
    auto result =
        posterior_with_inferred_prior(StochasticMatrix(Matrix::Identity(2, 2)), ProbVector(v));
    CHECK(result.posterior.entries().isIdentity(1e-13));
}

TEST_CASE("posterior_with_inferred_prior: columns sum to 1 away from the truth") {
    auto model = fixture_model();
    Vector off(2);
    off << 0.6, 0.4;
    auto result = posterior_with_inferred_prior(model, ProbVector(off, model.row_labels()));
    // Diag[(0.64,0.36)] model^T Diag[(0.6,0.4)]^{-1}
    Matrix expected(2, 2);
    expected << 0.64 * 0.75 / 0.6, 0.64 * 0.25 / 0.4,
                0.36 * (1.0 / 3.0) / 0.6, 0.36 * (2.0 / 3.0) / 0.4;
    CHECK((result.posterior.entries() - expected).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(result.diagnostics.max_colsum_dev < 1e-13);
}

TEST_CASE("posterior_with_inferred_prior rejects observations without full support") {
    auto model = fixture_model();
    Vector degenerate(2);
    degenerate << 1.0, 0.0;
    CHECK_THROWS_AS(
        posterior_with_inferred_prior(model, ProbVector(degenerate, model.row_labels())),
        ZeroMarginalError);
}

TEST_CASE("column_sum_diagnostic: third-order posterior flags wrong marginals") {
    auto joint = fixture_joint();
    auto ctx = rules::RuleContext::from_joint(joint);
    auto third = rules::parse_rule("compose:bayes,inversion,bayes");

    auto exact_post = rules::posterior_from_r(rules::build_rule(third, ctx), ctx);
    auto devs = column_sum_diagnostic(exact_post);
    CHECK(*std::max_element(devs.begin(), devs.end()) < 1e-12);

    Vector wrong(2);
    wrong << 0.55, 0.45;
    rules::RuleContext skewed{ctx.model, ctx.prior_b, QuasiVector(wrong, ctx.prior_a.labels())};
    auto skewed_post = rules::posterior_from_r(rules::build_rule(third, skewed), skewed);
    auto skewed_devs = column_sum_diagnostic(skewed_post);
    CHECK(*std::max_element(skewed_devs.begin(), skewed_devs.end()) > 0.01);
}

TEST_CASE("column_sum_diagnostic: first-order posteriors are insensitive") {
    auto ctx = rules::RuleContext::from_joint(fixture_joint());
    for (const char* spec : {"bayes", "inversion", "mix:0.5"}) {
        auto post = rules::posterior_from_r(rules::build_rule(rules::parse_rule(spec), ctx), ctx);
        auto devs = column_sum_diagnostic(post);
        CHECK(*std::max_element(devs.begin(), devs.end()) < 1e-10);
    }
}

TEST_CASE("clip_project clamps and renormalizes, as an explicit opt-in step") {
    Vector quasi(3);
    quasi << 1.2, -0.4, 0.2;
    auto projected = clip_project(QuasiVector(quasi));
    CHECK(projected.entries()(0) == Approx(1.2 / 1.4));
    CHECK(projected.entries()(1) == 0.0);
    CHECK(projected.entries()(2) == Approx(0.2 / 1.4));

    // a quasi vector with no positive mass cannot be projected
    CHECK_THROWS_AS(clip_project(QuasiVector(Vector::Zero(2), {}, {1e9, 1e8, 1e-12})),
                    DomainError);
}

TEST_CASE("property: inferred marginal sums to 1 when the input does") {
    auto joints = testsupport::corpus(/*seed=*/5501, /*count_per_dim=*/40, 2, 6);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    for (const auto& joint : joints) {
        auto ctx = rules::RuleContext::from_joint(joint);
        Vector observed = ctx.prior_a.entries();
        double shift = u(rng);
        observed(0) += shift;
        observed(1) -= shift;
        auto hidden = infer_hidden_marginal(ctx.model, QuasiVector(observed, {}, {1e-6, 1e8, 1e-12}));
        CHECK(std::abs(hidden.entries().sum() - 1.0) < 1e-10);
    }
}

TEST_CASE("property: inferred-prior posterior matches the classical one at the truth") {
    auto joints = testsupport::corpus(/*seed=*/5502, /*count_per_dim=*/100, 2, 6);
    REQUIRE(joints.size() == 500);
    for (const auto& joint : joints) {
        auto ctx = rules::RuleContext::from_joint(joint);
        auto [pa, pb] = marginals(joint);
        auto result = posterior_with_inferred_prior(
            ctx.model, ProbVector(pa.entries(), pa.labels()));
        Matrix classical = pb.entries().asDiagonal() * ctx.model.entries().transpose() *
                           pa.entries().cwiseInverse().asDiagonal();
        CHECK((result.posterior.entries() - classical).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("property: inferred-prior posterior columns sum to 1 off the truth too") {
    auto joints = testsupport::corpus(/*seed=*/5503, /*count_per_dim=*/40, 2, 5);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    for (const auto& joint : joints) {
        auto ctx = rules::RuleContext::from_joint(joint);
        Vector observed = ctx.prior_a.entries();
        for (Index i = 0; i < observed.size(); ++i)
            observed(i) *= u(rng);
        observed /= observed.sum();
        auto result = posterior_with_inferred_prior(
            ctx.model, ProbVector(observed, ctx.prior_a.labels()));
        CHECK(result.diagnostics.max_colsum_dev < 1e-10);
    }
}

TEST_CASE("perturbation scan: exact input gives zero error, scaling is linear") {
    auto joint = fixture_joint();
    auto rule = rules::parse_rule("bayes");

    auto rows = perturbation_scan(joint, rule, {1e-2, 1e-3});
    // the map is affine: ||model^{-1} (eps, -eps)||_1 = 4.8 eps on the fixture
    CHECK(rows[0].err_prior_l1 == Approx(0.048).epsilon(1e-10));
    CHECK(rows[1].err_prior_l1 == Approx(0.0048).epsilon(1e-10));
    const double ratio = rows[0].err_prior_l1 / rows[1].err_prior_l1;
    CHECK(ratio > 9.0);
    CHECK(ratio < 11.0);
}

TEST_CASE("convergence_experiment: exact-input limit has zero error") {
    // feeding the exact marginal through the same pipeline: eps = 0 scan
    auto rows = perturbation_scan(fixture_joint(), rules::parse_rule("bayes"), {0.0});
    CHECK(rows[0].err_prior_l1 < 1e-14);
    CHECK(rows[0].err_posterior_l1 < 1e-13);
}

TEST_CASE("convergence_experiment: deterministic and seed-sensitive") {
    auto joint = fixture_joint();
    auto rule = rules::parse_rule("bayes");
    auto a = convergence_experiment(joint, rule, {100, 1000}, 5, 42);
    auto b = convergence_experiment(joint, rule, {100, 1000}, 5, 42);
    REQUIRE(a.rows.size() == 10);
    CHECK(a.to_csv() == b.to_csv());

    auto c = convergence_experiment(joint, rule, {100, 1000}, 5, 43);
    CHECK(a.to_csv() != c.to_csv());
}

TEST_CASE("convergence_experiment: error shrinks with sample size") {
    auto joint = fixture_joint();
    auto report = convergence_experiment(joint, rules::parse_rule("bayes"), {100, 100000}, 20, 7);
    auto median_err = [&](long long n) {
        std::vector<double> errs;
        for (const auto& r : report.rows)
            if (r.n == n)
                errs.push_back(r.err_prior_l1);
        std::sort(errs.begin(), errs.end());
        return errs[errs.size() / 2];
    };
    CHECK(median_err(100000) < median_err(100));
}

TEST_CASE("convergence_experiment rejects bad arguments and product truths") {
    auto joint = fixture_joint();
    auto rule = rules::parse_rule("bayes");
    CHECK_THROWS_AS(convergence_experiment(joint, rule, {}, 5, 1), DomainError);
    CHECK_THROWS_AS(convergence_experiment(joint, rule, {100}, 0, 1), DomainError);
    CHECK_THROWS_AS(convergence_experiment(joint, rule, {100}, 5, 1, "l7"), DomainError);

    Vector pa(2), pb(2);
    pa << 0.5, 0.5;
    pb << 0.4, 0.6;
    JointDist product(pa * pb.transpose());
    CHECK_THROWS_AS(convergence_experiment(product, rule, {100}, 5, 1), SingularError);
}

TEST_CASE("experiment rows carry reproducible substream seeds") {
    auto report = convergence_experiment(fixture_joint(), rules::parse_rule("bayes"), {100}, 3, 42);
    CHECK(report.rows[0].seed == substream_seed(42, 100, 0));
    CHECK(report.rows[1].seed == substream_seed(42, 100, 1));
    CHECK(report.rows[0].seed != report.rows[1].seed);
}
