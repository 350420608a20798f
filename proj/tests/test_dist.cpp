#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qinfer/dist.hpp"
#include "qinfer/oracle.hpp"
#include "support/corpus.hpp"

using namespace qinfer;
using Catch::Approx;

namespace {

JointDist fixture_joint() {
    Matrix m(2, 2);
    m << 0.3, 0.2,
         0.1, 0.4;
    return JointDist(m);
}

Matrix fixture_conditional() {
    // exact rationals: [[3/4, 1/3], [1/4, 2/3]]
    Matrix m(2, 2);
    m << 3.0 / 4.0, 1.0 / 3.0,
         1.0 / 4.0, 2.0 / 3.0;
    return m;
}

} // namespace

TEST_CASE("marginals of the fixture joint") {
    auto [pa, pb] = marginals(fixture_joint());
    CHECK(pa.entries()(0) == Approx(0.5).margin(1e-15));
    CHECK(pa.entries()(1) == Approx(0.5).margin(1e-15));
    CHECK(pb.entries()(0) == Approx(0.4).margin(1e-15));
    CHECK(pb.entries()(1) == Approx(0.6).margin(1e-15));
    CHECK(pa.labels() == Labels{"a1", "a2"});
    CHECK(pb.labels() == Labels{"b1", "b2"});
}

TEST_CASE("marginals of the uniform joint") {
    auto [pa, pb] = marginals(JointDist(Matrix::Constant(2, 2, 0.25)));
    CHECK(pa.entries().isApproxToConstant(0.5, 1e-15));
    CHECK(pb.entries().isApproxToConstant(0.5, 1e-15));
}

TEST_CASE("marginals of the reverse joint swap roles") {
    auto rev = reverse_joint(fixture_joint());
    auto [pb, pa] = marginals(rev);
    CHECK(pb.entries()(0) == Approx(0.4).margin(1e-12));
    CHECK(pb.entries()(1) == Approx(0.6).margin(1e-12));
    CHECK(pa.entries()(0) == Approx(0.5).margin(1e-12));
    CHECK(pa.entries()(1) == Approx(0.5).margin(1e-12));
}

TEST_CASE("conditional of the fixture joint") {
    auto cond = conditional_from_joint(fixture_joint());
    CHECK(cond.dropped_columns.empty());
    CHECK((cond.matrix.entries() - fixture_conditional()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("conditional of a product joint repeats the row marginal") {
    Vector pa(2), pb(2);
    pa << 0.7, 0.3;
    pb << 0.4, 0.6;
    JointDist joint(pa * pb.transpose());
    auto cond = conditional_from_joint(joint);
    for (Index j = 0; j < 2; ++j) {
        CHECK(cond.matrix.entries()(0, j) == Approx(0.7).margin(1e-15));
        CHECK(cond.matrix.entries()(1, j) == Approx(0.3).margin(1e-15));
    }
}

TEST_CASE("conditional with an empty column needs support restriction") {
    Matrix m(2, 3);
    m << 0.3, 0.0, 0.2,
         0.1, 0.0, 0.4;
    JointDist joint(m, VarOrder{}, {}, {"b1", "b2", "b3"});
    CHECK_THROWS_AS(conditional_from_joint(joint), ZeroMarginalError);

    auto cond = conditional_from_joint(joint, {}, /*restrict_support=*/true);
    REQUIRE(cond.dropped_columns == std::vector<Index>{1});
    CHECK(cond.matrix.entries().col(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(cond.matrix.entries().col(0).sum() == Approx(1.0).margin(1e-12));
    CHECK(cond.matrix.entries().col(2).sum() == Approx(1.0).margin(1e-12));
}

TEST_CASE("joint_from_model round-trips the fixture") {
    auto joint = fixture_joint();
    auto cond = conditional_from_joint(joint);
    Vector pb(2);
    pb << 0.4, 0.6;
    auto rebuilt = joint_from_model(cond.matrix, QuasiVector(pb, joint.col_labels()));
    CHECK((rebuilt.entries() - joint.entries()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("joint_from_model with an identity model is diagonal") {
    Vector prior(3);
    prior << 0.2, 0.3, 0.5;
    auto joint = joint_from_model(QuasiStochasticMatrix(Matrix::Identity(3, 3)),
                                  QuasiVector(prior));
    CHECK(joint.entries().diagonal().isApprox(prior, 1e-15));
    CHECK(joint.entries().sum() == Approx(1.0).margin(1e-15));
}

TEST_CASE("joint_from_model with a point-mass prior picks one column") {
    Matrix model(2, 2);
    model << 0.5, 0.9,
             0.5, 0.1;
    Vector prior(2);
    prior << 1.0, 0.0;
    auto joint = joint_from_model(QuasiStochasticMatrix(model), QuasiVector(prior));
    CHECK(joint.entries()(0, 0) == Approx(0.5).margin(1e-15));
    CHECK(joint.entries()(1, 0) == Approx(0.5).margin(1e-15));
    CHECK(joint.entries().col(1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("joint_from_model rejects dimension mismatch") {
    Vector prior(3);
    prior << 0.2, 0.3, 0.5;
    CHECK_THROWS_AS(joint_from_model(QuasiStochasticMatrix(Matrix::Identity(2, 2)),
                                     QuasiVector(prior)),
                    DimensionError);
}

TEST_CASE("invert: identity") {
    auto res = invert(Matrix::Identity(3, 3));
    CHECK(res.inverse.isIdentity(1e-15));
    CHECK(res.residual < 1e-15);
    CHECK(res.cond == Approx(1.0));
}

TEST_CASE("invert: fixture conditional, exact rational inverse") {
    auto res = invert(fixture_conditional());
    Matrix expected(2, 2); // [[8/5, -4/5], [-3/5, 9/5]]
    expected << 1.6, -0.8,
                -0.6, 1.8;
    CHECK((res.inverse - expected).cwiseAbs().maxCoeff() < 1e-14);
    // columns of the inverse of a column-stochastic matrix still sum to 1
    CHECK(res.inverse.col(0).sum() == Approx(1.0).margin(1e-14));
    CHECK(res.inverse.col(1).sum() == Approx(1.0).margin(1e-14));
}

TEST_CASE("invert: rank-1 product conditional is singular") {
    Vector pa(2), pb(2);
    pa << 0.7, 0.3;
    pb << 0.4, 0.6;
    auto cond = conditional_from_joint(JointDist(pa * pb.transpose()));
    CHECK_THROWS_AS(invert(cond.matrix.entries()), SingularError);
}

TEST_CASE("invert: non-square and ill-conditioned inputs") {
    CHECK_THROWS_AS(invert(Matrix::Ones(2, 3)), NotSquareError);

    Matrix nearly(2, 2);
    nearly << 1.0, 1.0,
              1.0, 1.0 + 1e-7;
    Tolerances strict;
    strict.cond_max = 1e3;
    CHECK_THROWS_AS(invert(nearly, strict), IllConditionedError);
}

TEST_CASE("reverse joint of the fixture") {
    auto rev = reverse_joint(fixture_joint());
    Matrix expected(2, 2);
    expected << 0.8, -0.4,
                -0.3, 0.9;
    CHECK((rev.entries() - expected).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(rev.order().preceding == "A");
    CHECK(rev.order().following == "B");
    CHECK(rev.row_labels() == Labels{"b1", "b2"});
    // the reverse ordering generally leaves [0,1] even though the forward
    // joint is strictly positive
    CHECK(rev.entries().minCoeff() < 0.0);
}

TEST_CASE("reverse joint differs from the transpose in general") {
    auto joint = fixture_joint();
    auto rev = reverse_joint(joint);
    CHECK((rev.entries() - joint.entries().transpose()).cwiseAbs().maxCoeff() > 0.4);
}

TEST_CASE("symmetric joint with equal marginals keeps them under reversal") {
    Matrix m(2, 2);
    m << 0.4, 0.1,
         0.1, 0.4;
    JointDist joint(m);
    auto rev = reverse_joint(joint);
    auto [pr, pc] = marginals(rev);
    CHECK(pr.entries()(0) == Approx(0.5).margin(1e-12));
    CHECK(pc.entries()(0) == Approx(0.5).margin(1e-12));
}

TEST_CASE("is_product") {
    Vector pa(2), pb(2);
    pa << 0.5, 0.5;
    pb << 0.4, 0.6;
    CHECK(is_product(JointDist(pa * pb.transpose()), 1e-9));
    CHECK_FALSE(is_product(fixture_joint(), 1e-9));

    // fixture mixed toward its own product by weight below tol still counts
    Matrix outer = pa * pb.transpose(); // the fixture's marginal product
    Matrix mixed = (1.0 - 1e-10) * outer + 1e-10 * fixture_joint().entries();
    CHECK(is_product(JointDist(mixed), 1e-9));
}

TEST_CASE("property: conditional/joint round trip on random joints") {
    std::mt19937_64 rng(91101);
    for (int trial = 0; trial < 200; ++trial) {
        const int dim = 2 + static_cast<int>(rng() % 5);
        auto joint = testsupport::random_joint(rng, dim);
        auto cond = conditional_from_joint(joint);
        auto pb = marginals(joint).col;
        auto rebuilt = joint_from_model(cond.matrix, pb);
        CHECK((rebuilt.entries() - joint.entries()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("property: inverse of a column-stochastic matrix has unit column sums") {
    std::mt19937_64 rng(91102);
    for (int trial = 0; trial < 200; ++trial) {
        const int dim = 2 + static_cast<int>(rng() % 5);
        auto joint = testsupport::random_joint(rng, dim);
        auto cond = conditional_from_joint(joint);
        auto res = invert(cond.matrix.entries());
        REQUIRE(res.cond <= 1e6);
        const Vector colsums = res.inverse.colwise().sum().transpose();
        CHECK((colsums.array() - 1.0).abs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("property: reverse joint preserves both marginals and is an involution") {
    std::mt19937_64 rng(91103);
    for (int trial = 0; trial < 200; ++trial) {
        const int dim = 2 + static_cast<int>(rng() % 5);
        auto joint = testsupport::random_joint(rng, dim);
        auto [pa, pb] = marginals(joint);
        auto rev = reverse_joint(joint);
        CHECK(std::abs(rev.total() - 1.0) < 1e-10);
        CHECK((rev.entries().rowwise().sum() - pb.entries()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((rev.entries().colwise().sum().transpose() - pa.entries()).cwiseAbs().maxCoeff() <
              1e-10);
        auto back = reverse_joint(rev);
        CHECK((back.entries() - joint.entries()).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("property: marginals of a normalized joint sum to 1") {
    std::mt19937_64 rng(91104);
    for (int trial = 0; trial < 100; ++trial) {
        const int dim = 2 + static_cast<int>(rng() % 5);
        auto joint = testsupport::random_joint(rng, dim);
        auto [pa, pb] = marginals(joint);
        CHECK(std::abs(pa.entries().sum() - 1.0) < 1e-12);
        CHECK(std::abs(pb.entries().sum() - 1.0) < 1e-12);
    }
}

TEST_CASE("distribution type invariants are enforced") {
    Vector bad(2);
    bad << 0.7, 0.7;
    CHECK_THROWS_AS(ProbVector(bad), InvalidDistribution);
    Vector negative(2);
    negative << 1.5, -0.5;
    CHECK_THROWS_AS(ProbVector(negative), InvalidDistribution);
    CHECK_NOTHROW(QuasiVector(negative)); // quasi vectors only need unit sum

    Matrix notstoch(2, 2);
    notstoch << 0.5, 0.4,
                0.4, 0.5;
    CHECK_THROWS_AS(StochasticMatrix(notstoch), InvalidDistribution);
    CHECK_THROWS_AS(JointDist(Matrix::Constant(2, 2, 0.3)), InvalidDistribution);
}
