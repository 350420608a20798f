#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "qinfer/types.hpp"

namespace qinfer {

struct MarginalPair {
    QuasiVector row; ///< marginal of the row variable (row sums)
    QuasiVector col; ///< marginal of the column variable (column sums)
};

/// Row and column sums of a joint. Each sums to 1 whenever the joint does.
inline MarginalPair marginals(const JointDist& joint, const Tolerances& tol = {}) {
    Vector r = joint.entries().rowwise().sum();
    Vector c = joint.entries().colwise().sum().transpose();
    return {QuasiVector(std::move(r), joint.row_labels(), tol),
            QuasiVector(std::move(c), joint.col_labels(), tol)};
}

/// Indices whose magnitude exceeds eps (the numerical support of a marginal).
inline std::vector<Index> support_indices(const Vector& v, double eps) {
    std::vector<Index> keep;
    keep.reserve(static_cast<std::size_t>(v.size()));
    for (Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > eps)
            keep.push_back(i);
    return keep;
}

struct Conditional {
    QuasiStochasticMatrix matrix;       ///< column j = joint column j / column marginal j
    std::vector<Index> dropped_columns; ///< conditioning outcomes without support (columns zeroed)
};

/// Conditional of the row variable given the column variable. Columns of the
/// result sum to 1 on the retained support. Without restrict_support a zero
/// column marginal is an error; with it the offending columns are zeroed and
/// reported.
inline Conditional conditional_from_joint(const JointDist& joint, const Tolerances& tol = {},
                                          bool restrict_support = false) {
    tol.check();
    const Vector col_marg = joint.entries().colwise().sum().transpose();
    std::vector<Index> dropped;
    for (Index j = 0; j < col_marg.size(); ++j)
        if (std::abs(col_marg(j)) <= tol.support_eps)
            dropped.push_back(j);
    if (!dropped.empty() && !restrict_support)
        throw ZeroMarginalError("conditional_from_joint: conditioning outcome '" +
                                joint.col_labels()[static_cast<std::size_t>(dropped.front())] +
                                "' has no mass (pass restrict_support to zero it)");
    Matrix m = joint.entries();
    for (Index j = 0; j < m.cols(); ++j) {
        if (std::abs(col_marg(j)) <= tol.support_eps)
            m.col(j).setZero();
        else
            m.col(j) /= col_marg(j);
    }
    return {QuasiStochasticMatrix(std::move(m), joint.row_labels(), joint.col_labels()),
            std::move(dropped)};
}

/// Tighten a quasi-stochastic matrix into a genuine column-stochastic one.
inline StochasticMatrix as_stochastic(const QuasiStochasticMatrix& m, const Tolerances& tol = {}) {
    return StochasticMatrix(m.entries(), m.row_labels(), m.col_labels(), tol);
}

/// Joint from a conditional-style matrix and the marginal of its conditioning
/// variable: entry (i,j) = M(i,j) * prior(j).
inline JointDist joint_from_model(const QuasiStochasticMatrix& model, const QuasiVector& prior,
                                  VarOrder order = {}, const Tolerances& tol = {}) {
    if (model.cols() != prior.size())
        throw DimensionError("joint_from_model: model has " + std::to_string(model.cols()) +
                             " columns but prior has " + std::to_string(prior.size()) + " entries");
    Matrix j = model.entries() * prior.entries().asDiagonal();
    return JointDist(std::move(j), std::move(order), model.row_labels(), model.col_labels(), tol);
}

/// sigma_max / sigma_min; +inf when the smallest singular value vanishes.
inline double condition_estimate(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    const double smax = s(0);
    const double smin = s(s.size() - 1);
    if (smin <= 0.0 || smax <= 0.0)
        return std::numeric_limits<double>::infinity();
    return smax / smin;
}

struct InvertResult {
    Matrix inverse;
    double residual; ///< ||M * inverse - I||_inf, measured
    double cond;     ///< singular-value condition estimate
};

/// Guarded dense inverse. Rejects non-square input, matrices that are
/// rank-deficient to working precision, and condition estimates above
/// tol.cond_max.
inline InvertResult invert(const Matrix& m, const Tolerances& tol = {}) {
    tol.check();
    if (m.rows() != m.cols())
        throw NotSquareError("invert: " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + " matrix is not square");
    detail::require_finite(m, "invert");
    const Index n = m.rows();
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    const double smax = s(0);
    const double smin = s(n - 1);
    const double rank_eps = static_cast<double>(n) * std::numeric_limits<double>::epsilon();
    if (smax <= 0.0 || smin <= smax * rank_eps)
        throw SingularError("invert: matrix is singular to working precision");
    const double cond = smax / smin;
    if (cond > tol.cond_max)
        throw IllConditionedError("invert: condition estimate " + std::to_string(cond) +
                                  " exceeds cond_max");
    Matrix inv = m.partialPivLu().inverse();
    // one Newton step, X <- X + X(I - MX), takes the error from ~eps*cond^2
    // down to ~eps*cond
    const Matrix err = Matrix::Identity(n, n) - m * inv;
    inv += inv * err;
    const double residual = (m * inv - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
    return {std::move(inv), residual, cond};
}

/// Joint for the opposite ordering: diag(col marginal) * J^{-1} * diag(row
/// marginal). Marginals with empty support are dropped before inversion and
/// re-embedded as zero rows/columns (detectable as zero marginals of the
/// result).
inline JointDist reverse_joint(const JointDist& joint, const Tolerances& tol = {}) {
    tol.check();
    const Vector row_marg = joint.entries().rowwise().sum();
    const Vector col_marg = joint.entries().colwise().sum().transpose();
    const auto keep_rows = support_indices(row_marg, tol.support_eps);
    const auto keep_cols = support_indices(col_marg, tol.support_eps);

    const bool restricted = static_cast<Index>(keep_rows.size()) != joint.rows() ||
                            static_cast<Index>(keep_cols.size()) != joint.cols();
    Matrix out = Matrix::Zero(joint.cols(), joint.rows());
    if (!restricted) {
        const Matrix inv = invert(joint.entries(), tol).inverse;
        out = col_marg.asDiagonal() * inv * row_marg.asDiagonal();
    } else {
        if (keep_rows.size() != keep_cols.size())
            throw NotSquareError("reverse_joint: support block is " +
                                 std::to_string(keep_rows.size()) + "x" +
                                 std::to_string(keep_cols.size()));
        const Index k = static_cast<Index>(keep_rows.size());
        Matrix block(k, k);
        Vector rm(k), cm(k);
        for (Index a = 0; a < k; ++a) {
            rm(a) = row_marg(keep_rows[static_cast<std::size_t>(a)]);
            for (Index b = 0; b < k; ++b)
                block(a, b) = joint.entries()(keep_rows[static_cast<std::size_t>(a)],
                                              keep_cols[static_cast<std::size_t>(b)]);
        }
        for (Index b = 0; b < k; ++b)
            cm(b) = col_marg(keep_cols[static_cast<std::size_t>(b)]);
        const Matrix inv = invert(block, tol).inverse;
        const Matrix rev = cm.asDiagonal() * inv * rm.asDiagonal();
        for (Index b = 0; b < k; ++b)
            for (Index a = 0; a < k; ++a)
                out(keep_cols[static_cast<std::size_t>(b)], keep_rows[static_cast<std::size_t>(a)]) =
                    rev(b, a);
    }
    return JointDist(std::move(out), joint.order().reversed(), joint.col_labels(),
                     joint.row_labels(), tol);
}

/// True when the joint is entrywise within tol of the outer product of its
/// marginals.
inline bool is_product(const JointDist& joint, double tol) {
    const Vector row_marg = joint.entries().rowwise().sum();
    const Vector col_marg = joint.entries().colwise().sum().transpose();
    const Matrix outer = row_marg * col_marg.transpose();
    return (joint.entries() - outer).cwiseAbs().maxCoeff() <= tol;
}

} // namespace qinfer
