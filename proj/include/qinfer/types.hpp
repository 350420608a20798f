#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qinfer/errors.hpp"

namespace qinfer {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Labels = std::vector<std::string>;

/// Numerical guard rails shared across the library.
struct Tolerances {
    double sum_tol = 1e-9;      ///< allowed deviation of normalization sums from 1
    double cond_max = 1e8;      ///< condition-number cap for matrix inversion
    double support_eps = 1e-12; ///< marginal mass at or below this counts as zero

    void check() const {
        if (!(sum_tol > 0.0) || !(cond_max > 0.0) || !(support_eps > 0.0))
            throw DomainError("tolerances must be strictly positive");
    }
};

inline Labels default_labels(char prefix, Index n) {
    Labels out;
    out.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        out.push_back(prefix + std::to_string(i + 1));
    return out;
}

namespace detail {

inline Labels resolve_labels(Labels labels, char prefix, Index n, const char* what) {
    if (labels.empty())
        return default_labels(prefix, n);
    if (static_cast<Index>(labels.size()) != n)
        throw DimensionError(std::string(what) + ": " + std::to_string(labels.size()) +
                             " labels for " + std::to_string(n) + " entries");
    return labels;
}

inline void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite())
        throw InvalidDistribution(std::string(what) + ": entries must be finite");
}

inline void require_finite(const Vector& v, const char* what) {
    if (!v.allFinite())
        throw InvalidDistribution(std::string(what) + ": entries must be finite");
}

inline char label_prefix(const std::string& var_name, char fallback) {
    if (var_name.empty())
        return fallback;
    char c = var_name.front();
    if (c >= 'A' && c <= 'Z')
        return static_cast<char>(c - 'A' + 'a');
    return c;
}

} // namespace detail

/// Real-valued vector with unit sum; entries may be negative or exceed 1.
class QuasiVector {
public:
    QuasiVector(Vector entries, Labels labels = {}, const Tolerances& tol = {})
        : entries_(std::move(entries)),
          labels_(detail::resolve_labels(std::move(labels), 'x', entries_.size(), "QuasiVector")) {
        if (entries_.size() == 0)
            throw DimensionError("QuasiVector: empty vector");
        detail::require_finite(entries_, "QuasiVector");
        const double dev = std::abs(entries_.sum() - 1.0);
        if (dev > tol.sum_tol)
            throw InvalidDistribution("QuasiVector: entries sum to " + std::to_string(entries_.sum()) +
                                      ", off by more than sum_tol");
    }

    const Vector& entries() const { return entries_; }
    const Labels& labels() const { return labels_; }
    Index size() const { return entries_.size(); }
    double operator[](Index i) const { return entries_(i); }
    double min_entry() const { return entries_.minCoeff(); }
    double max_entry() const { return entries_.maxCoeff(); }
    bool nonnegative(double eps = 0.0) const { return entries_.minCoeff() >= -eps; }

private:
    Vector entries_;
    Labels labels_;
};

/// Genuine marginal distribution: non-negative, unit sum.
class ProbVector {
public:
    ProbVector(Vector entries, Labels labels = {}, const Tolerances& tol = {})
        : quasi_(std::move(entries), std::move(labels), tol) {
        if (!quasi_.nonnegative(tol.sum_tol))
            throw InvalidDistribution("ProbVector: negative entry " +
                                      std::to_string(quasi_.min_entry()));
    }

    const Vector& entries() const { return quasi_.entries(); }
    const Labels& labels() const { return quasi_.labels(); }
    Index size() const { return quasi_.size(); }
    double operator[](Index i) const { return quasi_[i]; }
    double min_entry() const { return quasi_.min_entry(); }

    operator const QuasiVector&() const { return quasi_; } // widening is always safe
    const QuasiVector& quasi() const { return quasi_; }

private:
    QuasiVector quasi_;
};

/// Conditional-style matrix with nominally unit column sums and unrestricted sign.
/// Construction checks finiteness only; column-sum deviation stays inspectable so
/// diagnostic pipelines can carry "almost-stochastic" matrices.
class QuasiStochasticMatrix {
public:
    QuasiStochasticMatrix(Matrix entries, Labels row_labels = {}, Labels col_labels = {})
        : entries_(std::move(entries)),
          row_labels_(detail::resolve_labels(std::move(row_labels), 'r', entries_.rows(),
                                             "QuasiStochasticMatrix rows")),
          col_labels_(detail::resolve_labels(std::move(col_labels), 'c', entries_.cols(),
                                             "QuasiStochasticMatrix cols")) {
        if (entries_.rows() == 0 || entries_.cols() == 0)
            throw DimensionError("QuasiStochasticMatrix: empty matrix");
        detail::require_finite(entries_, "QuasiStochasticMatrix");
    }

    const Matrix& entries() const { return entries_; }
    const Labels& row_labels() const { return row_labels_; }
    const Labels& col_labels() const { return col_labels_; }
    Index rows() const { return entries_.rows(); }
    Index cols() const { return entries_.cols(); }

    Vector colsum_deviations() const {
        return (entries_.colwise().sum().array() - 1.0).abs().matrix().transpose();
    }
    double max_colsum_deviation() const { return colsum_deviations().maxCoeff(); }
    double min_entry() const { return entries_.minCoeff(); }
    double max_entry() const { return entries_.maxCoeff(); }
    bool nonnegative(double eps = 0.0) const { return entries_.minCoeff() >= -eps; }

private:
    Matrix entries_;
    Labels row_labels_;
    Labels col_labels_;
};

/// Column-stochastic matrix: columns sum to 1, entries non-negative.
/// Rows index the conditioned variable, columns the conditioning one.
class StochasticMatrix {
public:
    StochasticMatrix(Matrix entries, Labels row_labels = {}, Labels col_labels = {},
                     const Tolerances& tol = {})
        : quasi_(std::move(entries), std::move(row_labels), std::move(col_labels)) {
        const double dev = quasi_.max_colsum_deviation();
        if (dev > tol.sum_tol)
            throw InvalidDistribution("StochasticMatrix: column sums off by " +
                                      std::to_string(dev));
        if (!quasi_.nonnegative(tol.sum_tol))
            throw InvalidDistribution("StochasticMatrix: negative entry " +
                                      std::to_string(quasi_.min_entry()));
    }

    const Matrix& entries() const { return quasi_.entries(); }
    const Labels& row_labels() const { return quasi_.row_labels(); }
    const Labels& col_labels() const { return quasi_.col_labels(); }
    Index rows() const { return quasi_.rows(); }
    Index cols() const { return quasi_.cols(); }

    operator const QuasiStochasticMatrix&() const { return quasi_; }
    const QuasiStochasticMatrix& quasi() const { return quasi_; }

private:
    QuasiStochasticMatrix quasi_;
};

/// Ordering tag of a two-variable joint: which variable precedes the other.
/// In a JointDist the column variable always precedes the row variable, so a
/// joint "of X and Y" with rows X and columns Y carries the tag {Y, X}.
struct VarOrder {
    std::string preceding = "B";
    std::string following = "A";

    std::string str() const { return preceding + "<" + following; }

    static VarOrder parse(std::string_view s) {
        auto sep = s.find('<');
        if (sep == std::string_view::npos || sep == 0 || sep + 1 == s.size())
            throw ParseError("ordering tag must look like 'B<A', got '" + std::string(s) + "'");
        return {std::string(s.substr(0, sep)), std::string(s.substr(sep + 1))};
    }

    VarOrder reversed() const { return {following, preceding}; }

    bool operator==(const VarOrder&) const = default;
};

/// Two-variable joint distribution with an ordering tag. The total mass is 1;
/// entries may be signed (joints for the reversed ordering are generally not
/// non-negative).
class JointDist {
public:
    JointDist(Matrix entries, VarOrder order = {}, Labels row_labels = {}, Labels col_labels = {},
              const Tolerances& tol = {})
        : entries_(std::move(entries)),
          order_(std::move(order)),
          row_labels_(detail::resolve_labels(std::move(row_labels),
                                             detail::label_prefix(order_.following, 'a'),
                                             entries_.rows(), "JointDist rows")),
          col_labels_(detail::resolve_labels(std::move(col_labels),
                                             detail::label_prefix(order_.preceding, 'b'),
                                             entries_.cols(), "JointDist cols")) {
        if (entries_.rows() == 0 || entries_.cols() == 0)
            throw DimensionError("JointDist: empty matrix");
        detail::require_finite(entries_, "JointDist");
        const double dev = std::abs(entries_.sum() - 1.0);
        if (dev > tol.sum_tol)
            throw InvalidDistribution("JointDist: total mass " + std::to_string(entries_.sum()) +
                                      ", off by more than sum_tol");
    }

    const Matrix& entries() const { return entries_; }
    const VarOrder& order() const { return order_; }
    const Labels& row_labels() const { return row_labels_; }
    const Labels& col_labels() const { return col_labels_; }
    Index rows() const { return entries_.rows(); }
    Index cols() const { return entries_.cols(); }
    double total() const { return entries_.sum(); }
    bool nonnegative(double eps = 0.0) const { return entries_.minCoeff() >= -eps; }

private:
    Matrix entries_;
    VarOrder order_;
    Labels row_labels_;
    Labels col_labels_;
};

} // namespace qinfer
