#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qinfer/errors.hpp"
#include "qinfer/types.hpp"

// Brute-force exact-rational reference used to pin golden values and to
// cross-check the floating-point library. Deliberately a separate code path:
// inverses come from cofactor expansion, posteriors from direct entrywise
// division, so agreement with the Eigen-backed routines is evidence rather
// than tautology.

namespace qinfer::oracle {

using Rational = mpq_class;

/// Round-to-nearest double conversion. mpq_get_d truncates toward zero, so a
/// plain get_d() can sit one ulp away from the nearest-rounded literal.
inline double to_nearest_double(const Rational& r) {
    return r.get_num().get_d() / r.get_den().get_d();
}

class RationalMatrix {
public:
    RationalMatrix(Index rows, Index cols)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), Rational(0)) {
        if (rows <= 0 || cols <= 0)
            throw DimensionError("RationalMatrix: empty matrix");
    }

    static RationalMatrix identity(Index n) {
        RationalMatrix m(n, n);
        for (Index i = 0; i < n; ++i)
            m.at(i, i) = 1;
        return m;
    }

    /// Exact conversion; every double is a binary rational.
    static RationalMatrix from_double(const Matrix& m) {
        RationalMatrix out(m.rows(), m.cols());
        for (Index i = 0; i < m.rows(); ++i)
            for (Index j = 0; j < m.cols(); ++j)
                out.at(i, j) = Rational(m(i, j));
        return out;
    }

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }

    Rational& at(Index i, Index j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
    const Rational& at(Index i, Index j) const {
        return data_[static_cast<std::size_t>(i * cols_ + j)];
    }

    RationalMatrix transpose() const {
        RationalMatrix out(cols_, rows_);
        for (Index i = 0; i < rows_; ++i)
            for (Index j = 0; j < cols_; ++j)
                out.at(j, i) = at(i, j);
        return out;
    }

    RationalMatrix operator*(const RationalMatrix& o) const {
        if (cols_ != o.rows_)
            throw DimensionError("RationalMatrix: product shape mismatch");
        RationalMatrix out(rows_, o.cols_);
        for (Index i = 0; i < rows_; ++i)
            for (Index j = 0; j < o.cols_; ++j) {
                Rational acc(0);
                for (Index k = 0; k < cols_; ++k)
                    acc += at(i, k) * o.at(k, j);
                out.at(i, j) = acc;
            }
        return out;
    }

    RationalMatrix operator+(const RationalMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw DimensionError("RationalMatrix: sum shape mismatch");
        RationalMatrix out(rows_, cols_);
        for (std::size_t k = 0; k < data_.size(); ++k)
            out.data_[k] = data_[k] + o.data_[k];
        return out;
    }

    RationalMatrix scaled(const Rational& c) const {
        RationalMatrix out(rows_, cols_);
        for (std::size_t k = 0; k < data_.size(); ++k)
            out.data_[k] = data_[k] * c;
        return out;
    }

    bool operator==(const RationalMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    Rational sum() const {
        Rational acc(0);
        for (const auto& v : data_)
            acc += v;
        return acc;
    }

    std::vector<Rational> row_sums() const {
        std::vector<Rational> out(static_cast<std::size_t>(rows_), Rational(0));
        for (Index i = 0; i < rows_; ++i)
            for (Index j = 0; j < cols_; ++j)
                out[static_cast<std::size_t>(i)] += at(i, j);
        return out;
    }

    std::vector<Rational> col_sums() const {
        std::vector<Rational> out(static_cast<std::size_t>(cols_), Rational(0));
        for (Index i = 0; i < rows_; ++i)
            for (Index j = 0; j < cols_; ++j)
                out[static_cast<std::size_t>(j)] += at(i, j);
        return out;
    }

    Matrix to_double() const {
        Matrix out(rows_, cols_);
        for (Index i = 0; i < rows_; ++i)
            for (Index j = 0; j < cols_; ++j)
                out(i, j) = to_nearest_double(at(i, j));
        return out;
    }

    bool strictly_positive() const {
        for (const auto& v : data_)
            if (v <= 0)
                return false;
        return true;
    }

private:
    Index rows_, cols_;
    std::vector<Rational> data_;
};

inline RationalMatrix diag(const std::vector<Rational>& d) {
    RationalMatrix m(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i)
        m.at(static_cast<Index>(i), static_cast<Index>(i)) = d[i];
    return m;
}

inline RationalMatrix diag_inverse(const std::vector<Rational>& d) {
    RationalMatrix m(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] == 0)
            throw ZeroMarginalError("oracle: zero marginal entry " + std::to_string(i));
        m.at(static_cast<Index>(i), static_cast<Index>(i)) = 1 / d[i];
    }
    return m;
}

/// Cofactor-expansion determinant; intended for dimension <= 4.
inline Rational determinant(const RationalMatrix& m) {
    if (m.rows() != m.cols())
        throw NotSquareError("oracle determinant: matrix not square");
    const Index n = m.rows();
    if (n == 1)
        return m.at(0, 0);
    Rational det(0);
    int sign = 1;
    for (Index j = 0; j < n; ++j) {
        RationalMatrix minor(n - 1, n - 1);
        for (Index r = 1; r < n; ++r) {
            Index cc = 0;
            for (Index c = 0; c < n; ++c) {
                if (c == j)
                    continue;
                minor.at(r - 1, cc++) = m.at(r, c);
            }
        }
        det += sign * m.at(0, j) * determinant(minor);
        sign = -sign;
    }
    return det;
}

/// Exact inverse by adjugate / determinant, dimension <= 4.
inline RationalMatrix oracle_inverse(const RationalMatrix& m) {
    if (m.rows() != m.cols())
        throw NotSquareError("oracle_inverse: matrix not square");
    const Index n = m.rows();
    if (n > 4)
        throw DomainError("oracle_inverse: cofactor expansion supported up to dimension 4");
    const Rational det = determinant(m);
    if (det == 0)
        throw SingularError("oracle_inverse: exact determinant is zero");
    RationalMatrix inv(n, n);
    if (n == 1) {
        inv.at(0, 0) = 1 / det;
        return inv;
    }
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            RationalMatrix minor(n - 1, n - 1);
            Index rr = 0;
            for (Index r = 0; r < n; ++r) {
                if (r == i)
                    continue;
                Index cc = 0;
                for (Index c = 0; c < n; ++c) {
                    if (c == j)
                        continue;
                    minor.at(rr, cc++) = m.at(r, c);
                }
                ++rr;
            }
            const int sign = ((i + j) % 2 == 0) ? 1 : -1;
            inv.at(j, i) = sign * determinant(minor) / det; // adjugate transposes
        }
    return inv;
}

/// P(A|B) by direct column division of the joint.
inline RationalMatrix oracle_conditional(const RationalMatrix& joint) {
    const auto cols = joint.col_sums();
    RationalMatrix out(joint.rows(), joint.cols());
    for (Index j = 0; j < joint.cols(); ++j) {
        if (cols[static_cast<std::size_t>(j)] == 0)
            throw ZeroMarginalError("oracle_conditional: zero column marginal");
        for (Index i = 0; i < joint.rows(); ++i)
            out.at(i, j) = joint.at(i, j) / cols[static_cast<std::size_t>(j)];
    }
    return out;
}

/// Classical posterior P(B|A) by direct row division: entry (j,i) = J(i,j)/P(a_i).
inline RationalMatrix oracle_bayes(const RationalMatrix& joint) {
    const auto rows = joint.row_sums();
    RationalMatrix out(joint.cols(), joint.rows());
    for (Index i = 0; i < joint.rows(); ++i) {
        if (rows[static_cast<std::size_t>(i)] == 0)
            throw ZeroMarginalError("oracle_bayes: zero row marginal");
        for (Index j = 0; j < joint.cols(); ++j)
            out.at(j, i) = joint.at(i, j) / rows[static_cast<std::size_t>(i)];
    }
    return out;
}

/// Posterior of the inversion rule: the exact inverse of P(A|B).
inline RationalMatrix oracle_inversion_posterior(const RationalMatrix& joint) {
    return oracle_inverse(oracle_conditional(joint));
}

/// Joint of the opposite ordering: diag(P(B)) J^{-1} diag(P(A)).
inline RationalMatrix oracle_reverse_joint(const RationalMatrix& joint) {
    return diag(joint.col_sums()) * oracle_inverse(joint) * diag(joint.row_sums());
}

/// r matrix of the classical rule: (P(A|B)^T)^{-1}.
inline RationalMatrix oracle_r_bayes(const RationalMatrix& joint) {
    return oracle_inverse(oracle_conditional(joint).transpose());
}

/// r matrix of the inversion rule: diag(P(A))^{-1} P(A|B) diag(P(B)).
inline RationalMatrix oracle_r_inversion(const RationalMatrix& joint) {
    return diag_inverse(joint.row_sums()) * oracle_conditional(joint) * diag(joint.col_sums());
}

/// Posterior induced by an r matrix: diag(P(B)) r^{-1} diag(P(A))^{-1}.
inline RationalMatrix oracle_posterior_from_r(const RationalMatrix& r,
                                              const RationalMatrix& joint) {
    return diag(joint.col_sums()) * oracle_inverse(r) * diag_inverse(joint.row_sums());
}

/// Posterior of the p-mixture rule, via the inverse of the mixed r matrix.
inline RationalMatrix oracle_mix_posterior(const RationalMatrix& joint, const Rational& p) {
    const RationalMatrix r =
        oracle_r_inversion(joint).scaled(p) + oracle_r_bayes(joint).scaled(1 - p);
    return oracle_posterior_from_r(r, joint);
}

/// Third-order posterior, evaluated from its closed form with explicit
/// marginals: diag(P(B)) A^T diag(P(A))^{-1} A diag(P(B)) A^T diag(P(A))^{-1}.
inline RationalMatrix oracle_third_order_posterior(const RationalMatrix& joint) {
    const RationalMatrix a = oracle_conditional(joint);
    const RationalMatrix half =
        diag(joint.col_sums()) * a.transpose() * diag_inverse(joint.row_sums());
    return half * a * half;
}

/// The 2x2 fixture joint [[3/10, 1/5], [1/10, 2/5]] used throughout the tests.
inline RationalMatrix canonical_joint() {
    RationalMatrix j(2, 2);
    j.at(0, 0) = Rational(3, 10);
    j.at(0, 1) = Rational(1, 5);
    j.at(1, 0) = Rational(1, 10);
    j.at(1, 1) = Rational(2, 5);
    return j;
}

struct NegativeFinding {
    RationalMatrix joint;
    RationalMatrix posterior; ///< exact inversion posterior
    std::vector<std::tuple<Index, Index, double>> offending; ///< entries < 0 or > 1
};

/// Search for strictly positive joints whose inversion posterior leaves [0,1].
/// Entries are drawn as k/1000 with k in 1..1000 and exactly normalized, so
/// every trial is exact-rational with bounded denominators. The fixture joint
/// qualifies and is prepended for dimension 2 unless include_fixture is off.
inline std::vector<NegativeFinding> search_negative_posterior(int dim, int trials,
                                                              std::uint64_t seed,
                                                              bool include_fixture = true) {
    if (dim < 2 || dim > 4)
        throw DomainError("search_negative_posterior: dim must be 2..4, got " +
                          std::to_string(dim));
    if (trials < 0)
        throw DomainError("search_negative_posterior: negative trial count");

    auto offending_entries = [](const RationalMatrix& post) {
        std::vector<std::tuple<Index, Index, double>> out;
        for (Index i = 0; i < post.rows(); ++i)
            for (Index j = 0; j < post.cols(); ++j)
                if (post.at(i, j) < 0 || post.at(i, j) > 1)
                    out.emplace_back(i, j, to_nearest_double(post.at(i, j)));
        return out;
    };

    std::vector<NegativeFinding> findings;
    if (include_fixture && dim == 2) {
        RationalMatrix j0 = canonical_joint();
        RationalMatrix post = oracle_inversion_posterior(j0);
        auto bad = offending_entries(post);
        findings.push_back({std::move(j0), std::move(post), std::move(bad)});
    }

    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        RationalMatrix j(dim, dim);
        Rational total(0);
        for (Index i = 0; i < dim; ++i)
            for (Index jj = 0; jj < dim; ++jj) {
                const unsigned long k = 1 + static_cast<unsigned long>(rng() % 1000);
                Rational cell(static_cast<long>(k), 1000);
                cell.canonicalize(); // two-integer construction skips gcd reduction
                j.at(i, jj) = cell;
                total += cell;
            }
        for (Index i = 0; i < dim; ++i)
            for (Index jj = 0; jj < dim; ++jj)
                j.at(i, jj) /= total;

        RationalMatrix cond = oracle_conditional(j);
        if (determinant(cond) == 0)
            continue;
        RationalMatrix post = oracle_inverse(cond);
        auto bad = offending_entries(post);
        if (!bad.empty())
            findings.push_back({std::move(j), std::move(post), std::move(bad)});
    }
    return findings;
}

} // namespace qinfer::oracle
