#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qinfer/dist.hpp"
#include "qinfer/format.hpp"
#include "qinfer/types.hpp"

namespace qinfer::rules {

/// Everything an inference rule consumes: the model P(A|B) plus the two
/// marginals. The pair is consistent when model * P(B) = P(A); estimation
/// pipelines may deliberately carry inconsistent pairs, so consistency is a
/// measured residual rather than a construction-time requirement.
struct RuleContext {
    StochasticMatrix model; ///< P(A|B), column-stochastic
    QuasiVector prior_b;    ///< P(B)
    QuasiVector prior_a;    ///< P(A)

    static RuleContext from_joint(const JointDist& joint, const Tolerances& tol = {}) {
        auto cond = conditional_from_joint(joint, tol);
        auto marg = marginals(joint, tol);
        RuleContext ctx{as_stochastic(cond.matrix, tol), std::move(marg.col), std::move(marg.row)};
        ctx.require_dims();
        return ctx;
    }

    void require_dims() const {
        if (model.rows() != prior_a.size() || model.cols() != prior_b.size())
            throw DimensionError("RuleContext: model is " + std::to_string(model.rows()) + "x" +
                                 std::to_string(model.cols()) + " but priors have sizes " +
                                 std::to_string(prior_a.size()) + "/" +
                                 std::to_string(prior_b.size()));
    }

    /// ||model * P(B) - P(A)||_inf
    double consistency_residual() const {
        return (model.entries() * prior_b.entries() - prior_a.entries()).cwiseAbs().maxCoeff();
    }
};

namespace detail {

inline void require_nonzero(const Vector& v, double eps, const char* what) {
    for (Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) <= eps)
            throw ZeroMarginalError(std::string(what) + ": marginal entry " + std::to_string(i) +
                                    " is zero to working precision");
}

inline void require_strictly_positive(const Vector& v, double eps, const char* what) {
    for (Index i = 0; i < v.size(); ++i)
        if (v(i) <= eps)
            throw ZeroMarginalError(std::string(what) + ": marginal entry " + std::to_string(i) +
                                    " is not strictly positive");
}

} // namespace detail

/// An inference-rule matrix r, defined through P(B|A)^{-1} = diag(P(A)) r diag(P(B))^{-1}.
/// A valid rule maps the all-ones vector on B to the all-ones vector on A, and
/// its transpose maps P(A) to P(B).
///
/// The posterior only ever needs r^{-1}, so a rule may be stored in inverse
/// form alone; the zeroth-order rule exists only that way (its r^{-1} has every
/// row equal to P(A), which is singular, so no direct r matrix exists).
/// Construction snapshots the marginals it was built against, making the
/// residuals reproducible without re-supplying a context.
class RMatrix {
public:
    static RMatrix with_direct(Matrix r, const RuleContext& ctx) {
        return RMatrix(std::move(r), std::nullopt, ctx.prior_a.entries(), ctx.prior_b.entries(),
                       ctx.prior_a.labels(), ctx.prior_b.labels());
    }
    static RMatrix with_inverse(Matrix rinv, const RuleContext& ctx) {
        return RMatrix(std::nullopt, std::move(rinv), ctx.prior_a.entries(), ctx.prior_b.entries(),
                       ctx.prior_a.labels(), ctx.prior_b.labels());
    }
    static RMatrix with_both(Matrix r, Matrix rinv, const RuleContext& ctx) {
        return RMatrix(std::move(r), std::move(rinv), ctx.prior_a.entries(),
                       ctx.prior_b.entries(), ctx.prior_a.labels(), ctx.prior_b.labels());
    }
    /// Used by compose(), which inherits the snapshot of its first term.
    static RMatrix with_snapshot(Matrix r, Matrix rinv, const RMatrix& like) {
        return RMatrix(std::move(r), std::move(rinv), like.prior_a_, like.prior_b_,
                       like.labels_a_, like.labels_b_);
    }

    bool has_direct() const { return direct_.has_value(); }
    bool has_inverse_form() const { return inverse_.has_value(); }

    const Matrix& direct() const {
        if (!direct_)
            throw DomainError("RMatrix: no direct form (zeroth-order rules have none)");
        return *direct_;
    }

    /// Stored inverse form, or the inverse of the direct form computed under tol.
    Matrix inverse(const Tolerances& tol = {}) const {
        if (inverse_)
            return *inverse_;
        return invert(*direct_, tol).inverse;
    }

    Index rows_a() const { return direct_ ? direct_->rows() : inverse_->cols(); }
    Index cols_b() const { return direct_ ? direct_->cols() : inverse_->rows(); }
    const Labels& labels_a() const { return labels_a_; }
    const Labels& labels_b() const { return labels_b_; }

    /// Marginals snapshotted at construction time.
    const Vector& built_prior_a() const { return prior_a_; }
    const Vector& built_prior_b() const { return prior_b_; }
    /// Residual of r 1_B = 1_A (inverse form: r^{-1} 1_A = 1_B) at construction.
    double built_ones_residual() const { return ones_residual_; }
    /// Residual of r^T P(A) = P(B) (inverse form: r^{-T} P(B) = P(A)) at construction.
    double built_marginal_residual() const { return marginal_residual_; }

private:
    RMatrix(std::optional<Matrix> r, std::optional<Matrix> rinv, Vector prior_a, Vector prior_b,
            Labels labels_a, Labels labels_b)
        : direct_(std::move(r)),
          inverse_(std::move(rinv)),
          prior_a_(std::move(prior_a)),
          prior_b_(std::move(prior_b)),
          labels_a_(std::move(labels_a)),
          labels_b_(std::move(labels_b)) {
        if (!direct_ && !inverse_)
            throw DomainError("RMatrix: needs at least one of direct/inverse form");
        if (direct_) {
            ones_residual_ =
                (direct_->rowwise().sum() - Vector::Ones(direct_->rows())).cwiseAbs().maxCoeff();
            marginal_residual_ =
                (direct_->transpose() * prior_a_ - prior_b_).cwiseAbs().maxCoeff();
        } else {
            ones_residual_ =
                (inverse_->rowwise().sum() - Vector::Ones(inverse_->rows())).cwiseAbs().maxCoeff();
            marginal_residual_ =
                (inverse_->transpose() * prior_b_ - prior_a_).cwiseAbs().maxCoeff();
        }
    }

    std::optional<Matrix> direct_;
    std::optional<Matrix> inverse_;
    Vector prior_a_;
    Vector prior_b_;
    Labels labels_a_;
    Labels labels_b_;
    double ones_residual_ = 0.0;
    double marginal_residual_ = 0.0;
};

/// Rule recovering the classical posterior: r = (P(A|B)^T)^{-1}, r^{-1} = P(A|B)^T.
inline RMatrix r_bayes(const RuleContext& ctx, const Tolerances& tol = {}) {
    ctx.require_dims();
    Matrix at = ctx.model.entries().transpose();
    auto inv = invert(at, tol);
    return RMatrix::with_both(std::move(inv.inverse), std::move(at), ctx);
}

/// Rule whose posterior is the matrix inverse of the model:
/// r = diag(P(A))^{-1} P(A|B) diag(P(B)).
inline RMatrix r_inversion(const RuleContext& ctx, const Tolerances& tol = {}) {
    ctx.require_dims();
    const Vector& pa = ctx.prior_a.entries();
    const Vector& pb = ctx.prior_b.entries();
    detail::require_nonzero(pa, tol.support_eps, "r_inversion");
    detail::require_nonzero(pb, tol.support_eps, "r_inversion");
    Matrix r = pa.cwiseInverse().asDiagonal() * ctx.model.entries() * pb.asDiagonal();
    auto model_inv = invert(ctx.model.entries(), tol);
    Matrix rinv = pb.cwiseInverse().asDiagonal() * model_inv.inverse * pa.asDiagonal();
    return RMatrix::with_both(std::move(r), std::move(rinv), ctx);
}

/// Posterior that ignores the observation: every column equals P(B).
/// Works for rectangular models too, where no r matrix exists at all.
inline QuasiStochasticMatrix zeroth_posterior(const RuleContext& ctx) {
    ctx.require_dims();
    Matrix post = ctx.prior_b.entries() * Eigen::RowVectorXd::Ones(ctx.prior_a.size());
    return QuasiStochasticMatrix(std::move(post), ctx.prior_b.labels(), ctx.prior_a.labels());
}

/// Zeroth-order rule, stored in inverse form only: r^{-1} has every row equal
/// to P(A) and is singular, so the rule has no direct r matrix.
inline RMatrix r_zeroth(const RuleContext& ctx, const Tolerances& tol = {}) {
    ctx.require_dims();
    if (ctx.model.rows() != ctx.model.cols())
        throw NotSquareError("r_zeroth: no r matrix exists for a rectangular model; "
                             "use zeroth_posterior instead");
    detail::require_strictly_positive(ctx.prior_a.entries(), tol.support_eps, "r_zeroth");
    Matrix rinv = Vector::Ones(ctx.prior_b.size()) * ctx.prior_a.entries().transpose();
    return RMatrix::with_inverse(std::move(rinv), ctx);
}

/// Convex mixture r = p * r_inversion + (1-p) * r_bayes, p in [0,1]. Both
/// defining linear conditions are preserved by mixing. The endpoints return
/// the exact endpoint constructions.
inline RMatrix r_mix(const RuleContext& ctx, double p, const Tolerances& tol = {}) {
    if (!(p >= 0.0 && p <= 1.0))
        throw DomainError("r_mix: p = " + format_double(p) + " outside [0,1]");
    if (p == 0.0)
        return r_bayes(ctx, tol);
    if (p == 1.0)
        return r_inversion(ctx, tol);
    Matrix mixed =
        p * r_inversion(ctx, tol).direct() + (1.0 - p) * r_bayes(ctx, tol).direct();
    return RMatrix::with_direct(std::move(mixed), ctx);
}

/// Alternating product r = r1 * r2^{-1} * r3 * ... of an odd number of rules
/// sharing one context. Direct forms are required, so zeroth-order terms are
/// not composable.
inline RMatrix compose(const std::vector<RMatrix>& terms, const Tolerances& tol = {}) {
    if (terms.empty())
        throw DomainError("compose: needs at least one term");
    if (terms.size() % 2 == 0)
        throw EvenLengthError("compose: " + std::to_string(terms.size()) +
                              " terms; rules exist only at odd orders");
    for (std::size_t i = 1; i < terms.size(); ++i)
        if (terms[i].built_prior_a() != terms[0].built_prior_a() ||
            terms[i].built_prior_b() != terms[0].built_prior_b())
            throw DomainError("compose: terms were built against different contexts");

    const Index n = terms[0].rows_a();
    Matrix r = Matrix::Identity(n, n);
    Matrix rinv = Matrix::Identity(n, n);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const bool direct_slot = (i % 2 == 0);
        r *= direct_slot ? terms[i].direct() : terms[i].inverse(tol);
    }
    for (std::size_t i = terms.size(); i-- > 0;) {
        const bool direct_slot = (i % 2 == 0);
        rinv *= direct_slot ? terms[i].inverse(tol) : terms[i].direct();
    }
    return RMatrix::with_snapshot(std::move(r), std::move(rinv), terms[0]);
}

/// Reverse conditional for a rule: P(B|A) = diag(P(B)) r^{-1} diag(P(A))^{-1}.
/// Columns sum to 1 whenever the rule conditions hold for the context's
/// marginals; deviations stay measurable on the result for diagnostics.
inline QuasiStochasticMatrix posterior_from_r(const RMatrix& r, const RuleContext& ctx,
                                              const Tolerances& tol = {}) {
    ctx.require_dims();
    const Vector& pa = ctx.prior_a.entries();
    const Vector& pb = ctx.prior_b.entries();
    detail::require_nonzero(pa, tol.support_eps, "posterior_from_r");
    Matrix post = pb.asDiagonal() * r.inverse(tol) * pa.cwiseInverse().asDiagonal();
    return QuasiStochasticMatrix(std::move(post), ctx.prior_b.labels(), ctx.prior_a.labels());
}

struct ValidationReport {
    double ones_residual;        ///< ||r 1_B - 1_A||_inf (or the inverse-form analog)
    double marginal_residual;    ///< ||r^T P(A) - P(B)||_inf (or the inverse-form analog)
    double posterior_colsum_dev; ///< max_j |sum_i P(B|A)(i,j) - 1|; +inf if uncomputable
    bool used_inverse_form;      ///< checks ran on r^{-1} (rule stored without a direct r)
    bool ones_ok;
    bool marginal_ok;
    bool posterior_ok;

    bool pass() const { return ones_ok && marginal_ok && posterior_ok; }
};

/// Check the two defining conditions of an inference rule against a context,
/// plus the column sums of the induced posterior (which catch candidates that
/// satisfy only the first condition).
inline ValidationReport validate_r(const RMatrix& r, const RuleContext& ctx, double tol) {
    ctx.require_dims();
    ValidationReport rep{};
    rep.used_inverse_form = !r.has_direct();
    if (r.has_direct()) {
        const Matrix& d = r.direct();
        rep.ones_residual = (d.rowwise().sum() - Vector::Ones(d.rows())).cwiseAbs().maxCoeff();
        rep.marginal_residual =
            (d.transpose() * ctx.prior_a.entries() - ctx.prior_b.entries()).cwiseAbs().maxCoeff();
    } else {
        const Matrix rinv = r.inverse();
        rep.ones_residual =
            (rinv.rowwise().sum() - Vector::Ones(rinv.rows())).cwiseAbs().maxCoeff();
        rep.marginal_residual =
            (rinv.transpose() * ctx.prior_b.entries() - ctx.prior_a.entries()).cwiseAbs().maxCoeff();
    }
    try {
        rep.posterior_colsum_dev = posterior_from_r(r, ctx).max_colsum_deviation();
    } catch (const Error&) {
        rep.posterior_colsum_dev = std::numeric_limits<double>::infinity();
    }
    rep.ones_ok = rep.ones_residual <= tol;
    rep.marginal_ok = rep.marginal_residual <= tol;
    rep.posterior_ok = rep.posterior_colsum_dev <= tol;
    return rep;
}

/// Rule expression: zeroth order, a first-order mixture parameter, or an
/// odd-length composition of first-order terms.
struct RuleExpr {
    enum class Kind { Zeroth, FirstOrder, Composite };

    Kind kind = Kind::FirstOrder;
    double p = 0.0;             ///< FirstOrder: mixture parameter (0 = bayes, 1 = inversion)
    std::vector<double> terms;  ///< Composite: one parameter per term, odd count

    static RuleExpr zeroth() { return {Kind::Zeroth, 0.0, {}}; }
    static RuleExpr first_order(double p) { return {Kind::FirstOrder, p, {}}; }
    static RuleExpr composite(std::vector<double> ps) {
        return {Kind::Composite, 0.0, std::move(ps)};
    }

    std::string str() const {
        auto term_str = [](double q) -> std::string {
            if (q == 0.0)
                return "bayes";
            if (q == 1.0)
                return "inversion";
            return "mix:" + format_double(q);
        };
        switch (kind) {
        case Kind::Zeroth:
            return "zeroth";
        case Kind::FirstOrder:
            return term_str(p);
        case Kind::Composite: {
            std::string out = "compose:";
            for (std::size_t i = 0; i < terms.size(); ++i) {
                if (i)
                    out += ',';
                out += term_str(terms[i]);
            }
            return out;
        }
        }
        return {};
    }
};

namespace detail {

inline double parse_first_order_term(std::string_view term) {
    if (term == "bayes")
        return 0.0;
    if (term == "inversion")
        return 1.0;
    constexpr std::string_view mix_prefix = "mix:";
    if (term.substr(0, mix_prefix.size()) == mix_prefix) {
        double p;
        try {
            p = parse_double(term.substr(mix_prefix.size()));
        } catch (const ParseError&) {
            throw RuleSpecError("bad mixture parameter in '" + std::string(term) + "'");
        }
        if (!(p >= 0.0 && p <= 1.0))
            throw RuleSpecError("mixture parameter " + format_double(p) + " outside [0,1]");
        return p;
    }
    throw RuleSpecError("unknown rule term '" + std::string(term) +
                        "' (expected bayes|inversion|mix:<p>)");
}

} // namespace detail

/// Parse a rule spec: bayes | inversion | zeroth | mix:<p> |
/// compose:<term>(,<term>)* with an odd number of first-order terms.
inline RuleExpr parse_rule(std::string_view spec) {
    if (spec == "zeroth")
        return RuleExpr::zeroth();
    constexpr std::string_view compose_prefix = "compose:";
    if (spec.substr(0, compose_prefix.size()) == compose_prefix) {
        std::string_view rest = spec.substr(compose_prefix.size());
        std::vector<double> ps;
        while (!rest.empty()) {
            auto comma = rest.find(',');
            std::string_view term = rest.substr(0, comma);
            ps.push_back(detail::parse_first_order_term(term));
            if (comma == std::string_view::npos)
                break;
            rest = rest.substr(comma + 1);
            if (rest.empty())
                throw RuleSpecError("trailing comma in composition");
        }
        if (ps.empty())
            throw RuleSpecError("empty composition");
        if (ps.size() % 2 == 0)
            throw EvenLengthError("composition has " + std::to_string(ps.size()) +
                                  " terms; rules exist only at odd orders");
        return RuleExpr::composite(std::move(ps));
    }
    return RuleExpr::first_order(detail::parse_first_order_term(spec));
}

/// Materialize a rule expression against a context.
inline RMatrix build_rule(const RuleExpr& expr, const RuleContext& ctx,
                          const Tolerances& tol = {}) {
    switch (expr.kind) {
    case RuleExpr::Kind::Zeroth:
        return r_zeroth(ctx, tol);
    case RuleExpr::Kind::FirstOrder:
        return r_mix(ctx, expr.p, tol);
    case RuleExpr::Kind::Composite: {
        std::vector<RMatrix> terms;
        terms.reserve(expr.terms.size());
        for (double q : expr.terms)
            terms.push_back(r_mix(ctx, q, tol));
        return compose(terms, tol);
    }
    }
    throw DomainError("build_rule: unreachable");
}

} // namespace qinfer::rules
