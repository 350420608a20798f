#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qinfer/dist.hpp"
#include "qinfer/format.hpp"
#include "qinfer/rules.hpp"
#include "qinfer/types.hpp"

namespace qinfer::inference {

/// Frequency estimate of a marginal from outcome counts.
struct EmpiricalMarginal {
    std::vector<long long> counts;
    long long n;
    ProbVector estimate;
};

inline EmpiricalMarginal estimate_from_counts(std::vector<long long> counts, Labels labels = {}) {
    long long n = 0;
    for (long long c : counts) {
        if (c < 0)
            throw DomainError("estimate_from_counts: negative count");
        n += c;
    }
    if (n <= 0)
        throw EmptySampleError("estimate_from_counts: no observations");
    Vector est(static_cast<Index>(counts.size()));
    for (std::size_t i = 0; i < counts.size(); ++i)
        est(static_cast<Index>(i)) = static_cast<double>(counts[i]) / static_cast<double>(n);
    return {std::move(counts), n, ProbVector(std::move(est), std::move(labels))};
}

/// Estimate the hidden marginal from the observed one through the model
/// inverse: P(B) = P(A|B)^{-1} P(A). The result sums to 1 whenever the input
/// does; entries may be negative and are reported as-is.
inline QuasiVector infer_hidden_marginal(const StochasticMatrix& model, const QuasiVector& observed,
                                         const Tolerances& tol = {}) {
    if (model.rows() != observed.size())
        throw DimensionError("infer_hidden_marginal: model rows " + std::to_string(model.rows()) +
                             " != observed size " + std::to_string(observed.size()));
    auto inv = invert(model.entries(), tol);
    Vector hidden = inv.inverse * observed.entries();
    return QuasiVector(std::move(hidden), model.col_labels(), tol);
}

/// Per-column |sum - 1| of a posterior. For the third-order rule this deviates
/// from zero exactly when the marginals used to build the rule are mutually
/// inconsistent through the model, which makes it a convergence probe.
inline std::vector<double> column_sum_diagnostic(const QuasiStochasticMatrix& posterior) {
    Vector dev = posterior.colsum_deviations();
    return {dev.data(), dev.data() + dev.size()};
}

struct InferenceDiagnostics {
    std::vector<double> colsum_devs;
    double max_colsum_dev = 0.0;
    double min_prior_entry = 0.0;
    double min_posterior_entry = 0.0;
    bool prior_has_negative = false;
    bool posterior_has_negative = false;
    double condition_estimate = 0.0; ///< of the model
};

struct InferenceResult {
    QuasiVector inferred_prior;
    QuasiStochasticMatrix posterior;
    InferenceDiagnostics diagnostics;
};

inline InferenceDiagnostics diagnose(const QuasiVector& prior, const QuasiStochasticMatrix& post,
                                     double model_condition) {
    InferenceDiagnostics d;
    d.colsum_devs = column_sum_diagnostic(post);
    d.max_colsum_dev = post.max_colsum_deviation();
    d.min_prior_entry = prior.min_entry();
    d.min_posterior_entry = post.min_entry();
    d.prior_has_negative = d.min_prior_entry < 0.0;
    d.posterior_has_negative = d.min_posterior_entry < 0.0;
    d.condition_estimate = model_condition;
    return d;
}

/// Infer a prior for the hidden variable from the observed marginal, then form
/// the classical posterior with it:
/// P(B|A) = Diag[P(A|B)^{-1} P(A)] P(A|B)^T Diag[P(A)]^{-1}.
/// The columns sum to 1 for any strictly positive observed vector.
inline InferenceResult posterior_with_inferred_prior(const StochasticMatrix& model,
                                                     const ProbVector& observed,
                                                     const Tolerances& tol = {}) {
    rules::detail::require_strictly_positive(observed.entries(), tol.support_eps,
                                             "posterior_with_inferred_prior");
    QuasiVector prior = infer_hidden_marginal(model, observed, tol);
    Matrix post = prior.entries().asDiagonal() * model.entries().transpose() *
                  observed.entries().cwiseInverse().asDiagonal();
    QuasiStochasticMatrix posterior(std::move(post), model.col_labels(), model.row_labels());
    auto diag = diagnose(prior, posterior, condition_estimate(model.entries()));
    return {std::move(prior), std::move(posterior), std::move(diag)};
}

/// Clamp negative entries to zero and renormalize. This leaves the generalized
/// framework: the result is an ordinary distribution but no longer satisfies
/// the inference identities the raw estimate obeys. Offered as an explicitly
/// separate post-processing step, never applied implicitly.
inline ProbVector clip_project(const QuasiVector& v) {
    Vector clipped = v.entries().cwiseMax(0.0);
    const double total = clipped.sum();
    if (total <= 0.0)
        throw DomainError("clip_project: no positive mass to renormalize");
    clipped /= total;
    return ProbVector(std::move(clipped), v.labels());
}

// ---------------------------------------------------------------------------
// seeded experiments
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Independent substream seed for (size, repetition) cells. Rows are identical
/// no matter which order the cells are evaluated in.
inline std::uint64_t substream_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(base ^ splitmix64(a)) ^ b);
}

namespace detail {

// mt19937_64 is bit-exact across platforms; the uniform double uses the top
// 53 bits so sampling is reproducible byte for byte.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::vector<long long> sample_counts(const Vector& p, long long n, std::mt19937_64& rng) {
    std::vector<double> cum(static_cast<std::size_t>(p.size()));
    double acc = 0.0;
    for (Index i = 0; i < p.size(); ++i) {
        acc += p(i);
        cum[static_cast<std::size_t>(i)] = acc;
    }
    std::vector<long long> counts(static_cast<std::size_t>(p.size()), 0);
    for (long long k = 0; k < n; ++k) {
        const double u = uniform01(rng) * acc;
        std::size_t idx = 0;
        while (idx + 1 < cum.size() && u >= cum[idx])
            ++idx;
        ++counts[idx];
    }
    return counts;
}

inline double err_l1(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().sum(); }
inline double err_linf(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }
inline double err_l1(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().sum(); }
inline double err_linf(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

struct TruthRefs {
    StochasticMatrix model;  ///< P(A|B)
    Vector prior_a;          ///< exact P(A)
    Vector prior_b;          ///< exact P(B)
    Matrix bayes_posterior;  ///< exact classical posterior
};

inline TruthRefs truth_refs(const JointDist& truth, const Tolerances& tol) {
    if (is_product(truth, tol.support_eps))
        throw SingularError("experiment: truth joint is a product distribution; "
                            "the reverse ordering is undefined");
    auto ctx = rules::RuleContext::from_joint(truth, tol);
    Matrix bayes = ctx.prior_b.entries().asDiagonal() * ctx.model.entries().transpose() *
                   ctx.prior_a.entries().cwiseInverse().asDiagonal();
    return {ctx.model, ctx.prior_a.entries(), ctx.prior_b.entries(), std::move(bayes)};
}

} // namespace detail

struct ExperimentRow {
    long long n = 0;
    int repetition = 0;
    std::uint64_t seed = 0;
    double err_prior_l1 = 0.0;
    double err_prior_linf = 0.0;
    double err_posterior_l1 = 0.0;
    double err_posterior_linf = 0.0;
    double min_entry = 0.0;       ///< most negative entry across inferred prior and posterior
    double max_colsum_dev = 0.0;  ///< of the rule posterior built from the estimates
};

struct ExperimentReport {
    std::uint64_t base_seed = 0;
    std::string metric = "l1";
    std::string rule;
    std::vector<long long> sizes;
    int repetitions = 0;
    std::vector<ExperimentRow> rows;

    /// CSV body: header row plus one row per (n, repetition) with the
    /// selected metric. Deterministic for a given seed.
    std::string to_csv() const {
        const bool linf = (metric == "linf");
        std::string out = "n,repetition,seed,metric,error_prior,error_posterior,min_entry,"
                          "max_colsum_dev\n";
        for (const auto& r : rows) {
            out += std::to_string(r.n);
            out += ',';
            out += std::to_string(r.repetition);
            out += ',';
            out += std::to_string(r.seed);
            out += ',';
            out += metric;
            out += ',';
            out += format_double(linf ? r.err_prior_linf : r.err_prior_l1);
            out += ',';
            out += format_double(linf ? r.err_posterior_linf : r.err_posterior_l1);
            out += ',';
            out += format_double(r.min_entry);
            out += ',';
            out += format_double(r.max_colsum_dev);
            out += '\n';
        }
        return out;
    }
};

/// Sample the observable marginal at each size, infer the hidden marginal and
/// the rule posterior from the sample, and record errors against the exact
/// references. Only the observable variable is sampled; the hidden one enters
/// through the model inverse. Fully reproducible for a given seed; repetitions
/// use independent substreams. Negative inferred entries are recorded, never
/// clipped. If a sampled marginal loses an outcome entirely the posterior
/// columns for it are undefined and its error fields are NaN.
inline ExperimentReport convergence_experiment(const JointDist& truth, const rules::RuleExpr& rule,
                                               const std::vector<long long>& sizes,
                                               int repetitions, std::uint64_t seed,
                                               std::string_view metric = "l1",
                                               const Tolerances& tol = {}) {
    if (sizes.empty())
        throw DomainError("convergence_experiment: no sample sizes given");
    for (long long n : sizes)
        if (n <= 0)
            throw DomainError("convergence_experiment: sample sizes must be positive");
    if (repetitions <= 0)
        throw DomainError("convergence_experiment: repetitions must be positive");
    if (metric != "l1" && metric != "linf")
        throw DomainError("convergence_experiment: metric must be l1 or linf");

    const auto refs = detail::truth_refs(truth, tol);
    ExperimentReport report;
    report.base_seed = seed;
    report.metric = std::string(metric);
    report.rule = rule.str();
    report.sizes = sizes;
    report.repetitions = repetitions;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (long long n : sizes) {
        for (int rep = 0; rep < repetitions; ++rep) {
            ExperimentRow row;
            row.n = n;
            row.repetition = rep;
            row.seed = substream_seed(seed, static_cast<std::uint64_t>(n),
                                      static_cast<std::uint64_t>(rep));
            std::mt19937_64 rng(row.seed);
            auto counts = detail::sample_counts(refs.prior_a, n, rng);
            auto est = estimate_from_counts(std::move(counts), refs.model.row_labels());

            QuasiVector prior = infer_hidden_marginal(refs.model, est.estimate, tol);
            row.err_prior_l1 = detail::err_l1(prior.entries(), refs.prior_b);
            row.err_prior_linf = detail::err_linf(prior.entries(), refs.prior_b);
            row.min_entry = prior.min_entry();

            try {
                rules::RuleContext ctx{refs.model, prior, est.estimate};
                auto posterior = rules::posterior_from_r(rules::build_rule(rule, ctx, tol), ctx, tol);
                row.err_posterior_l1 = detail::err_l1(posterior.entries(), refs.bayes_posterior);
                row.err_posterior_linf =
                    detail::err_linf(posterior.entries(), refs.bayes_posterior);
                row.min_entry = std::min(row.min_entry, posterior.min_entry());
                row.max_colsum_dev = posterior.max_colsum_deviation();
            } catch (const ZeroMarginalError&) {
                row.err_posterior_l1 = nan;
                row.err_posterior_linf = nan;
                row.max_colsum_dev = nan;
            }
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

struct PerturbationRow {
    double epsilon = 0.0;
    double err_prior_l1 = 0.0;
    double err_prior_linf = 0.0;
    double err_posterior_l1 = 0.0;
    double err_posterior_linf = 0.0;
    double min_entry = 0.0;
    double max_colsum_dev = 0.0;
};

/// Deterministic companion to the sampled experiment: perturb the exact
/// observable marginal along (1,-1,0,...) by each epsilon and record the same
/// errors. The inference map is affine, so prior errors scale linearly in
/// epsilon.
inline std::vector<PerturbationRow> perturbation_scan(const JointDist& truth,
                                                      const rules::RuleExpr& rule,
                                                      const std::vector<double>& epsilons,
                                                      const Tolerances& tol = {}) {
    const auto refs = detail::truth_refs(truth, tol);
    if (refs.prior_a.size() < 2)
        throw DimensionError("perturbation_scan: observable needs at least two outcomes");
    Vector dir = Vector::Zero(refs.prior_a.size());
    dir(0) = 1.0;
    dir(1) = -1.0;

    std::vector<PerturbationRow> rows;
    rows.reserve(epsilons.size());
    for (double eps : epsilons) {
        Vector observed = refs.prior_a + eps * dir;
        if (observed.minCoeff() <= tol.support_eps)
            throw DomainError("perturbation_scan: epsilon " + format_double(eps) +
                              " drives the observed marginal out of the simplex");
        ProbVector obs(observed, refs.model.row_labels(), tol);

        PerturbationRow row;
        row.epsilon = eps;
        QuasiVector prior = infer_hidden_marginal(refs.model, obs, tol);
        row.err_prior_l1 = detail::err_l1(prior.entries(), refs.prior_b);
        row.err_prior_linf = detail::err_linf(prior.entries(), refs.prior_b);
        row.min_entry = prior.min_entry();

        rules::RuleContext ctx{refs.model, prior, obs};
        auto posterior = rules::posterior_from_r(rules::build_rule(rule, ctx, tol), ctx, tol);
        row.err_posterior_l1 = detail::err_l1(posterior.entries(), refs.bayes_posterior);
        row.err_posterior_linf = detail::err_linf(posterior.entries(), refs.bayes_posterior);
        row.min_entry = std::min(row.min_entry, posterior.min_entry());
        row.max_colsum_dev = posterior.max_colsum_deviation();
        rows.push_back(row);
    }
    return rows;
}

} // namespace qinfer::inference
