// Walk the rule family over one small joint: build the classical and
// inversion rules, mix them, compose a third-order rule, and show how the
// inferred prior feeds back into the posterior.

#include "qinfer/qinfer.hpp"

#include <iostream>

using namespace qinfer;

namespace {

void show(const char* name, const Matrix& m) {
    std::cout << name << ":\n" << m << "\n\n";
}

} // namespace

int main() {
    Matrix entries(2, 2);
    entries << 0.3, 0.2,
               0.1, 0.4;
    JointDist joint(entries); // rows A, columns B; B precedes A

    auto ctx = rules::RuleContext::from_joint(joint);
    show("model P(A|B)", ctx.model.entries());

    auto bayes = rules::r_bayes(ctx);
    auto inversion = rules::r_inversion(ctx);
    show("classical posterior", rules::posterior_from_r(bayes, ctx).entries());
    show("inversion posterior (the matrix inverse of the model)",
         rules::posterior_from_r(inversion, ctx).entries());

    // Any point on the segment between the two rules is again a rule.
    auto mixed = rules::r_mix(ctx, 0.5);
    show("p=1/2 posterior", rules::posterior_from_r(mixed, ctx).entries());

    // Odd-length alternating products give higher-order rules.
    auto third = rules::compose({bayes, inversion, bayes});
    show("third-order posterior", rules::posterior_from_r(third, ctx).entries());

    // The joint of the opposite ordering generally leaves [0,1].
    show("reverse-ordering joint", reverse_joint(joint).entries());

    // Estimation: a perturbed observation still pins down the hidden marginal
    // through the model inverse, and that estimate is a usable prior.
    Vector observed(2);
    observed << 0.6, 0.4;
    auto prior = inference::infer_hidden_marginal(
        ctx.model, QuasiVector(observed, ctx.prior_a.labels()));
    std::cout << "inferred hidden marginal from (0.6, 0.4): "
              << prior.entries().transpose() << "\n";

    auto result = inference::posterior_with_inferred_prior(
        ctx.model, ProbVector(observed, ctx.prior_a.labels()));
    std::cout << "posterior with the inferred prior (columns sum to 1):\n"
              << result.posterior.entries() << "\n";
    return 0;
}
