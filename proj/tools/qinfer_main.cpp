// qinfer command-line front end.
//
// Exit codes are a stable contract:
//   0  success / all checks passed
//   1  validation failure (a check in a report failed)
//   2  input error (parse, dimension, usage, invalid distribution)
//   3  numerical degeneracy (singular, ill-conditioned, zero marginal)
//   4  rule-spec error (bad grammar, even-length composition)

#include "CLI11.hpp"

#include "qinfer/qinfer.hpp"

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace qinfer;
using nlohmann::json;

constexpr std::uint64_t kDefaultSeed = 42; // default for every randomized command

struct CommonOpts {
    Tolerances tol;
    std::string format;
    std::string output;
    bool normalize = false;
};

void add_tolerance_flags(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--sum-tol", opts.tol.sum_tol, "normalization tolerance")
        ->envname("QINFER_SUM_TOL")
        ->capture_default_str();
    cmd->add_option("--cond-max", opts.tol.cond_max, "condition-number cap for inversions")
        ->envname("QINFER_COND_MAX")
        ->capture_default_str();
    cmd->add_option("--support-eps", opts.tol.support_eps,
                    "marginal mass below this counts as zero")
        ->envname("QINFER_SUPPORT_EPS")
        ->capture_default_str();
}

void add_output_flags(CLI::App* cmd, CommonOpts& opts, const std::string& default_format,
                      const std::vector<std::string>& allowed) {
    opts.format = default_format;
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember(allowed))
        ->envname("QINFER_FORMAT")
        ->capture_default_str();
    cmd->add_option("-o,--output", opts.output, "write the report here instead of stdout");
}

void emit(const CommonOpts& opts, const std::string& content) {
    if (opts.output.empty())
        std::cout << content;
    else
        io::write_file(opts.output, content);
}

std::string tol_header(const CommonOpts& opts) {
    return "# sum_tol=" + format_double(opts.tol.sum_tol) +
           " cond_max=" + format_double(opts.tol.cond_max) +
           " support_eps=" + format_double(opts.tol.support_eps) +
           " normalize=" + (opts.normalize ? std::string("on") : std::string("off")) + "\n";
}

json tol_json(const CommonOpts& opts) {
    return json{{"sum_tol", opts.tol.sum_tol},
                {"cond_max", opts.tol.cond_max},
                {"support_eps", opts.tol.support_eps},
                {"normalize", opts.normalize}};
}

io::LabeledMatrix load_input(const std::string& path, const CommonOpts& opts,
                             bool per_column = false) {
    io::LabeledMatrix m = io::load_matrix(path);
    if (opts.normalize) {
        if (per_column) {
            for (Index j = 0; j < m.data.cols(); ++j) {
                const double s = m.data.col(j).sum();
                if (s != 0.0)
                    m.data.col(j) /= s;
            }
        } else {
            const double s = m.data.sum();
            if (s != 0.0)
                m.data /= s;
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

struct CheckLine {
    std::string name;
    std::string detail;
    enum class State { Pass, Fail, Info, Skip } state = State::Pass;
};

int run_validate(const std::string& input, const CommonOpts& opts, double axiom_tol) {
    std::vector<CheckLine> lines;
    // normalization is a reported check, not a load-time requirement
    auto lm = load_input(input, opts);
    if (lm.data.rows() == 0 || lm.data.cols() == 0)
        throw ParseError("validate: empty matrix");
    if (!lm.data.allFinite())
        throw ParseError("validate: non-finite entries");

    const double norm_res = std::abs(lm.data.sum() - 1.0);
    lines.push_back({"normalization", "residual=" + format_double(norm_res),
                     norm_res <= opts.tol.sum_tol ? CheckLine::State::Pass
                                                  : CheckLine::State::Fail});
    const double min_entry = lm.data.minCoeff();
    lines.push_back({"nonnegative",
                     "min_entry=" + format_double(min_entry) +
                         (min_entry >= -opts.tol.sum_tol ? " (kolmogorov-compatible)"
                                                         : " (quasi joint)"),
                     CheckLine::State::Info});

    if (norm_res <= opts.tol.sum_tol) {
        auto joint = io::as_joint(lm, opts.tol);
        if (is_product(joint, opts.tol.sum_tol)) {
            lines.push_back({"rules", "skipped: product distribution has no reverse ordering",
                             CheckLine::State::Skip});
        } else {
            try {
                auto ctx = rules::RuleContext::from_joint(joint, opts.tol);
                for (const char* name : {"bayes", "inversion"}) {
                    auto r = rules::build_rule(rules::parse_rule(name), ctx, opts.tol);
                    auto rep = rules::validate_r(r, ctx, opts.tol.sum_tol);
                    lines.push_back({std::string("rule_") + name,
                                     "ones=" + format_double(rep.ones_residual) +
                                         " marginal=" + format_double(rep.marginal_residual) +
                                         " posterior_colsum=" +
                                         format_double(rep.posterior_colsum_dev),
                                     rep.pass() ? CheckLine::State::Pass
                                                : CheckLine::State::Fail});
                }
                auto rev = reverse_joint(joint, opts.tol);
                auto jm = marginals(joint, opts.tol);
                auto rm = marginals(rev, opts.tol);
                const double marg_res = std::max(
                    (rm.row.entries() - jm.col.entries()).cwiseAbs().maxCoeff(),
                    (rm.col.entries() - jm.row.entries()).cwiseAbs().maxCoeff());
                lines.push_back({"reverse_marginals", "residual=" + format_double(marg_res),
                                 marg_res <= opts.tol.sum_tol ? CheckLine::State::Pass
                                                              : CheckLine::State::Fail});
                const double invol_res =
                    (reverse_joint(rev, opts.tol).entries() - joint.entries())
                        .cwiseAbs()
                        .maxCoeff();
                lines.push_back({"double_reverse", "residual=" + format_double(invol_res),
                                 invol_res <= opts.tol.sum_tol ? CheckLine::State::Pass
                                                               : CheckLine::State::Fail});
                auto axioms = seqprob::check_axioms(
                    seqprob::ProbabilityAssignment::from_joints(joint, rev), axiom_tol);
                auto axiom_line = [&](const char* name, const seqprob::AxiomCheck& c) {
                    lines.push_back({std::string("axiom_") + name,
                                     "violations=" + std::to_string(c.violation_count),
                                     c.pass ? CheckLine::State::Pass : CheckLine::State::Fail});
                };
                axiom_line("normalization", axioms.normalization);
                axiom_line("additivity", axioms.additivity);
                axiom_line("causality", axioms.causality);
            } catch (const InvalidDistribution&) {
                lines.push_back({"rules", "skipped: conditional is not column-stochastic",
                                 CheckLine::State::Skip});
            } catch (const SingularError& e) {
                lines.push_back({"rules", std::string("skipped: ") + e.what(),
                                 CheckLine::State::Skip});
            } catch (const IllConditionedError& e) {
                lines.push_back({"rules", std::string("skipped: ") + e.what(),
                                 CheckLine::State::Skip});
            }
        }
    }

    bool all_pass = true;
    for (const auto& l : lines)
        if (l.state == CheckLine::State::Fail)
            all_pass = false;

    if (opts.format == "json") {
        json checks = json::array();
        for (const auto& l : lines) {
            const char* st = l.state == CheckLine::State::Pass   ? "pass"
                             : l.state == CheckLine::State::Fail ? "fail"
                             : l.state == CheckLine::State::Info ? "info"
                                                                 : "skip";
            checks.push_back(json{{"check", l.name}, {"detail", l.detail}, {"state", st}});
        }
        json out{{"command", "validate"}, {"input", input},      {"tolerances", tol_json(opts)},
                 {"axiom_tol", axiom_tol}, {"checks", checks},    {"pass", all_pass}};
        emit(opts, out.dump(2) + "\n");
    } else {
        std::string out = "# qinfer validate\n# input=" + input + "\n" + tol_header(opts) +
                          "# axiom_tol=" + format_double(axiom_tol) + "\n";
        for (const auto& l : lines) {
            const char* st = l.state == CheckLine::State::Pass   ? "PASS"
                             : l.state == CheckLine::State::Fail ? "FAIL"
                             : l.state == CheckLine::State::Info ? "INFO"
                                                                 : "SKIP";
            out += l.name;
            out.append(l.name.size() < 22 ? 22 - l.name.size() : 1, ' ');
            out += l.detail + "  " + st + "\n";
        }
        out += std::string("RESULT: ") + (all_pass ? "PASS" : "FAIL") + "\n";
        emit(opts, out);
    }
    return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// infer
// ---------------------------------------------------------------------------

int run_infer(const std::string& model_path, const std::string& observed_path,
              const std::string& rule_spec, bool clip, const CommonOpts& opts) {
    const rules::RuleExpr rule = rules::parse_rule(rule_spec);
    auto model = io::as_model(load_input(model_path, opts, /*per_column=*/true), opts.tol);
    auto observed = io::as_quasi_vector(load_input(observed_path, opts), opts.tol);

    QuasiVector prior = inference::infer_hidden_marginal(model, observed, opts.tol);
    rules::RuleContext ctx{model, prior, observed};
    auto posterior = rules::posterior_from_r(rules::build_rule(rule, ctx, opts.tol), ctx, opts.tol);
    auto diag = inference::diagnose(prior, posterior, condition_estimate(model.entries()));

    std::optional<ProbVector> projected;
    if (clip)
        projected = inference::clip_project(prior);

    if (opts.format == "csv") {
        std::string out = "# qinfer infer\n# model=" + model_path + " observed=" + observed_path +
                          " rule=" + rule.str() + "\n" + tol_header(opts);
        out += "# inferred_prior\n" + io::matrix_to_csv(io::to_labeled(prior));
        out += "# posterior\n" + io::matrix_to_csv(io::to_labeled(posterior));
        if (projected)
            out += "# clip_projected_prior\n" + io::matrix_to_csv(io::to_labeled(projected->quasi()));
        out += "# diagnostics\n";
        out += "condition_estimate," + format_double(diag.condition_estimate) + "\n";
        out += "max_colsum_dev," + format_double(diag.max_colsum_dev) + "\n";
        out += "min_prior_entry," + format_double(diag.min_prior_entry) + "\n";
        out += "min_posterior_entry," + format_double(diag.min_posterior_entry) + "\n";
        out += std::string("prior_has_negative,") + (diag.prior_has_negative ? "1" : "0") + "\n";
        out += std::string("posterior_has_negative,") +
               (diag.posterior_has_negative ? "1" : "0") + "\n";
        emit(opts, out);
    } else {
        json diagnostics{{"condition_estimate", diag.condition_estimate},
                         {"max_colsum_dev", diag.max_colsum_dev},
                         {"colsum_devs", diag.colsum_devs},
                         {"min_prior_entry", diag.min_prior_entry},
                         {"min_posterior_entry", diag.min_posterior_entry},
                         {"prior_has_negative", diag.prior_has_negative},
                         {"posterior_has_negative", diag.posterior_has_negative}};
        json out{{"command", "infer"},
                 {"rule", rule.str()},
                 {"tolerances", tol_json(opts)},
                 {"inferred_prior", io::matrix_to_json(io::to_labeled(prior))},
                 {"posterior", io::matrix_to_json(io::to_labeled(posterior))},
                 {"diagnostics", diagnostics}};
        if (projected)
            out["clip_projected_prior"] = io::matrix_to_json(io::to_labeled(projected->quasi()));
        emit(opts, out.dump(2) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// experiment
// ---------------------------------------------------------------------------

int run_experiment(const std::string& truth_path, const std::string& rule_spec,
                   const std::string& sizes_arg, int reps, std::uint64_t seed,
                   const std::string& metric, const CommonOpts& opts) {
    const rules::RuleExpr rule = rules::parse_rule(rule_spec);
    std::vector<long long> sizes;
    for (const auto& part : [&] {
             std::vector<std::string> parts;
             std::size_t start = 0;
             while (start <= sizes_arg.size()) {
                 auto pos = sizes_arg.find(',', start);
                 if (pos == std::string::npos) {
                     parts.push_back(sizes_arg.substr(start));
                     break;
                 }
                 parts.push_back(sizes_arg.substr(start, pos - start));
                 start = pos + 1;
             }
             return parts;
         }())
        sizes.push_back(parse_integer(part));

    auto joint = io::as_joint(load_input(truth_path, opts), opts.tol);
    auto report =
        inference::convergence_experiment(joint, rule, sizes, reps, seed, metric, opts.tol);

    std::string sizes_str;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (i)
            sizes_str += ',';
        sizes_str += std::to_string(sizes[i]);
    }
    if (opts.format == "json") {
        json rows = json::array();
        for (const auto& r : report.rows)
            rows.push_back(json{{"n", r.n},
                                {"repetition", r.repetition},
                                {"seed", r.seed},
                                {"error_prior", metric == "linf" ? r.err_prior_linf
                                                                 : r.err_prior_l1},
                                {"error_posterior", metric == "linf" ? r.err_posterior_linf
                                                                     : r.err_posterior_l1},
                                {"min_entry", r.min_entry},
                                {"max_colsum_dev", r.max_colsum_dev}});
        json out{{"command", "experiment"}, {"truth", truth_path},   {"rule", report.rule},
                 {"sizes", sizes},          {"reps", reps},          {"seed", seed},
                 {"metric", metric},        {"tolerances", tol_json(opts)}, {"rows", rows}};
        emit(opts, out.dump(2) + "\n");
    } else {
        std::string out = "# qinfer experiment\n# truth=" + truth_path + " rule=" + report.rule +
                          " sizes=" + sizes_str + " reps=" + std::to_string(reps) +
                          " seed=" + std::to_string(seed) + " metric=" + metric + "\n" +
                          tol_header(opts);
        out += report.to_csv();
        emit(opts, out);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// search-negative
// ---------------------------------------------------------------------------

int run_search_negative(int dim, int trials, std::uint64_t seed, bool include_fixture,
                        const CommonOpts& opts) {
    auto findings = oracle::search_negative_posterior(dim, trials, seed, include_fixture);

    if (opts.format == "csv") {
        std::string out = "# qinfer search-negative\n# dim=" + std::to_string(dim) +
                          " trials=" + std::to_string(trials) + " seed=" + std::to_string(seed) +
                          " include_fixture=" + (include_fixture ? "1" : "0") + "\n";
        out += "finding,row,col,value,joint\n";
        for (std::size_t f = 0; f < findings.size(); ++f) {
            const Matrix j = findings[f].joint.to_double();
            std::string flat;
            for (Index i = 0; i < j.rows(); ++i)
                for (Index k = 0; k < j.cols(); ++k) {
                    if (!flat.empty())
                        flat += ';';
                    flat += format_double(j(i, k));
                }
            for (const auto& [r, c, v] : findings[f].offending)
                out += std::to_string(f) + "," + std::to_string(r) + "," + std::to_string(c) +
                       "," + format_double(v) + "," + flat + "\n";
        }
        emit(opts, out);
    } else {
        json items = json::array();
        for (const auto& finding : findings) {
            json offending = json::array();
            for (const auto& [r, c, v] : finding.offending)
                offending.push_back(json{{"row", r}, {"col", c}, {"value", v}});
            io::LabeledMatrix joint{finding.joint.to_double(), default_labels('a', dim),
                                    default_labels('b', dim), VarOrder{}};
            io::LabeledMatrix post{finding.posterior.to_double(), default_labels('b', dim),
                                   default_labels('a', dim), std::nullopt};
            items.push_back(json{{"joint", io::matrix_to_json(joint)},
                                 {"posterior", io::matrix_to_json(post)},
                                 {"offending", offending}});
        }
        json out{{"command", "search-negative"},
                 {"dim", dim},
                 {"trials", trials},
                 {"seed", seed},
                 {"include_fixture", include_fixture},
                 {"findings", items}};
        emit(opts, out.dump(2) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// axioms
// ---------------------------------------------------------------------------

int run_axioms(const std::string& assignment_path, const std::string& joint_path, double tol,
               const CommonOpts& opts) {
    std::optional<seqprob::ProbabilityAssignment> assignment;
    std::string input;
    if (!assignment_path.empty()) {
        assignment.emplace(io::load_assignment(assignment_path));
        input = assignment_path;
    } else {
        auto joint = io::as_joint(load_input(joint_path, opts), opts.tol);
        assignment.emplace(seqprob::ProbabilityAssignment::from_joint(joint, opts.tol));
        input = joint_path;
    }
    const auto report = seqprob::check_axioms(*assignment, tol);

    auto check_json = [](const seqprob::AxiomCheck& c) {
        json violations = json::array();
        for (const auto& v : c.violations)
            violations.push_back(json{{"ordering", v.ordering},
                                      {"sequence", v.sequence},
                                      {"magnitude", v.magnitude}});
        return json{{"pass", c.pass},
                    {"violation_count", c.violation_count},
                    {"violations", violations}};
    };

    if (opts.format == "json") {
        json out{{"command", "axioms"},
                 {"input", input},
                 {"tol", tol},
                 {"normalization", check_json(report.normalization)},
                 {"additivity", check_json(report.additivity)},
                 {"causality", check_json(report.causality)},
                 {"pass", report.pass()}};
        emit(opts, out.dump(2) + "\n");
    } else {
        std::string out = "# qinfer axioms\n# input=" + input + "\n# tol=" + format_double(tol) +
                          "\n";
        auto line = [&](const char* name, const seqprob::AxiomCheck& c) {
            out += std::string(name) + "  violations=" + std::to_string(c.violation_count) +
                   "  " + (c.pass ? "PASS" : "FAIL") + "\n";
            for (const auto& v : c.violations)
                out += "  [" + v.ordering + "] " + v.sequence +
                       " magnitude=" + format_double(v.magnitude) + "\n";
        };
        line("normalization", report.normalization);
        line("additivity   ", report.additivity);
        line("causality    ", report.causality);
        out += std::string("RESULT: ") + (report.pass() ? "PASS" : "FAIL") + "\n";
        emit(opts, out);
    }
    return report.pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"generalized inference over finite discrete distributions"};
    app.require_subcommand(1);
    int result = 0;

    // validate
    CommonOpts validate_opts;
    std::string validate_input;
    double axiom_tol = 1e-10;
    auto* validate = app.add_subcommand(
        "validate", "check a joint file: normalization, rule conditions, sequence axioms");
    validate->add_option("joint", validate_input, "joint distribution file (.json or .csv)")
        ->required();
    validate->add_flag("--normalize", validate_opts.normalize,
                       "scale the input to total mass 1 before checking");
    validate->add_option("--axiom-tol", axiom_tol, "tolerance for the sequence-axiom checks")
        ->capture_default_str();
    add_tolerance_flags(validate, validate_opts);
    add_output_flags(validate, validate_opts, "text", {"text", "json"});
    validate->callback(
        [&] { result = run_validate(validate_input, validate_opts, axiom_tol); });

    // infer
    CommonOpts infer_opts;
    std::string infer_model, infer_observed, infer_rule = "bayes";
    bool infer_clip = false;
    auto* infer = app.add_subcommand(
        "infer", "infer the hidden marginal and a rule posterior from an observed marginal");
    infer->add_option("--model", infer_model, "column-stochastic model file")->required();
    infer->add_option("--observed", infer_observed, "observed marginal file (one column)")
        ->required();
    infer->add_option("--rule", infer_rule,
                      "bayes | inversion | zeroth | mix:<p> | compose:<term>,...")
        ->capture_default_str();
    infer->add_flag("--clip-project", infer_clip,
                    "also report the clipped-and-renormalized prior (leaves the framework)");
    infer->add_flag("--normalize", infer_opts.normalize,
                    "normalize inputs (model per column, vector by its sum)");
    add_tolerance_flags(infer, infer_opts);
    add_output_flags(infer, infer_opts, "json", {"json", "csv"});
    infer->callback(
        [&] { result = run_infer(infer_model, infer_observed, infer_rule, infer_clip, infer_opts); });

    // experiment
    CommonOpts exp_opts;
    std::string exp_truth, exp_rule = "bayes", exp_sizes, exp_metric = "l1";
    int exp_reps = 10;
    std::uint64_t exp_seed = kDefaultSeed;
    auto* experiment = app.add_subcommand(
        "experiment", "seeded convergence experiment: sample, infer, record errors as CSV");
    experiment->add_option("--truth", exp_truth, "true joint distribution file")->required();
    experiment->add_option("--rule", exp_rule, "rule used for the posterior")
        ->capture_default_str();
    experiment->add_option("--sizes", exp_sizes, "comma-separated sample sizes, e.g. 100,10000")
        ->required();
    experiment->add_option("--reps", exp_reps, "repetitions per size")->capture_default_str();
    experiment->add_option("--seed", exp_seed, "base seed; reports are byte-reproducible")
        ->envname("QINFER_SEED")
        ->capture_default_str();
    experiment->add_option("--metric", exp_metric, "error metric")
        ->check(CLI::IsMember({"l1", "linf"}))
        ->capture_default_str();
    experiment->add_flag("--normalize", exp_opts.normalize, "normalize the truth joint");
    add_tolerance_flags(experiment, exp_opts);
    add_output_flags(experiment, exp_opts, "csv", {"csv", "json"});
    experiment->callback([&] {
        result = run_experiment(exp_truth, exp_rule, exp_sizes, exp_reps, exp_seed, exp_metric,
                                exp_opts);
    });

    // search-negative
    CommonOpts search_opts;
    int search_dim = 2, search_trials = 100;
    std::uint64_t search_seed = kDefaultSeed;
    bool search_fixture = false;
    auto* search = app.add_subcommand(
        "search-negative",
        "find strictly positive joints whose inversion posterior leaves [0,1]");
    search->add_option("--dim", search_dim, "joint dimension (2..4)")->capture_default_str();
    search->add_option("--trials", search_trials, "random trials")->capture_default_str();
    search->add_option("--seed", search_seed, "seed")
        ->envname("QINFER_SEED")
        ->capture_default_str();
    search->add_flag("--include-fixture", search_fixture,
                     "prepend the canonical 2x2 fixture joint");
    add_output_flags(search, search_opts, "json", {"json", "csv"});
    search->callback([&] {
        result = run_search_negative(search_dim, search_trials, search_seed, search_fixture,
                                     search_opts);
    });

    // axioms
    CommonOpts axioms_opts;
    std::string axioms_assignment, axioms_joint;
    double axioms_tol = 1e-10;
    auto* axioms = app.add_subcommand(
        "axioms", "run the sequence-axiom checks on a multi-ordering assignment");
    auto* opt_assignment =
        axioms->add_option("--assignment", axioms_assignment, "assignment file (.json)");
    auto* opt_joint = axioms->add_option(
        "--from-joint", axioms_joint, "build the assignment from a joint and its reverse");
    opt_assignment->excludes(opt_joint);
    axioms->add_option("--tol", axioms_tol, "axiom tolerance")->capture_default_str();
    axioms->add_flag("--normalize", axioms_opts.normalize, "normalize a --from-joint input");
    add_tolerance_flags(axioms, axioms_opts);
    add_output_flags(axioms, axioms_opts, "text", {"text", "json"});
    axioms->callback([&] {
        if (axioms_assignment.empty() && axioms_joint.empty())
            throw CLI::RequiredError("--assignment or --from-joint");
        result = run_axioms(axioms_assignment, axioms_joint, axioms_tol, axioms_opts);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const RuleSpecError& e) {
        std::cerr << "rule-spec error: " << e.what() << "\n";
        return 4;
    } catch (const SingularError& e) {
        std::cerr << "numerical degeneracy: " << e.what() << "\n";
        return 3;
    } catch (const IllConditionedError& e) {
        std::cerr << "numerical degeneracy: " << e.what() << "\n";
        return 3;
    } catch (const ZeroMarginalError& e) {
        std::cerr << "numerical degeneracy: " << e.what() << "\n";
        return 3;
    } catch (const NotSquareError& e) {
        std::cerr << "numerical degeneracy: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return result;
}
