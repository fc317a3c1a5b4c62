#include "commands.hpp"

#include "mortrisk/errors.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace mortrisk;
using namespace mortrisk::cli;

namespace {

constexpr int kConfigVersion = 1;

void add_sampler_options(CLI::App& fit, FitOptions& o) {
    auto& s = o.sampler;
    fit.add_option("--chains", s.n_chains, "Number of chains")->capture_default_str();
    fit.add_option("--iters", s.n_iters, "Iterations per chain, burn-in included")->capture_default_str();
    fit.add_option("--burn-in", s.burn_in, "Burn-in iterations per chain")->capture_default_str();
    fit.add_option("--thin", s.thin, "Keep every k-th post-burn-in iteration")->capture_default_str();
    fit.add_option("--seed", s.seed, "Master seed")->capture_default_str();
    fit.add_option("--adapt", s.adapt_during_burnin, "Tune proposal scales during burn-in")->capture_default_str();
    fit.add_option("--target-accept-block", s.target_accept_block, "Adaptation target for theta blocks")
        ->capture_default_str();
    fit.add_option("--target-accept-scalar", s.target_accept_scalar, "Adaptation target for mu and sigma2")
        ->capture_default_str();
    fit.add_option("--scale-theta", s.initial_scales.theta_default, "Initial theta random-walk sd (both risks)")
        ->capture_default_str()
        ->each([&s](const std::string&) { s.initial_scales.theta_prepay = s.initial_scales.theta_default; });
    fit.add_option("--scale-mu", s.initial_scales.mu_default, "Initial mu random-walk sd (both risks)")
        ->capture_default_str()
        ->each([&s](const std::string&) { s.initial_scales.mu_prepay = s.initial_scales.mu_default; });
    fit.add_option("--scale-a", s.initial_scales.a_default, "Initial sigma2 move factor a in (0, 1) (both risks)")
        ->capture_default_str()
        ->each([&s](const std::string&) { s.initial_scales.a_prepay = s.initial_scales.a_default; });
    fit.add_option("--prior-theta-sd", o.prior.theta_sd, "Prior sd of regression coefficients")->capture_default_str();
    fit.add_option("--prior-mu-sd", o.prior.mu_sd, "Prior sd of mu_D and mu_P")->capture_default_str();
    fit.add_option("--prior-sigma2-shape", o.prior.sigma2_shape, "Inverse-gamma shape for sigma2")
        ->capture_default_str();
    fit.add_option("--prior-sigma2-rate", o.prior.sigma2_rate, "Inverse-gamma rate for sigma2")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian competing-risks model for mortgage default and prepayment"};
    app.name("mortrisk");
    app.set_config("--config", "", "Read options from a TOML/INI config file");
    app.require_subcommand(0, 1);

    GlobalOptions global;
    int config_version = kConfigVersion;
    bool print_config = false;
    app.add_option("--config-version", config_version, "Config schema version")->capture_default_str();
    app.add_option("--out-dir,-o", global.out_dir, "Output directory")
        ->envname("MORTRISK_OUT_DIR")
        ->capture_default_str();
    app.add_option("--threads,-j", global.threads, "Worker thread cap; never changes results")
        ->envname("MORTRISK_THREADS")
        ->check(CLI::Range(1u, 1024u))
        ->capture_default_str();
    app.add_flag("--quiet,-q", global.quiet, "Suppress console summaries");
    app.add_flag("--print-config", print_config, "Print the effective configuration with all defaults and exit")
        ->configurable(false);

    IngestOptions ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Turn loan-level origination and performance files into a dataset");
    ingest_cmd->add_option("--origination", ingest.origination, "Origination file");
    ingest_cmd->add_option("--performance", ingest.performance, "Monthly performance file");
    ingest_cmd->add_option("--schema", ingest.schema, "Ingestion schema JSON (default: built-in layout)");

    FitOptions fit;
    auto* fit_cmd = app.add_subcommand("fit", "Sample the posterior with Metropolis-within-Gibbs");
    fit_cmd->add_option("--dataset", fit.dataset, "Dataset CSV");
    fit_cmd->add_flag("--empty-dataset", fit.empty_dataset, "Drop all loans and sample the prior");
    fit_cmd->add_option("--init", fit.init, "Truth JSON whose parameters start every chain");
    fit_cmd->add_option("--rhat-gate", fit.rhat_gate, "Exit 5 when any split-Rhat exceeds this")->capture_default_str();
    fit_cmd->add_flag("--allow-nonconverged", fit.allow_nonconverged, "Exit 0 even when the Rhat gate fails");
    add_sampler_options(*fit_cmd, fit);

    PredictOptions predict;
    auto* predict_cmd = app.add_subcommand("predict", "Posterior predictive classification and curves per loan");
    predict_cmd->add_option("--dataset", predict.dataset, "Dataset CSV");
    predict_cmd->add_option("--draws", predict.draws, "Draws CSV from fit");
    predict_cmd->add_option("--n-sims", predict.n_sims, "Simulated (t_D, t_P) pairs per loan")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    predict_cmd->add_option("--draw-stride", predict.draw_stride, "Use every k-th draw")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    predict_cmd->add_option("--seed", predict.seed, "Master seed")->capture_default_str();
    predict_cmd->add_flag("--curves", predict.curves, "Write curves/<loan_id>.csv per loan");
    predict_cmd->add_option("--curve-points", predict.curve_points, "Grid points per curve")
        ->check(CLI::Range(2, 100000))
        ->capture_default_str();
    predict_cmd->add_option("--loan", predict.loans, "Only these loan ids (repeatable)");
    predict_cmd->add_option("--table-points", predict.predictive.table_points, "Lookup table size")
        ->capture_default_str();
    predict_cmd->add_option("--rel-tol", predict.predictive.rel_tol, "Inverse solve relative tolerance")
        ->capture_default_str();

    cli::DiagnoseOptions diag;
    auto* diag_cmd = app.add_subcommand("diagnose", "Residuals, observed quantiles and interval coverage");
    diag_cmd->add_option("--dataset", diag.dataset, "Dataset CSV");
    diag_cmd->add_option("--draws", diag.draws, "Draws CSV from fit");
    diag_cmd->add_option("--level", diag.level, "Central interval level")->capture_default_str();
    diag_cmd->add_option("--draw-stride", diag.draw_stride, "Use every k-th draw")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    diag_cmd->add_option("--residuals", diag.residuals, "Compute standardized residuals")->capture_default_str();

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic benchmark dataset with known parameters");
    sim_cmd->add_option("--truth", sim.truth, "Truth JSON to simulate from (overrides the options below)");
    sim_cmd->add_option("--n-loans", sim.n_loans, "Number of loans")->capture_default_str();
    sim_cmd->add_option("--censor-time", sim.censor_time, "Administrative censoring time in years")
        ->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed, "Seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }
    if (print_config) {
        std::cout << app.config_to_str(true, true);
        return kOk;
    }
    if (config_version != kConfigVersion) {
        std::fprintf(stderr, "mortrisk: unsupported config-version %d (expected %d)\n", config_version,
                     kConfigVersion);
        return kInputError;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return kInputError;
    }

    try {
        if (*ingest_cmd) return run_ingest(global, ingest);
        if (*fit_cmd) return run_fit(global, fit);
        if (*predict_cmd) return run_predict(global, predict);
        if (*diag_cmd) return run_diagnose(global, diag);
        if (*sim_cmd) return run_simulate(global, sim);
    } catch (const CommandError& e) {
        std::fprintf(stderr, "mortrisk: %s\n", e.what());
        return e.code();
    } catch (const SchemaMismatch& e) {
        std::fprintf(stderr, "mortrisk: schema mismatch: %s\n", e.what());
        return kSchemaMismatch;
    } catch (const InitializationError& e) {
        std::fprintf(stderr, "mortrisk: sampler initialization failed: %s\n", e.what());
        return kInitFailure;
    } catch (const IoError& e) {
        std::fprintf(stderr, "mortrisk: %s\n", e.what());
        return kInputError;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "mortrisk: %s\n", e.what());
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "mortrisk: invalid input: %s\n", e.what());
        return kInputError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "mortrisk: %s\n", e.what());
        return 1;
    }
    return kOk;
}
