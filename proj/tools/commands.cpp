#include "commands.hpp"

#include "mortrisk/dataset_io.hpp"
#include "mortrisk/diagnostics.hpp"
#include "mortrisk/draws_io.hpp"
#include "mortrisk/errors.hpp"
#include "mortrisk/ingest.hpp"
#include "mortrisk/reports.hpp"
#include "mortrisk/summary.hpp"
#include "mortrisk/synth.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace mortrisk::cli {
namespace {

namespace fs = std::filesystem;

fs::path prepare_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
    return fs::path(dir);
}

std::ifstream open_input(const std::string& path, const char* what) {
    if (path.empty()) throw CommandError(kInputError, std::string("missing ") + what + " path");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(std::string("cannot read ") + what + " file " + path);
    return in;
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    writer(out);
    if (!out) throw IoError("failed writing " + path.string());
}

Dataset load_dataset(const std::string& path) {
    auto in = open_input(path, "dataset");
    return read_dataset(in);
}

PosteriorSamples load_draws(const std::string& path, std::size_t stride) {
    auto in = open_input(path, "draws");
    auto samples = read_draws(in);
    if (samples.empty()) throw CommandError(kInputError, "draws file " + path + " holds no draws");
    return stride > 1 ? samples.subsample(stride) : samples;
}

}  // namespace

int run_ingest(const GlobalOptions& g, const IngestOptions& o) {
    const IngestSchema schema = o.schema.empty() ? IngestSchema::freddie_mac() : read_ingest_schema_file(o.schema);
    auto orig = open_input(o.origination, "origination");
    auto perf = open_input(o.performance, "performance");
    const auto result = ingest(orig, perf, schema);

    const auto dir = prepare_dir(g.out_dir);
    write_file(dir / "dataset.csv", [&](std::ostream& out) { write_dataset(out, result.data); });
    write_file(dir / "preprocess.json", [&](std::ostream& out) { write_preprocess_spec(out, result.spec); });
    write_file(dir / "rejects.csv", [&](std::ostream& out) { write_rejects_csv(out, result.rejects); });

    if (!g.quiet) {
        const auto c = result.data.counts();
        const double n = static_cast<double>(std::max<std::size_t>(c.total(), 1));
        std::printf("origination lines: %zu\n", result.origination_lines);
        std::printf("performance lines: %zu (orphans: %zu)\n", result.performance_lines,
                    result.orphan_performance_lines);
        std::printf("prepaid:   %zu (%.2f%%)\n", c.prepaid, 100.0 * c.prepaid / n);
        std::printf("active:    %zu (%.2f%%)\n", c.active, 100.0 * c.active / n);
        std::printf("defaulted: %zu (%.2f%%)\n", c.defaulted, 100.0 * c.defaulted / n);
        std::printf("rejected:  %zu\n", result.rejects.size());
        for (const auto& [reason, count] : result.excluded) std::printf("  excluded %s: %zu\n", reason.c_str(), count);
    }
    return kOk;
}

int run_fit(const GlobalOptions& g, const FitOptions& o) {
    Dataset data;
    if (!o.dataset.empty()) data = load_dataset(o.dataset);
    if (o.empty_dataset) {
        data = Dataset(o.dataset.empty() ? benchmark_schema(3) : data.schema());
    } else if (o.dataset.empty()) {
        throw CommandError(kInputError, "fit needs --dataset (or --empty-dataset for a prior-only run)");
    }

    SamplerConfig cfg = o.sampler;
    cfg.threads = g.threads;
    if (!o.init.empty()) {
        auto in = open_input(o.init, "init");
        cfg.initial_params = read_truth_json(in).true_params;
    }
    try {
        cfg.validate();
        o.prior.validate();
    } catch (const std::invalid_argument& e) {
        throw CommandError(kInputError, e.what());
    }

    const auto samples = run_sampler(data, o.prior, cfg);
    const auto summaries = summarize(samples);
    const auto dir = prepare_dir(g.out_dir);
    write_file(dir / "draws.csv", [&](std::ostream& out) { write_draws(out, samples); });
    write_file(dir / "summary.csv", [&](std::ostream& out) { write_summary_csv(out, summaries); });
    write_file(dir / "acceptance.csv", [&](std::ostream& out) { write_acceptance_csv(out, samples.acceptance); });

    double worst = 0.0;
    std::string worst_name;
    for (const auto& s : summaries) {
        if (s.rhat && *s.rhat > worst) {
            worst = *s.rhat;
            worst_name = s.name;
        }
    }
    if (!g.quiet) {
        std::printf("%-36s %12s %12s %12s %8s %8s\n", "parameter", "median", "q2.5", "q97.5", "rhat", "ess");
        for (const auto& s : summaries) {
            std::printf("%-36s %12.5g %12.5g %12.5g %8s %8s\n", s.name.c_str(), s.median, s.q025, s.q975,
                        s.rhat ? std::to_string(*s.rhat).substr(0, 6).c_str() : "NA",
                        s.ess ? std::to_string(static_cast<long>(*s.ess)).c_str() : "NA");
        }
        std::printf("draws: %zu from %d chains; max split-Rhat %.4f (%s)\n", samples.size(), cfg.n_chains, worst,
                    worst_name.c_str());
    }
    if (worst > o.rhat_gate && !o.allow_nonconverged) {
        std::fprintf(stderr, "mortrisk: not converged: split-Rhat %.4f for %s exceeds %.3g "
                             "(outputs kept; pass --allow-nonconverged to accept)\n",
                     worst, worst_name.c_str(), o.rhat_gate);
        return kNotConverged;
    }
    return kOk;
}

int run_predict(const GlobalOptions& g, const PredictOptions& o) {
    const Dataset data = load_dataset(o.dataset);
    const auto samples = load_draws(o.draws, o.draw_stride);
    require_schema(samples, data.schema());

    std::vector<LoanObservation> loans;
    if (o.loans.empty()) {
        loans = data.loans();
    } else {
        const std::set<std::string> wanted(o.loans.begin(), o.loans.end());
        for (const auto& l : data.loans()) {
            if (wanted.count(l.id())) loans.push_back(l);
        }
        if (loans.size() != wanted.size()) throw CommandError(kInputError, "unknown loan id in --loan");
    }

    PortfolioOptions po;
    po.n_sims = o.n_sims;
    po.seed = o.seed;
    po.threads = g.threads;
    po.predictive = o.predictive;
    const auto results = classify_portfolio(loans, samples, po);

    const auto dir = prepare_dir(g.out_dir);
    write_file(dir / "classification.csv",
               [&](std::ostream& out) { write_classification_csv(out, loans, results); });
    if (o.curves) {
        const auto curve_dir = prepare_dir((dir / "curves").string());
        for (const auto& loan : loans) {
            const PredictiveLaw d(loan.covariates(), samples, RiskKind::Default, loan.maturity(), o.predictive);
            const PredictiveLaw p(loan.covariates(), samples, RiskKind::Prepay, loan.maturity(), o.predictive);
            const auto grid = log_grid(1.0 / 12.0, loan.maturity(), o.curve_points);
            write_file(curve_dir / (loan.id() + ".csv"), [&](std::ostream& out) { write_curve_csv(out, d, p, grid); });
        }
    }
    if (!g.quiet) {
        std::printf("classified %zu loans with %zu simulated pairs each from %zu draws\n", loans.size(), o.n_sims,
                    samples.size());
    }
    return kOk;
}

int run_diagnose(const GlobalOptions& g, const DiagnoseOptions& o) {
    const Dataset data = load_dataset(o.dataset);
    const auto samples = load_draws(o.draws, o.draw_stride);
    require_schema(samples, data.schema());
    if (!(o.level >= 0.0 && o.level <= 1.0)) throw CommandError(kInputError, "--level must lie in [0, 1]");

    mortrisk::DiagnoseOptions opt;
    opt.level = o.level;
    opt.residuals = o.residuals;
    opt.threads = g.threads;
    const auto report = diagnose(data.loans(), samples, opt);

    const auto dir = prepare_dir(g.out_dir);
    write_file(dir / "residuals.csv", [&](std::ostream& out) { write_residuals_csv(out, report); });
    write_file(dir / "quantiles.csv", [&](std::ostream& out) { write_quantiles_csv(out, report); });
    write_file(dir / "coverage.csv", [&](std::ostream& out) { write_coverage_csv(out, report); });
    write_file(dir / "diagnostics_summary.csv",
               [&](std::ostream& out) { write_diagnostics_summary_csv(out, report); });

    if (!g.quiet) {
        auto line = [](const char* name, const CategoryCoverage& c, const QuantileSummary& q) {
            if (c.n == 0) {
                std::printf("%-8s n=0\n", name);
                return;
            }
            std::printf("%-8s n=%zu coverage=%.4f median quantile=%.4f\n", name, c.n, *c.rate(), *q.median);
        };
        std::printf("central %.0f%% intervals\n", 100.0 * o.level);
        line("default", report.defaulted, report.defaulted_quantiles);
        line("prepaid", report.prepaid, report.prepaid_quantiles);
    }
    return kOk;
}

int run_simulate(const GlobalOptions& g, const SimulateOptions& o) {
    BenchmarkConfig cfg = BenchmarkConfig::defaults();
    if (!o.truth.empty()) {
        auto in = open_input(o.truth, "truth");
        cfg = read_truth_json(in);
    } else {
        cfg.n_loans = o.n_loans;
        cfg.censor_time = o.censor_time;
        cfg.seed = o.seed;
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw CommandError(kInputError, e.what());
    }
    const auto bench = make_benchmark(cfg);
    const auto dir = prepare_dir(g.out_dir);
    write_file(dir / "dataset.csv", [&](std::ostream& out) { write_dataset(out, bench.data); });
    write_file(dir / "truth.json", [&](std::ostream& out) { write_truth_json(out, cfg); });
    if (!g.quiet) {
        const auto c = bench.data.counts();
        std::printf("simulated %zu loans: %zu defaulted, %zu prepaid, %zu active\n", c.total(), c.defaulted,
                    c.prepaid, c.active);
    }
    return kOk;
}

}  // namespace mortrisk::cli
