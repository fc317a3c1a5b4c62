#include "mortrisk/reports.hpp"

#include "mortrisk/csv.hpp"
#include "mortrisk/parallel.hpp"
#include "mortrisk/random.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace mortrisk {
namespace {

std::string optional_text(const std::optional<double>& v) { return v ? csv::format_double(*v) : "NA"; }

}  // namespace

std::vector<Classification> classify_portfolio(std::span<const LoanObservation> loans,
                                               const PosteriorSamples& samples, const PortfolioOptions& options) {
    if (options.n_sims == 0) throw std::invalid_argument("classify_portfolio: n_sims must be positive");
    options.predictive.validate();
    std::vector<Classification> out(loans.size());
    parallel_for(loans.size(), options.threads, [&](std::size_t i) {
        auto rng = make_stream(options.seed, i);
        out[i] = classify(loans[i].covariates(), samples, loans[i].maturity(), options.n_sims, rng,
                          options.predictive);
    });
    return out;
}

void write_classification_csv(std::ostream& out, std::span<const LoanObservation> loans,
                              std::span<const Classification> results) {
    if (loans.size() != results.size()) {
        throw std::invalid_argument("write_classification_csv: one result per loan required");
    }
    out << "loan_id,maturity,p_default,p_prepay,p_mature,n_default,n_prepay,n_mature,n_sims\n";
    for (std::size_t i = 0; i < loans.size(); ++i) {
        const auto& c = results[i];
        out << loans[i].id() << ',' << csv::format_double(loans[i].maturity()) << ','
            << csv::format_double(c.p_default) << ',' << csv::format_double(c.p_prepay) << ','
            << csv::format_double(c.p_mature) << ',' << c.n_default << ',' << c.n_prepay << ',' << c.n_mature
            << ',' << c.n_sims << '\n';
    }
}

std::vector<double> log_grid(double t_min, double t_max, std::size_t points) {
    if (!(t_min > 0.0) || !(t_max > t_min) || points < 2) {
        throw std::invalid_argument("log_grid: need 0 < t_min < t_max and at least two points");
    }
    std::vector<double> grid(points);
    const double lo = std::log(t_min), step = (std::log(t_max) - lo) / static_cast<double>(points - 1);
    for (std::size_t k = 0; k < points; ++k) grid[k] = std::exp(lo + step * static_cast<double>(k));
    grid.front() = t_min;
    grid.back() = t_max;
    return grid;
}

void write_curve_csv(std::ostream& out, const PredictiveLaw& default_law, const PredictiveLaw& prepay_law,
                     std::span<const double> grid) {
    out << "t,reliability_default,density_default,reliability_prepay,density_prepay\n";
    for (double t : grid) {
        out << csv::format_double(t) << ',' << csv::format_double(default_law.reliability(t)) << ','
            << csv::format_double(default_law.density(t)) << ',' << csv::format_double(prepay_law.reliability(t))
            << ',' << csv::format_double(prepay_law.density(t)) << '\n';
    }
}

void write_residuals_csv(std::ostream& out, const DiagnosticsReport& report) {
    out << "loan_id,category,residual\n";
    for (const auto& d : report.loans) {
        if (!d.residual) continue;
        out << d.loan_id << ',' << to_string(d.category) << ',' << csv::format_double(*d.residual) << '\n';
    }
}

void write_quantiles_csv(std::ostream& out, const DiagnosticsReport& report) {
    out << "loan_id,category,quantile\n";
    for (const auto& d : report.loans) {
        out << d.loan_id << ',' << to_string(d.category) << ',' << csv::format_double(d.quantile) << '\n';
    }
}

void write_coverage_csv(std::ostream& out, const DiagnosticsReport& report) {
    out << "loan_id,category,lower,upper,in_interval\n";
    for (const auto& d : report.loans) {
        out << d.loan_id << ',' << to_string(d.category) << ',' << csv::format_double(d.interval.lower) << ','
            << csv::format_double(d.interval.upper) << ',' << (d.in_interval ? 1 : 0) << '\n';
    }
}

void write_diagnostics_summary_csv(std::ostream& out, const DiagnosticsReport& report) {
    out << "category,n,hits,coverage,median_quantile,mean_quantile,level\n";
    auto row = [&](const char* name, const CategoryCoverage& c, const QuantileSummary& q) {
        out << name << ',' << c.n << ',' << c.hits << ',' << optional_text(c.rate()) << ','
            << optional_text(q.median) << ',' << optional_text(q.mean) << ',' << csv::format_double(report.level)
            << '\n';
    };
    row("default", report.defaulted, report.defaulted_quantiles);
    row("prepaid", report.prepaid, report.prepaid_quantiles);
}

}  // namespace mortrisk
