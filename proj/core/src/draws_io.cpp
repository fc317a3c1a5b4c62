#include "mortrisk/draws_io.hpp"

#include "mortrisk/csv.hpp"
#include "mortrisk/errors.hpp"

#include <istream>
#include <ostream>

namespace mortrisk {
namespace {

constexpr std::size_t kFixedColumns = 6;  // chain, iteration, mu/sigma2 for both risks

std::string optional_text(const std::optional<double>& v) {
    return v ? csv::format_double(*v) : "NA";
}

}  // namespace

std::vector<std::string> draws_header(const std::vector<std::string>& schema) {
    std::vector<std::string> h{"chain",          "iteration", "mu_default",
                               "sigma2_default", "mu_prepay", "sigma2_prepay"};
    for (RiskKind risk : kRisks) {
        for (const auto& name : schema) {
            h.push_back("theta_" + std::string(to_string(risk)) + "[" + name + "]");
        }
    }
    return h;
}

void write_draws(std::ostream& out, const PosteriorSamples& samples) {
    out << csv::join(draws_header(samples.schema)) << '\n';
    for (const auto& d : samples.draws) {
        const auto& p = d.params;
        out << d.chain << ',' << d.iteration << ',' << csv::format_double(p.baseline_default.mu()) << ','
            << csv::format_double(p.baseline_default.sigma2()) << ','
            << csv::format_double(p.baseline_prepay.mu()) << ','
            << csv::format_double(p.baseline_prepay.sigma2());
        for (double v : p.theta_default) out << ',' << csv::format_double(v);
        for (double v : p.theta_prepay) out << ',' << csv::format_double(v);
        out << '\n';
    }
}

PosteriorSamples read_draws(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("draws file: missing header line");
    const auto header = csv::split(csv::trim(line), ',');
    if (header.size() < kFixedColumns || (header.size() - kFixedColumns) % 2 != 0) {
        throw ParseError("draws file: malformed header");
    }
    const std::size_t p = (header.size() - kFixedColumns) / 2;
    PosteriorSamples samples;
    const std::string prefix = "theta_default[";
    for (std::size_t k = 0; k < p; ++k) {
        const std::string_view col = header[kFixedColumns + k];
        if (col.size() < prefix.size() + 1 || col.substr(0, prefix.size()) != prefix || col.back() != ']') {
            throw ParseError("draws file: unexpected column '" + std::string(col) + "'");
        }
        samples.schema.emplace_back(col.substr(prefix.size(), col.size() - prefix.size() - 1));
    }
    const auto expected = draws_header(samples.schema);
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] != expected[k]) {
            throw ParseError("draws file: unexpected column '" + std::string(header[k]) + "'");
        }
    }

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto trimmed = csv::trim(line);
        if (trimmed.empty()) continue;
        const auto fields = csv::split(trimmed, ',');
        auto fail = [&](const std::string& why) {
            return ParseError("draws file line " + std::to_string(line_no) + ": " + why);
        };
        if (fields.size() != header.size()) throw fail("wrong number of fields");
        const auto chain = csv::parse_int(fields[0]);
        const auto iteration = csv::parse_int(fields[1]);
        if (!chain || !iteration) throw fail("bad chain or iteration");
        std::vector<double> values;
        for (std::size_t k = 2; k < fields.size(); ++k) {
            const auto v = csv::parse_double(fields[k]);
            if (!v) throw fail("non-numeric value '" + std::string(fields[k]) + "'");
            values.push_back(*v);
        }
        try {
            ModelParams params;
            params.baseline_default = LognormalBaseline(values[0], values[1]);
            params.baseline_prepay = LognormalBaseline(values[2], values[3]);
            params.theta_default.assign(values.begin() + 4, values.begin() + 4 + static_cast<std::ptrdiff_t>(p));
            params.theta_prepay.assign(values.begin() + 4 + static_cast<std::ptrdiff_t>(p), values.end());
            params.validate(p);
            samples.draws.push_back(Draw{static_cast<int>(*chain), static_cast<int>(*iteration), std::move(params)});
        } catch (const std::invalid_argument& e) {
            throw fail(e.what());
        }
    }
    return samples;
}

void require_schema(const PosteriorSamples& samples, const std::vector<std::string>& schema) {
    if (samples.schema != schema) {
        throw SchemaMismatch("draws schema (" + csv::join(samples.schema) +
                             ") does not match dataset schema (" + csv::join(schema) + ")");
    }
}

void write_summary_csv(std::ostream& out, const std::vector<ParameterSummary>& rows) {
    out << "parameter,mean,sd,median,q2.5,q97.5,rhat,ess\n";
    for (const auto& r : rows) {
        out << r.name << ',' << csv::format_double(r.mean) << ',' << csv::format_double(r.sd) << ','
            << csv::format_double(r.median) << ',' << csv::format_double(r.q025) << ','
            << csv::format_double(r.q975) << ',' << optional_text(r.rhat) << ',' << optional_text(r.ess)
            << '\n';
    }
}

void write_acceptance_csv(std::ostream& out, const std::vector<ChainAcceptance>& stats) {
    out << "chain,block,phase,proposed,accepted,rate\n";
    for (const auto& c : stats) {
        for (std::size_t b = 0; b < kBlockCount; ++b) {
            const auto block = static_cast<Block>(b);
            for (int phase = 0; phase < 2; ++phase) {
                const auto& s = phase == 0 ? c.burn_in : c.sampling;
                out << c.chain << ',' << to_string(block) << ',' << (phase == 0 ? "burn_in" : "sampling")
                    << ',' << s.proposed[b] << ',' << s.accepted[b] << ','
                    << csv::format_double(s.rate(block)) << '\n';
            }
        }
    }
}

}  // namespace mortrisk
