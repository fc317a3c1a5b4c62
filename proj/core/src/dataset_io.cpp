#include "mortrisk/dataset_io.hpp"

#include "mortrisk/csv.hpp"
#include "mortrisk/errors.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace mortrisk {
namespace {

constexpr const char* kFixed[] = {"id", "status", "time_years", "maturity_years"};
constexpr std::size_t kFixedCount = 4;

}  // namespace

void write_dataset(std::ostream& out, const Dataset& data) {
    out << "id,status,time_years,maturity_years";
    for (const auto& name : data.schema()) out << ',' << name;
    out << '\n';
    for (const auto& loan : data.loans()) {
        if (loan.covariates().intervals() != 1) {
            throw std::invalid_argument("write_dataset: loan " + loan.id() +
                                        " has a time-varying covariate path");
        }
        out << loan.id() << ',' << to_string(loan.status()) << ',' << csv::format_double(loan.time())
            << ',' << csv::format_double(loan.maturity());
        for (double v : loan.covariates().value(0)) out << ',' << csv::format_double(v);
        out << '\n';
    }
}

Dataset read_dataset(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("dataset: missing header line");
    const auto header = csv::split(csv::trim(line), ',');
    if (header.size() < kFixedCount) throw ParseError("dataset: header needs id,status,time_years,maturity_years");
    for (std::size_t k = 0; k < kFixedCount; ++k) {
        if (header[k] != kFixed[k]) {
            throw ParseError("dataset: expected column '" + std::string(kFixed[k]) + "', found '" +
                             std::string(header[k]) + "'");
        }
    }
    std::vector<std::string> schema;
    for (std::size_t k = kFixedCount; k < header.size(); ++k) schema.emplace_back(header[k]);

    Dataset data(schema);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto trimmed = csv::trim(line);
        if (trimmed.empty()) continue;
        const auto fields = csv::split(trimmed, ',');
        auto fail = [&](const std::string& why) {
            return ParseError("dataset line " + std::to_string(line_no) + ": " + why);
        };
        if (fields.size() != header.size()) throw fail("wrong number of fields");
        const auto time = csv::parse_double(fields[2]);
        const auto maturity = csv::parse_double(fields[3]);
        if (!time || !maturity) throw fail("non-numeric time or maturity");
        std::vector<double> x;
        for (std::size_t k = kFixedCount; k < fields.size(); ++k) {
            const auto v = csv::parse_double(fields[k]);
            if (!v) throw fail("non-numeric covariate '" + std::string(fields[k]) + "'");
            x.push_back(*v);
        }
        try {
            data.add(LoanObservation(std::string(fields[0]), parse_loan_status(fields[1]), *time,
                                     CovariatePath::constant(std::move(x)), *maturity));
        } catch (const std::invalid_argument& e) {
            throw fail(e.what());
        }
    }
    return data;
}

void write_dataset_file(const std::string& path, const Dataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    write_dataset(out, data);
    if (!out) throw IoError("failed writing " + path);
}

Dataset read_dataset_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    return read_dataset(in);
}

}  // namespace mortrisk
