#include "mortrisk/ingest.hpp"

#include "mortrisk/csv.hpp"
#include "mortrisk/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <tuple>
#include <unordered_map>

namespace mortrisk {

YearMonth YearMonth::from_ordinal(int ordinal) noexcept {
    const int year = ordinal >= 0 ? ordinal / 12 : -((-ordinal + 11) / 12);
    return {year, ordinal - year * 12 + 1};
}

std::optional<YearMonth> YearMonth::parse(std::string_view text) {
    text = csv::trim(text);
    std::string digits;
    if (text.size() == 6) {
        digits = std::string(text);
    } else if (text.size() == 7 && text[4] == '-') {
        digits = std::string(text.substr(0, 4)) + std::string(text.substr(5, 2));
    } else {
        return std::nullopt;
    }
    if (!std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return std::nullopt;
    }
    const int year = std::stoi(digits.substr(0, 4));
    const int month = std::stoi(digits.substr(4, 2));
    if (month < 1 || month > 12) return std::nullopt;
    return YearMonth{year, month};
}

std::string YearMonth::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

std::optional<std::size_t> FileLayout::column(const std::string& field) const {
    const auto it = columns.find(field);
    if (it == columns.end()) return std::nullopt;
    return it->second;
}

bool FileLayout::is_missing(const std::string& field, std::string_view value) const {
    if (value.empty()) return true;
    const auto it = missing.find(field);
    if (it == missing.end()) return false;
    return std::find(it->second.begin(), it->second.end(), value) != it->second.end();
}

IngestSchema IngestSchema::freddie_mac() {
    IngestSchema s;
    s.origination.columns = {{"credit_score", 0}, {"first_payment_date", 1}, {"first_time_buyer", 2},
                             {"mi_percent", 5},   {"num_units", 6},          {"occupancy_status", 7},
                             {"cltv", 8},         {"dti", 9},                {"upb", 10},
                             {"orig_interest_rate", 12}, {"property_state", 16}, {"property_type", 17},
                             {"loan_id", 19},     {"orig_loan_term", 21},    {"num_borrowers", 22}};
    s.origination.missing = {{"credit_score", {"9999"}}, {"mi_percent", {"999"}},  {"num_units", {"99"}},
                             {"cltv", {"999"}},          {"dti", {"999"}},         {"num_borrowers", {"99"}},
                             {"first_time_buyer", {"9"}}, {"occupancy_status", {"9"}},
                             {"property_type", {"99"}}};
    s.performance.columns = {{"loan_id", 0},       {"reporting_date", 1}, {"delinquency", 3},
                             {"months_remain", 5}, {"repurchase", 6},     {"zero_balance", 8}};
    return s;
}

namespace {

nlohmann::json layout_json(const FileLayout& l) {
    return {{"delimiter", std::string(1, l.delimiter)},
            {"header", l.header},
            {"columns", l.columns},
            {"missing", l.missing}};
}

FileLayout layout_from(const nlohmann::json& j, const FileLayout& defaults) {
    FileLayout l = defaults;
    if (j.contains("delimiter")) {
        const auto d = j.at("delimiter").get<std::string>();
        if (d.size() != 1) throw ParseError("ingest schema: delimiter must be one character");
        l.delimiter = d[0];
    }
    if (j.contains("header")) l.header = j.at("header").get<bool>();
    if (j.contains("columns")) l.columns = j.at("columns").get<std::map<std::string, std::size_t>>();
    if (j.contains("missing")) {
        l.missing = j.at("missing").get<std::map<std::string, std::vector<std::string>>>();
    }
    return l;
}

void require_columns(const FileLayout& l, std::initializer_list<const char*> fields, const char* file) {
    for (const char* f : fields) {
        if (!l.column(f)) throw ParseError(std::string("ingest schema: ") + file + " layout lacks column " + f);
    }
}

}  // namespace

IngestSchema read_ingest_schema(std::istream& in) {
    try {
        const auto j = nlohmann::json::parse(in);
        if (j.value("format", std::string()) != "mortrisk-ingest-schema") {
            throw ParseError("ingest schema: wrong or missing format tag");
        }
        if (j.at("version").get<int>() != 1) throw ParseError("ingest schema: unsupported version");
        const auto defaults = IngestSchema::freddie_mac();
        IngestSchema s = defaults;
        if (j.contains("origination")) s.origination = layout_from(j.at("origination"), defaults.origination);
        if (j.contains("performance")) s.performance = layout_from(j.at("performance"), defaults.performance);
        if (j.contains("active_cutoff")) {
            const auto cutoff = YearMonth::parse(j.at("active_cutoff").get<std::string>());
            if (!cutoff) throw ParseError("ingest schema: active_cutoff must be YYYYMM or YYYY-MM");
            s.active_cutoff = *cutoff;
        }
        s.max_reject_fraction = j.value("max_reject_fraction", s.max_reject_fraction);
        s.min_category_freq = j.value("min_category_freq", s.min_category_freq);
        require_columns(s.origination, {"loan_id"}, "origination");
        if (!s.origination.column("origination_date") && !s.origination.column("first_payment_date")) {
            throw ParseError("ingest schema: origination layout needs origination_date or first_payment_date");
        }
        require_columns(s.performance, {"loan_id", "reporting_date"}, "performance");
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("ingest schema: ") + e.what());
    }
}

IngestSchema read_ingest_schema_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read schema file " + path);
    return read_ingest_schema(in);
}

void write_ingest_schema(std::ostream& out, const IngestSchema& s) {
    nlohmann::json j{{"format", "mortrisk-ingest-schema"},
                     {"version", 1},
                     {"active_cutoff", s.active_cutoff.to_string()},
                     {"max_reject_fraction", s.max_reject_fraction},
                     {"min_category_freq", s.min_category_freq},
                     {"origination", layout_json(s.origination)},
                     {"performance", layout_json(s.performance)}};
    out << j.dump(2) << '\n';
}

namespace {

struct Row {
    const FileLayout& layout;
    std::vector<std::string_view> fields;

    // Trimmed raw text, empty when the column is absent from the layout.
    std::string_view raw(const std::string& field) const {
        const auto c = layout.column(field);
        if (!c || *c >= fields.size()) return {};
        return csv::trim(fields[*c]);
    }
    std::string text(const std::string& field) const {
        const auto v = raw(field);
        return layout.is_missing(field, v) ? std::string() : std::string(v);
    }
    // nullopt for missing; throws the field name for malformed text.
    std::optional<double> number(const std::string& field) const {
        const auto v = raw(field);
        if (layout.is_missing(field, v)) return std::nullopt;
        const auto d = csv::parse_double(v);
        if (!d) throw std::invalid_argument("non-numeric " + field + " '" + std::string(v) + "'");
        return d;
    }
};

std::size_t required_width(const FileLayout& layout) {
    std::size_t w = 0;
    for (const auto& [_, c] : layout.columns) w = std::max(w, c + 1);
    return w;
}

void check_reject_share(std::size_t rejects, std::size_t lines, double max_fraction, const char* file) {
    if (lines > 0 && static_cast<double>(rejects) > max_fraction * static_cast<double>(lines)) {
        throw ParseError(std::string(file) + " file: " + std::to_string(rejects) + " of " + std::to_string(lines) +
                         " lines rejected, above the allowed fraction");
    }
}

std::string normalize_zero_balance(std::string code) {
    if (code.size() == 1 && code[0] >= '0' && code[0] <= '9') code.insert(code.begin(), '0');
    return code;
}

}  // namespace

OriginationParse parse_origination(std::istream& in, const FileLayout& layout, double max_reject_fraction) {
    if (!in) throw IoError("origination stream is not readable");
    OriginationParse out;
    const std::size_t width = required_width(layout);
    std::unordered_map<std::string, std::size_t> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && layout.header) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (csv::trim(line).empty()) continue;
        ++out.data_lines;
        const Row row{layout, csv::split(line, layout.delimiter)};
        auto reject = [&](std::string reason) {
            out.rejects.push_back({"origination", line_no, std::string(row.raw("loan_id")), std::move(reason)});
        };
        if (row.fields.size() < width) {
            reject("expected at least " + std::to_string(width) + " fields, found " +
                   std::to_string(row.fields.size()));
            continue;
        }
        OriginationRecord r;
        r.line = line_no;
        r.loan_id = std::string(row.raw("loan_id"));
        if (r.loan_id.empty()) {
            reject("empty loan_id");
            continue;
        }
        try {
            r.credit_score = row.number("credit_score");
            r.mi_percent = row.number("mi_percent");
            r.num_units = row.number("num_units");
            r.cltv = row.number("cltv");
            r.dti = row.number("dti");
            r.upb = row.number("upb");
            r.orig_interest_rate = row.number("orig_interest_rate");
            r.num_borrowers = row.number("num_borrowers");
            if (const auto term = row.number("orig_loan_term")) {
                if (!(*term > 0.0)) throw std::invalid_argument("orig_loan_term must be positive");
                r.orig_loan_term = static_cast<int>(*term);
            }
        } catch (const std::invalid_argument& e) {
            reject(e.what());
            continue;
        }
        r.first_time_buyer = row.text("first_time_buyer");
        r.occupancy_status = row.text("occupancy_status");
        r.property_type = row.text("property_type");
        r.property_state = row.text("property_state");
        std::optional<YearMonth> origination;
        if (layout.column("origination_date")) {
            origination = YearMonth::parse(row.raw("origination_date"));
        } else if (const auto first_payment = YearMonth::parse(row.raw("first_payment_date"))) {
            origination = YearMonth::from_ordinal(first_payment->ordinal() - 1);
        }
        if (!origination) {
            reject("unparseable origination or first payment date");
            continue;
        }
        r.origination_ordinal = origination->ordinal();
        if (const auto [it, fresh] = seen.emplace(r.loan_id, line_no); !fresh) {
            reject("duplicate loan_id (first seen on line " + std::to_string(it->second) + ")");
            continue;
        }
        out.records.push_back(std::move(r));
    }
    if (in.bad()) throw IoError("error while reading origination stream");
    check_reject_share(out.rejects.size(), out.data_lines, max_reject_fraction, "origination");
    return out;
}

std::optional<PerformanceRecord> parse_performance_line(std::string_view line, const FileLayout& layout,
                                                        std::string& reason) {
    const Row row{layout, csv::split(line, layout.delimiter)};
    const auto width = required_width(layout);
    if (row.fields.size() < width) {
        reason = "expected at least " + std::to_string(width) + " fields, found " + std::to_string(row.fields.size());
        return std::nullopt;
    }
    PerformanceRecord r;
    r.loan_id = std::string(row.raw("loan_id"));
    if (r.loan_id.empty()) {
        reason = "empty loan_id";
        return std::nullopt;
    }
    const auto date = YearMonth::parse(row.raw("reporting_date"));
    if (!date) {
        reason = "unparseable reporting_date '" + std::string(row.raw("reporting_date")) + "'";
        return std::nullopt;
    }
    r.reporting_date = *date;
    r.zero_balance = normalize_zero_balance(row.text("zero_balance"));
    r.delinquency = row.text("delinquency");
    r.repurchase = row.text("repurchase");
    const auto remain = row.raw("months_remain");
    if (!layout.is_missing("months_remain", remain)) {
        const auto v = csv::parse_int(remain);
        if (!v) {
            reason = "non-numeric months_remain '" + std::string(remain) + "'";
            return std::nullopt;
        }
        r.months_remain = static_cast<int>(*v);
    }
    return r;
}

std::string_view to_string(Category c) {
    switch (c) {
        case Category::Prepaid: return "prepaid";
        case Category::Defaulted: return "default";
        case Category::Active: return "active";
        case Category::Excluded: return "excluded";
    }
    return "excluded";
}

namespace {

bool is_default_code(const std::string& zb) { return zb == "03" || zb == "06" || zb == "09"; }

void keep_min(std::optional<YearMonth>& slot, YearMonth v) {
    if (!slot || v < *slot) slot = v;
}

}  // namespace

void HistoryScanner::add(const PerformanceRecord& r) {
    ++count_;
    keep_min(earliest_, r.reporting_date);
    if (r.zero_balance == "01" && r.repurchase == "N") keep_min(first_prepay_, r.reporting_date);
    if (is_default_code(r.zero_balance)) keep_min(first_default_, r.reporting_date);
    if (!latest_ || r.reporting_date > latest_->reporting_date) {
        latest_ = r;
    } else if (r.reporting_date == latest_->reporting_date) {
        // Conflicting rows for the same month: keep a fixed one regardless of input order.
        if (std::tie(r.zero_balance, r.delinquency, r.repurchase) >
            std::tie(latest_->zero_balance, latest_->delinquency, latest_->repurchase)) {
            latest_ = r;
        }
    }
}

Categorization HistoryScanner::result(YearMonth origination, YearMonth active_cutoff) const {
    Categorization c;
    if (count_ == 0) {
        c.reason = "no-history";
        return c;
    }
    if (*earliest_ < origination) {
        c.reason = "precedes-origination";
        return c;
    }
    auto at = [&](Category category, YearMonth month) {
        c.category = category;
        c.months = months_between(origination, month);
        c.time_years = static_cast<double>(std::max(c.months, 1)) / 12.0;
        return c;
    };
    if (first_default_ && (!first_prepay_ || *first_default_ <= *first_prepay_)) {
        return at(Category::Defaulted, *first_default_);
    }
    if (first_prepay_) return at(Category::Prepaid, *first_prepay_);
    const auto& last = *latest_;
    if (last.reporting_date < active_cutoff) {
        c.reason = "stale";
    } else if (!last.zero_balance.empty()) {
        c.reason = "terminal-code";
    } else if (last.delinquency == "R") {
        c.reason = "reo";
    } else {
        return at(Category::Active, last.reporting_date);
    }
    return c;
}

Categorization categorize_loan(std::span<const PerformanceRecord> perf, YearMonth origination,
                               YearMonth active_cutoff) {
    HistoryScanner scanner;
    for (const auto& r : perf) scanner.add(r);
    return scanner.result(origination, active_cutoff);
}

IngestResult ingest(std::istream& origination, std::istream& performance, const IngestSchema& schema) {
    IngestResult out;
    auto parsed = parse_origination(origination, schema.origination, schema.max_reject_fraction);
    out.origination_lines = parsed.data_lines;
    out.rejects = std::move(parsed.rejects);
    out.spec = fit_preprocess(parsed.records, schema.min_category_freq);
    out.data = Dataset(out.spec.schema());

    std::unordered_map<std::string, HistoryScanner> histories;
    histories.reserve(parsed.records.size());
    for (const auto& r : parsed.records) histories.emplace(r.loan_id, HistoryScanner{});

    if (!performance) throw IoError("performance stream is not readable");
    std::string line, reason;
    std::size_t line_no = 0, perf_rejects = 0;
    while (std::getline(performance, line)) {
        ++line_no;
        if (line_no == 1 && schema.performance.header) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (csv::trim(line).empty()) continue;
        ++out.performance_lines;
        const auto record = parse_performance_line(line, schema.performance, reason);
        if (!record) {
            ++perf_rejects;
            out.rejects.push_back({"performance", line_no, {}, reason});
            continue;
        }
        const auto it = histories.find(record->loan_id);
        if (it == histories.end()) {
            ++out.orphan_performance_lines;
            continue;
        }
        it->second.add(*record);
    }
    if (performance.bad()) throw IoError("error while reading performance stream");
    check_reject_share(perf_rejects, out.performance_lines, schema.max_reject_fraction, "performance");

    for (const auto& r : parsed.records) {
        if (const auto missing = first_missing_field(r); !missing.empty()) {
            out.rejects.push_back({"design", r.line, r.loan_id, "missing required field " + missing});
            continue;
        }
        const auto c = histories.at(r.loan_id).result(YearMonth::from_ordinal(r.origination_ordinal),
                                                      schema.active_cutoff);
        if (c.category == Category::Excluded) {
            ++out.excluded[c.reason];
            out.rejects.push_back({"categorize", r.line, r.loan_id, "excluded: " + c.reason});
            continue;
        }
        const double maturity = r.orig_loan_term ? *r.orig_loan_term / 12.0 : kDefaultMaturityYears;
        const LoanStatus status = c.category == Category::Defaulted ? LoanStatus::Defaulted
                                  : c.category == Category::Prepaid ? LoanStatus::Prepaid
                                                                    : LoanStatus::Active;
        if (status == LoanStatus::Active && c.time_years > maturity) {
            ++out.excluded["beyond-maturity"];
            out.rejects.push_back({"categorize", r.line, r.loan_id, "excluded: beyond-maturity"});
            continue;
        }
        auto row = encode(r, out.spec);
        out.data.add(LoanObservation(r.loan_id, status, c.time_years, CovariatePath::constant(std::move(row.x)),
                                     maturity));
    }
    return out;
}

void write_rejects_csv(std::ostream& out, const std::vector<Reject>& rejects) {
    out << "source,line,loan_id,reason\n";
    for (const auto& r : rejects) {
        std::string reason = r.reason;
        std::replace(reason.begin(), reason.end(), ',', ';');
        out << r.source << ',' << r.line << ',' << r.loan_id << ',' << reason << '\n';
    }
}

}  // namespace mortrisk
