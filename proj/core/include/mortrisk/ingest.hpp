#pragma once

#include "mortrisk/preprocess.hpp"
#include "mortrisk/types.hpp"

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mortrisk {

struct YearMonth {
    int year = 0;
    int month = 1;  // 1..12

    int ordinal() const noexcept { return year * 12 + (month - 1); }
    static YearMonth from_ordinal(int ordinal) noexcept;
    /// Accepts YYYYMM and YYYY-MM.
    static std::optional<YearMonth> parse(std::string_view text);
    std::string to_string() const;  // YYYY-MM

    auto operator<=>(const YearMonth& o) const noexcept { return ordinal() <=> o.ordinal(); }
    bool operator==(const YearMonth& o) const noexcept { return ordinal() == o.ordinal(); }
};

inline int months_between(YearMonth from, YearMonth to) noexcept { return to.ordinal() - from.ordinal(); }

struct PerformanceRecord {
    std::string loan_id;
    YearMonth reporting_date;
    std::string zero_balance;  // "01", "03", "06", "09", ... or empty
    std::string delinquency;   // "0", "1", ..., "R" or empty
    std::optional<int> months_remain;
    std::string repurchase;    // "Y", "N" or empty
};

struct Reject {
    std::string source;  // origination | performance | design | categorize
    std::size_t line = 0;  // 0 when not tied to one input line
    std::string loan_id;
    std::string reason;
};

/// Column layout of one delimited input file. Column indices are zero-based.
struct FileLayout {
    char delimiter = '|';
    bool header = false;
    std::map<std::string, std::size_t> columns;
    std::map<std::string, std::vector<std::string>> missing;  // per-field sentinel values

    std::optional<std::size_t> column(const std::string& field) const;
    bool is_missing(const std::string& field, std::string_view value) const;
};

struct IngestSchema {
    FileLayout origination;
    FileLayout performance;
    YearMonth active_cutoff{2014, 1};
    double max_reject_fraction = 0.10;
    double min_category_freq = 0.01;

    /// Default layout of the public Freddie Mac single-family loan-level files.
    static IngestSchema freddie_mac();
};

IngestSchema read_ingest_schema(std::istream& in);
IngestSchema read_ingest_schema_file(const std::string& path);
void write_ingest_schema(std::ostream& out, const IngestSchema& schema);

struct OriginationParse {
    std::vector<OriginationRecord> records;
    std::vector<Reject> rejects;
    std::size_t data_lines = 0;
};

/// One record per well-formed line; malformed lines and duplicate ids go to
/// rejects with their line number. Throws ParseError when the reject share
/// exceeds max_reject_fraction.
OriginationParse parse_origination(std::istream& in, const FileLayout& layout,
                                   double max_reject_fraction = 0.10);

/// Parses one performance line (without the trailing newline). nullopt plus a
/// reason when the line is malformed.
std::optional<PerformanceRecord> parse_performance_line(std::string_view line, const FileLayout& layout,
                                                        std::string& reason);

enum class Category { Prepaid, Defaulted, Active, Excluded };
std::string_view to_string(Category c);

struct Categorization {
    Category category = Category::Excluded;
    int months = 0;          // whole reporting months from origination
    double time_years = 0.0; // max(months, 1) / 12
    std::string reason;      // set for Excluded: no-history, stale, terminal-code, reo, precedes-origination
};

/// Order-independent fold over a loan's performance records: the earliest qualifying
/// prepay and default months plus the latest report. Duplicated rows change nothing.
class HistoryScanner {
public:
    void add(const PerformanceRecord& record);
    std::size_t records() const noexcept { return count_; }
    Categorization result(YearMonth origination, YearMonth active_cutoff) const;

private:
    std::size_t count_ = 0;
    std::optional<YearMonth> first_prepay_;
    std::optional<YearMonth> first_default_;
    std::optional<YearMonth> earliest_;
    std::optional<PerformanceRecord> latest_;
};

/// Prepaid at the first month with zero_balance 01 and repurchase N; Defaulted at
/// the first month with zero_balance 03, 06 or 09 (the earlier event wins, a tie is
/// a default); Active when the last report is in or after the cutoff month with an
/// empty zero_balance and delinquency other than R; otherwise Excluded.
Categorization categorize_loan(std::span<const PerformanceRecord> perf, YearMonth origination,
                               YearMonth active_cutoff);

struct IngestResult {
    Dataset data;
    PreprocessSpec spec;
    std::vector<Reject> rejects;
    std::size_t origination_lines = 0;
    std::size_t performance_lines = 0;
    std::size_t orphan_performance_lines = 0;  // ids absent from the origination file
    std::map<std::string, std::size_t> excluded;  // by reason
};

/// Full pipeline: parse origination, fit the preprocessing spec on complete records,
/// encode covariates, stream the performance file and categorize every loan.
IngestResult ingest(std::istream& origination, std::istream& performance, const IngestSchema& schema);

void write_rejects_csv(std::ostream& out, const std::vector<Reject>& rejects);

}  // namespace mortrisk
