#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mortrisk {

/// One origination-file row. Numeric fields are nullopt when the file marks them missing.
struct OriginationRecord {
    std::string loan_id;
    std::size_t line = 0;
    std::optional<double> credit_score;
    std::optional<double> mi_percent;
    std::optional<double> num_units;
    std::optional<double> cltv;
    std::optional<double> dti;
    std::optional<double> upb;
    std::optional<double> orig_interest_rate;
    std::optional<double> num_borrowers;
    std::optional<int> orig_loan_term;  // months
    std::string first_time_buyer;        // Y | N, empty when missing
    std::string occupancy_status;
    std::string property_type;
    std::string property_state;
    int origination_ordinal = 0;         // YearMonth::ordinal() of the origination month
};

/// Quantitative covariates in schema order.
inline constexpr const char* kQuantitativeFields[] = {
    "credit_score", "mi_percent", "num_units", "dti", "upb", "orig_interest_rate", "num_borrowers"};
inline constexpr const char* kDroppedFields[] = {"cltv", "current_interest_rate"};

std::optional<double> quantitative_value(const OriginationRecord& r, std::string_view field);

struct Standardization {
    std::string field;
    double mean = 0.0;
    double sd = 1.0;
    bool operator==(const Standardization&) const = default;
};

/// Grouping of one categorical field. Levels seen with frequency below the threshold
/// are merged into "other"; the modal level is the reference and gets no indicator.
struct CategoricalEncoding {
    std::string field;
    std::string reference;
    std::vector<std::string> indicators;  // one column each, "other" last when present
    std::set<std::string> kept;            // levels kept as-is, reference included
    bool has_other = false;

    /// Group of a raw value: itself when kept, else "other", else the reference.
    std::string group_of(std::string_view raw) const;
    bool operator==(const CategoricalEncoding&) const = default;
};

inline constexpr const char* kOtherLevel = "other";

/// Judicial-foreclosure states, version 1 of the shipped table.
const std::set<std::string>& judicial_states_v1();
/// Reads a table file: one two-letter code per line, '#' comments.
std::set<std::string> read_state_table(std::istream& in);

struct PreprocessSpec {
    int version = 1;
    double min_category_freq = 0.01;
    std::vector<Standardization> quantitative;  // kQuantitativeFields order
    CategoricalEncoding occupancy;
    CategoricalEncoding property_type;
    std::string judicial_table_version = "v1";
    std::set<std::string> judicial_states;
    std::vector<std::string> dropped{"cltv", "current_interest_rate"};

    /// Covariate names in design order: quantitative, intercept, first_time_buyer,
    /// occupancy indicators, property_state:judicial, property_type indicators.
    std::vector<std::string> schema() const;
    bool operator==(const PreprocessSpec&) const = default;
};

/// True when every field the design needs is present.
bool is_complete(const OriginationRecord& r);
/// Name of the first missing required field, or empty.
std::string first_missing_field(const OriginationRecord& r);

/// Fits standardization statistics (sample sd) and category groupings on the
/// complete records. Throws std::invalid_argument naming any zero-variance covariate,
/// or when no record is complete.
PreprocessSpec fit_preprocess(const std::vector<OriginationRecord>& records, double min_category_freq = 0.01,
                              const std::set<std::string>& judicial_states = judicial_states_v1());

/// Encoded covariates of one loan. Distinct from OriginationRecord so encoded rows
/// cannot be fed back through build_design.
struct DesignRow {
    std::string loan_id;
    std::vector<double> x;
};

struct DesignResult {
    std::vector<DesignRow> rows;
    std::vector<std::pair<std::string, std::string>> rejected;  // (loan_id, reason)
};

DesignRow encode(const OriginationRecord& r, const PreprocessSpec& spec);
DesignResult build_design(const std::vector<OriginationRecord>& records, const PreprocessSpec& spec);

void write_preprocess_spec(std::ostream& out, const PreprocessSpec& spec);
PreprocessSpec read_preprocess_spec(std::istream& in);

}  // namespace mortrisk
