#include "mortrisk/preprocess.hpp"

#include "mortrisk/csv.hpp"
#include "mortrisk/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

namespace mortrisk {

std::optional<double> quantitative_value(const OriginationRecord& r, std::string_view field) {
    if (field == "credit_score") return r.credit_score;
    if (field == "mi_percent") return r.mi_percent;
    if (field == "num_units") return r.num_units;
    if (field == "dti") return r.dti;
    if (field == "upb") return r.upb;
    if (field == "orig_interest_rate") return r.orig_interest_rate;
    if (field == "num_borrowers") return r.num_borrowers;
    if (field == "cltv") return r.cltv;
    throw std::invalid_argument("unknown quantitative field '" + std::string(field) + "'");
}

std::string CategoricalEncoding::group_of(std::string_view raw) const {
    const std::string value(raw);
    if (kept.count(value)) return value;
    return has_other ? std::string(kOtherLevel) : reference;
}

const std::set<std::string>& judicial_states_v1() {
    static const std::set<std::string> states{"CT", "DE", "FL", "HI", "IA", "IL", "IN", "KS", "KY", "LA", "ME",
                                              "ND", "NJ", "NM", "NY", "OH", "OK", "PA", "SC", "VT", "WI"};
    return states;
}

std::set<std::string> read_state_table(std::istream& in) {
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto text = csv::trim(line.substr(0, line.find('#')));
        if (text.empty()) continue;
        if (text.size() != 2) throw ParseError("state table: bad code '" + std::string(text) + "'");
        out.emplace(text);
    }
    return out;
}

std::vector<std::string> PreprocessSpec::schema() const {
    std::vector<std::string> names;
    for (const auto& q : quantitative) names.push_back(q.field);
    names.emplace_back("intercept");
    names.emplace_back("first_time_buyer");
    for (const auto& level : occupancy.indicators) names.push_back(occupancy.field + ":" + level);
    names.emplace_back("property_state:judicial");
    for (const auto& level : property_type.indicators) names.push_back(property_type.field + ":" + level);
    return names;
}

std::string first_missing_field(const OriginationRecord& r) {
    for (const char* f : kQuantitativeFields) {
        if (!quantitative_value(r, f)) return f;
    }
    if (r.first_time_buyer != "Y" && r.first_time_buyer != "N") return "first_time_buyer";
    if (r.occupancy_status.empty()) return "occupancy_status";
    if (r.property_state.empty()) return "property_state";
    if (r.property_type.empty()) return "property_type";
    return {};
}

bool is_complete(const OriginationRecord& r) { return first_missing_field(r).empty(); }

namespace {

CategoricalEncoding fit_categorical(const std::string& field, const std::vector<std::string>& values,
                                    double min_freq) {
    std::map<std::string, std::size_t> counts;
    for (const auto& v : values) ++counts[v];
    const double n = static_cast<double>(values.size());
    CategoricalEncoding enc;
    enc.field = field;
    std::size_t best = 0;
    for (const auto& [level, count] : counts) {
        // std::map iterates in order, so ties keep the lexicographically first level.
        if (count > best) {
            best = count;
            enc.reference = level;
        }
    }
    for (const auto& [level, count] : counts) {
        if (level == enc.reference || static_cast<double>(count) / n >= min_freq) {
            enc.kept.insert(level);
        } else {
            enc.has_other = true;
        }
    }
    for (const auto& level : enc.kept) {
        if (level != enc.reference) enc.indicators.push_back(level);
    }
    if (enc.has_other) enc.indicators.emplace_back(kOtherLevel);
    return enc;
}

}  // namespace

PreprocessSpec fit_preprocess(const std::vector<OriginationRecord>& records, double min_category_freq,
                              const std::set<std::string>& judicial_states) {
    if (!(min_category_freq >= 0.0 && min_category_freq < 1.0)) {
        throw std::invalid_argument("fit_preprocess: min_category_freq must lie in [0, 1)");
    }
    std::vector<const OriginationRecord*> complete;
    for (const auto& r : records) {
        if (is_complete(r)) complete.push_back(&r);
    }
    if (complete.size() < 2) throw std::invalid_argument("fit_preprocess: fewer than two complete records");

    PreprocessSpec spec;
    spec.min_category_freq = min_category_freq;
    spec.judicial_states = judicial_states;
    const double n = static_cast<double>(complete.size());
    for (const char* field : kQuantitativeFields) {
        double mean = 0.0;
        for (const auto* r : complete) mean += *quantitative_value(*r, field);
        mean /= n;
        double ss = 0.0;
        for (const auto* r : complete) {
            const double d = *quantitative_value(*r, field) - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / (n - 1.0));
        if (!(sd > 0.0)) {
            throw std::invalid_argument(std::string("fit_preprocess: covariate '") + field + "' has zero variance");
        }
        spec.quantitative.push_back({field, mean, sd});
    }
    std::vector<std::string> occupancy, property_type;
    for (const auto* r : complete) {
        occupancy.push_back(r->occupancy_status);
        property_type.push_back(r->property_type);
    }
    spec.occupancy = fit_categorical("occupancy_status", occupancy, min_category_freq);
    spec.property_type = fit_categorical("property_type", property_type, min_category_freq);
    return spec;
}

DesignRow encode(const OriginationRecord& r, const PreprocessSpec& spec) {
    if (const auto missing = first_missing_field(r); !missing.empty()) {
        throw std::invalid_argument("missing required field " + missing);
    }
    DesignRow row{r.loan_id, {}};
    row.x.reserve(spec.schema().size());
    for (const auto& q : spec.quantitative) row.x.push_back((*quantitative_value(r, q.field) - q.mean) / q.sd);
    row.x.push_back(1.0);
    row.x.push_back(r.first_time_buyer == "Y" ? 1.0 : 0.0);
    const auto occupancy = spec.occupancy.group_of(r.occupancy_status);
    for (const auto& level : spec.occupancy.indicators) row.x.push_back(occupancy == level ? 1.0 : 0.0);
    row.x.push_back(spec.judicial_states.count(r.property_state) ? 1.0 : 0.0);
    const auto type = spec.property_type.group_of(r.property_type);
    for (const auto& level : spec.property_type.indicators) row.x.push_back(type == level ? 1.0 : 0.0);
    return row;
}

DesignResult build_design(const std::vector<OriginationRecord>& records, const PreprocessSpec& spec) {
    DesignResult out;
    for (const auto& r : records) {
        if (const auto missing = first_missing_field(r); !missing.empty()) {
            out.rejected.emplace_back(r.loan_id, "missing required field " + missing);
            continue;
        }
        out.rows.push_back(encode(r, spec));
    }
    return out;
}

namespace {

nlohmann::json encoding_json(const CategoricalEncoding& e) {
    return {{"field", e.field},
            {"reference", e.reference},
            {"indicators", e.indicators},
            {"kept", std::vector<std::string>(e.kept.begin(), e.kept.end())},
            {"has_other", e.has_other}};
}

CategoricalEncoding encoding_from(const nlohmann::json& j) {
    CategoricalEncoding e;
    e.field = j.at("field").get<std::string>();
    e.reference = j.at("reference").get<std::string>();
    e.indicators = j.at("indicators").get<std::vector<std::string>>();
    const auto kept = j.at("kept").get<std::vector<std::string>>();
    e.kept = {kept.begin(), kept.end()};
    e.has_other = j.at("has_other").get<bool>();
    if (!e.kept.count(e.reference)) throw ParseError("preprocess spec: reference level not among kept levels");
    return e;
}

}  // namespace

void write_preprocess_spec(std::ostream& out, const PreprocessSpec& spec) {
    nlohmann::json quantitative = nlohmann::json::array();
    for (const auto& q : spec.quantitative) {
        quantitative.push_back({{"field", q.field}, {"mean", q.mean}, {"sd", q.sd}});
    }
    nlohmann::json j{
        {"format", "mortrisk-preprocess"},
        {"version", spec.version},
        {"min_category_freq", spec.min_category_freq},
        {"quantitative", quantitative},
        {"occupancy_status", encoding_json(spec.occupancy)},
        {"property_type", encoding_json(spec.property_type)},
        {"judicial_table_version", spec.judicial_table_version},
        {"judicial_states", std::vector<std::string>(spec.judicial_states.begin(), spec.judicial_states.end())},
        {"dropped", spec.dropped},
        {"schema", spec.schema()}};
    out << j.dump(2) << '\n';
}

PreprocessSpec read_preprocess_spec(std::istream& in) {
    try {
        const auto j = nlohmann::json::parse(in);
        if (j.at("format").get<std::string>() != "mortrisk-preprocess") {
            throw ParseError("preprocess spec: wrong format tag");
        }
        PreprocessSpec spec;
        spec.version = j.at("version").get<int>();
        if (spec.version != 1) throw ParseError("preprocess spec: unsupported version");
        spec.min_category_freq = j.at("min_category_freq").get<double>();
        for (const auto& q : j.at("quantitative")) {
            Standardization s{q.at("field").get<std::string>(), q.at("mean").get<double>(), q.at("sd").get<double>()};
            if (!(s.sd > 0.0)) throw ParseError("preprocess spec: sd must be positive for " + s.field);
            spec.quantitative.push_back(std::move(s));
        }
        spec.occupancy = encoding_from(j.at("occupancy_status"));
        spec.property_type = encoding_from(j.at("property_type"));
        spec.judicial_table_version = j.at("judicial_table_version").get<std::string>();
        const auto states = j.at("judicial_states").get<std::vector<std::string>>();
        spec.judicial_states = {states.begin(), states.end()};
        spec.dropped = j.at("dropped").get<std::vector<std::string>>();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("preprocess spec: ") + e.what());
    }
}

}  // namespace mortrisk
