#include "mortrisk/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mortrisk {

std::string_view to_string(RiskKind risk) {
    return risk == RiskKind::Default ? "default" : "prepay";
}

LognormalBaseline::LognormalBaseline(double mu, double sigma2) : mu_(mu), sigma2_(sigma2) {
    if (!std::isfinite(mu)) {
        throw std::invalid_argument("LognormalBaseline: mu must be finite");
    }
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw std::invalid_argument("LognormalBaseline: sigma2 must be positive and finite");
    }
}

void ModelParams::validate(std::size_t p) const {
    if (theta_default.size() != p || theta_prepay.size() != p) {
        throw std::invalid_argument("ModelParams: theta length does not match schema length " +
                                    std::to_string(p));
    }
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(theta_default.begin(), theta_default.end(), finite) ||
        !std::all_of(theta_prepay.begin(), theta_prepay.end(), finite)) {
        throw std::invalid_argument("ModelParams: non-finite regression coefficient");
    }
}

CovariatePath::CovariatePath(std::vector<double> obs_times, std::vector<std::vector<double>> values)
    : obs_times_(std::move(obs_times)) {
    if (obs_times_.empty()) {
        throw std::invalid_argument("CovariatePath: needs at least one observation");
    }
    if (values.size() != obs_times_.size()) {
        throw std::invalid_argument("CovariatePath: one value vector per observation time required");
    }
    if (!(obs_times_.front() > 0.0)) {
        throw std::invalid_argument("CovariatePath: first observation time must be positive");
    }
    for (std::size_t j = 0; j < obs_times_.size(); ++j) {
        if (!std::isfinite(obs_times_[j])) {
            throw std::invalid_argument("CovariatePath: observation times must be finite");
        }
        if (j > 0 && !(obs_times_[j] > obs_times_[j - 1])) {
            throw std::invalid_argument("CovariatePath: observation times must be strictly increasing");
        }
    }
    dimension_ = values.front().size();
    values_.reserve(dimension_ * values.size());
    for (const auto& row : values) {
        if (row.size() != dimension_) {
            throw std::invalid_argument("CovariatePath: value vectors differ in length");
        }
        if (!std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); })) {
            throw std::invalid_argument("CovariatePath: covariate values must be finite");
        }
        values_.insert(values_.end(), row.begin(), row.end());
    }
    bounds_.reserve(obs_times_.size() - 1);
    for (std::size_t j = 0; j + 1 < obs_times_.size(); ++j) {
        bounds_.push_back(0.5 * (obs_times_[j] + obs_times_[j + 1]));
    }
    for (std::size_t j = 1; j < bounds_.size(); ++j) {
        if (!(bounds_[j] > bounds_[j - 1])) {
            throw std::invalid_argument("CovariatePath: interval boundaries not strictly increasing");
        }
    }
}

CovariatePath CovariatePath::constant(std::vector<double> values) {
    return CovariatePath({1.0}, {std::move(values)});
}

double CovariatePath::upper(std::size_t j) const noexcept {
    return j < bounds_.size() ? bounds_[j] : std::numeric_limits<double>::infinity();
}

std::size_t CovariatePath::interval_of(double t) const {
    // First boundary with t <= s_j; ties go to the left interval.
    auto it = std::lower_bound(bounds_.begin(), bounds_.end(), t);
    return static_cast<std::size_t>(it - bounds_.begin());
}

std::string_view to_string(LoanStatus status) {
    switch (status) {
        case LoanStatus::Defaulted: return "default";
        case LoanStatus::Prepaid: return "prepaid";
        case LoanStatus::Active: return "active";
    }
    return "?";
}

LoanStatus parse_loan_status(std::string_view text) {
    if (text == "default" || text == "defaulted") return LoanStatus::Defaulted;
    if (text == "prepaid" || text == "prepay") return LoanStatus::Prepaid;
    if (text == "active") return LoanStatus::Active;
    throw std::invalid_argument("unknown loan status '" + std::string(text) + "'");
}

LoanObservation::LoanObservation(std::string id, LoanStatus status, double time,
                                 CovariatePath covariates, double maturity)
    : id_(std::move(id)), status_(status), time_(time), covariates_(std::move(covariates)),
      maturity_(maturity) {
    if (!(time_ > 0.0) || !std::isfinite(time_)) {
        throw std::invalid_argument("LoanObservation " + id_ + ": time must be positive and finite");
    }
    if (!(maturity_ > 0.0) || !std::isfinite(maturity_)) {
        throw std::invalid_argument("LoanObservation " + id_ + ": maturity must be positive and finite");
    }
    if (status_ == LoanStatus::Active && time_ > maturity_) {
        throw std::invalid_argument("LoanObservation " + id_ + ": active time exceeds maturity");
    }
}

Dataset::Dataset(std::vector<std::string> schema, std::vector<LoanObservation> loans)
    : schema_(std::move(schema)) {
    loans_.reserve(loans.size());
    for (auto& loan : loans) {
        add(std::move(loan));
    }
}

void Dataset::add(LoanObservation loan) {
    if (loan.covariates().dimension() != schema_.size()) {
        throw std::invalid_argument("Dataset: loan " + loan.id() + " has " +
                                    std::to_string(loan.covariates().dimension()) +
                                    " covariates, schema has " + std::to_string(schema_.size()));
    }
    loans_.push_back(std::move(loan));
}

StatusCounts Dataset::counts() const {
    StatusCounts c;
    for (const auto& loan : loans_) {
        switch (loan.status()) {
            case LoanStatus::Defaulted: ++c.defaulted; break;
            case LoanStatus::Prepaid: ++c.prepaid; break;
            case LoanStatus::Active: ++c.active; break;
        }
    }
    return c;
}

}  // namespace mortrisk
