#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mortrisk {

enum class RiskKind { Default, Prepay };

inline constexpr std::array<RiskKind, 2> kRisks{RiskKind::Default, RiskKind::Prepay};

std::string_view to_string(RiskKind risk);

/// Lognormal baseline for one risk. Time is measured in years from origination,
/// mu is the log-time location and sigma2 the squared log-time scale.
class LognormalBaseline {
public:
    LognormalBaseline(double mu, double sigma2);

    double mu() const noexcept { return mu_; }
    double sigma2() const noexcept { return sigma2_; }
    double sigma() const noexcept { return std::sqrt(sigma2_); }

    bool operator==(const LognormalBaseline&) const = default;

private:
    double mu_;
    double sigma2_;
};

/// Regression vectors share one covariate schema; entry order follows Dataset::schema().
struct ModelParams {
    LognormalBaseline baseline_default{0.0, 1.0};
    LognormalBaseline baseline_prepay{0.0, 1.0};
    std::vector<double> theta_default;
    std::vector<double> theta_prepay;

    const LognormalBaseline& baseline(RiskKind risk) const {
        return risk == RiskKind::Default ? baseline_default : baseline_prepay;
    }
    LognormalBaseline& baseline(RiskKind risk) {
        return risk == RiskKind::Default ? baseline_default : baseline_prepay;
    }
    const std::vector<double>& theta(RiskKind risk) const {
        return risk == RiskKind::Default ? theta_default : theta_prepay;
    }
    std::vector<double>& theta(RiskKind risk) {
        return risk == RiskKind::Default ? theta_default : theta_prepay;
    }

    std::size_t dimension() const noexcept { return theta_default.size(); }

    /// Throws std::invalid_argument unless both theta vectors have length p and are finite.
    void validate(std::size_t p) const;

    bool operator==(const ModelParams&) const = default;
};

/// Covariates observed at times tau_1 < ... < tau_m, held constant on (s_{j-1}, s_j]
/// with s_0 = 0, s_j = (tau_j + tau_{j+1}) / 2 and s_m = +inf.
class CovariatePath {
public:
    CovariatePath(std::vector<double> obs_times, std::vector<std::vector<double>> values);

    /// A single observation covering (0, inf).
    static CovariatePath constant(std::vector<double> values);

    std::size_t intervals() const noexcept { return obs_times_.size(); }
    std::size_t dimension() const noexcept { return dimension_; }

    std::span<const double> obs_times() const noexcept { return obs_times_; }
    std::span<const double> value(std::size_t j) const {
        return {values_.data() + j * dimension_, dimension_};
    }

    /// Left end s_{j-1} of interval j (0-based j).
    double lower(std::size_t j) const noexcept { return j == 0 ? 0.0 : bounds_[j - 1]; }
    /// Right end s_j of interval j; +inf for the last one.
    double upper(std::size_t j) const noexcept;

    /// Index j with s_{j-1} < t <= s_j. Boundaries belong to the left interval.
    std::size_t interval_of(double t) const;

    bool operator==(const CovariatePath&) const = default;

private:
    std::vector<double> obs_times_;
    std::vector<double> bounds_;  // s_1 .. s_{m-1}
    std::vector<double> values_;  // row-major m x p
    std::size_t dimension_ = 0;
};

enum class LoanStatus { Defaulted, Prepaid, Active };

std::string_view to_string(LoanStatus status);
LoanStatus parse_loan_status(std::string_view text);

inline constexpr double kDefaultMaturityYears = 30.0;

class LoanObservation {
public:
    LoanObservation(std::string id, LoanStatus status, double time, CovariatePath covariates,
                    double maturity = kDefaultMaturityYears);

    const std::string& id() const noexcept { return id_; }
    LoanStatus status() const noexcept { return status_; }
    double time() const noexcept { return time_; }
    double maturity() const noexcept { return maturity_; }
    const CovariatePath& covariates() const noexcept { return covariates_; }

    bool terminated() const noexcept { return status_ != LoanStatus::Active; }
    /// True when the loan's observed time is an exact event time of `risk`.
    bool is_event(RiskKind risk) const noexcept {
        return (risk == RiskKind::Default && status_ == LoanStatus::Defaulted) ||
               (risk == RiskKind::Prepay && status_ == LoanStatus::Prepaid);
    }

    bool operator==(const LoanObservation&) const = default;

private:
    std::string id_;
    LoanStatus status_;
    double time_;
    CovariatePath covariates_;
    double maturity_;
};

struct StatusCounts {
    std::size_t defaulted = 0;
    std::size_t prepaid = 0;
    std::size_t active = 0;
    std::size_t total() const noexcept { return defaulted + prepaid + active; }
};

class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<std::string> schema, std::vector<LoanObservation> loans = {});

    const std::vector<std::string>& schema() const noexcept { return schema_; }
    const std::vector<LoanObservation>& loans() const noexcept { return loans_; }
    std::size_t size() const noexcept { return loans_.size(); }
    bool empty() const noexcept { return loans_.empty(); }
    std::size_t dimension() const noexcept { return schema_.size(); }

    void add(LoanObservation loan);
    StatusCounts counts() const;

private:
    std::vector<std::string> schema_;
    std::vector<LoanObservation> loans_;
};

}  // namespace mortrisk
