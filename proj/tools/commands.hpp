#pragma once

#include "mortrisk/mcmc.hpp"
#include "mortrisk/predict.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mortrisk::cli {

enum ExitCode : int {
    kOk = 0,
    kInputError = 2,
    kInitFailure = 3,
    kSchemaMismatch = 4,
    kNotConverged = 5,
};

/// Command failure carrying the process exit code.
class CommandError : public std::runtime_error {
public:
    CommandError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    int code() const noexcept { return code_; }

private:
    int code_;
};

struct GlobalOptions {
    std::string out_dir = ".";
    unsigned threads = 1;
    bool quiet = false;
};

struct IngestOptions {
    std::string origination;
    std::string performance;
    std::string schema;  // empty: built-in Freddie Mac layout
};

struct FitOptions {
    std::string dataset;
    bool empty_dataset = false;
    std::string init;  // truth JSON whose parameters start every chain
    SamplerConfig sampler;
    PriorSpec prior;
    double rhat_gate = 1.1;
    bool allow_nonconverged = false;
};

struct PredictOptions {
    std::string dataset;
    std::string draws;
    std::size_t n_sims = 10000;
    std::size_t draw_stride = 1;
    std::uint64_t seed = 20240501;
    bool curves = false;
    std::size_t curve_points = 200;
    std::vector<std::string> loans;  // restrict to these ids
    PredictiveOptions predictive;
};

struct DiagnoseOptions {
    std::string dataset;
    std::string draws;
    double level = 0.95;
    std::size_t draw_stride = 1;
    bool residuals = true;
};

struct SimulateOptions {
    std::string truth;  // optional truth JSON; overrides the defaults below
    std::size_t n_loans = 2000;
    std::size_t p = 3;
    double censor_time = 15.0;
    std::uint64_t seed = 7;
};

int run_ingest(const GlobalOptions& g, const IngestOptions& o);
int run_fit(const GlobalOptions& g, const FitOptions& o);
int run_predict(const GlobalOptions& g, const PredictOptions& o);
int run_diagnose(const GlobalOptions& g, const DiagnoseOptions& o);
int run_simulate(const GlobalOptions& g, const SimulateOptions& o);

}  // namespace mortrisk::cli
