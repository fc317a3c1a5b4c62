#pragma once

#include "mortrisk/mcmc.hpp"
#include "mortrisk/summary.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace mortrisk {

// Draws file: one CSV header line naming the parameter schema, then one line per draw:
//   chain,iteration,mu_default,sigma2_default,mu_prepay,sigma2_prepay,
//   theta_default[<cov>]...,theta_prepay[<cov>]...
// Values use shortest round-trip decimal text, so a reload reproduces every draw exactly.

std::vector<std::string> draws_header(const std::vector<std::string>& schema);
void write_draws(std::ostream& out, const PosteriorSamples& samples);
PosteriorSamples read_draws(std::istream& in);

/// Throws SchemaMismatch unless the draws were produced for exactly this covariate schema.
void require_schema(const PosteriorSamples& samples, const std::vector<std::string>& schema);

/// parameter,mean,sd,median,q2.5,q97.5,rhat,ess  ("NA" for unavailable diagnostics)
void write_summary_csv(std::ostream& out, const std::vector<ParameterSummary>& rows);

/// chain,block,phase,proposed,accepted,rate
void write_acceptance_csv(std::ostream& out, const std::vector<ChainAcceptance>& stats);

}  // namespace mortrisk
