#pragma once

#include <cstdint>
#include <vector>

#include "zinfer/bounds.hpp"
#include "zinfer/simulate.hpp"

namespace zinfer {

// Saturated cell-frequency estimate of the observed law.
// With alpha > 0, add-alpha smoothing fills cells that would otherwise block
// positivity (off by default: empty cells are a data problem worth seeing).
ObservedLaw mle_counting(const RecordSet& data, double alpha = 0.0);

struct EmConfig {
  int max_iter = 5000;
  double tol = 1e-8;  // on the observed-data log-likelihood
  int n_restarts = 10;
  std::uint64_t seed = 1;
};

struct EmFit {
  ModelTag model = ModelTag::MarShared;
  Dgp params;  // fitted parameters, in the same shape a process is specified
  std::vector<double> loglik_trace;
  int iterations = 0;
  bool converged = false;
  int n_restarts_used = 0;

  double final_loglik() const { return loglik_trace.back(); }
  // Observed law implied by the fitted parameters. Satisfies the model's
  // equality constraints by construction, which is what the downstream
  // bounds need from an estimated table.
  ObservedLaw fitted_observed_law() const;
};

// Maximize the observed-data likelihood of the zero-inflated model with
// latent R on the X = 0 rows. Rows with X != 0 have R = 1 with certainty.
// The fitted channel and latent split are reported for diagnostics only;
// they are not identified.
EmFit em_fit(const RecordSet& data, ModelTag model, const EmConfig& config = {});

}  // namespace zinfer
