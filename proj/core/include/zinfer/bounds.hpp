#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zinfer/laws.hpp"

namespace zinfer {

// Working model for falsification / bounds / sensitivity.
enum class ModelTag { Mcar, MarStratified, MarShared, Mnar };
std::string_view model_tag_name(ModelTag tag);
ModelTag model_tag_from_string(std::string_view name);

// One observed-law constraint residual.
struct FalsificationCheck {
  std::string constraint_id;  // "eq:x=<x>" or "dichotomy"
  int indicator = 1;
  int stratum = -1;  // -1 when the constraint is not stratum-specific
  double residual = 0.0;
};

struct FalsificationReport {
  ModelTag model = ModelTag::Mcar;
  double tol = kInputTol;
  bool pass = true;
  std::vector<FalsificationCheck> checks;
  std::vector<std::string> skipped_cells;  // positivity-skipped x != 0 cells
  double max_residual() const;
  const FalsificationCheck* worst() const;
};

// Checks the observed-law equality (and, for shared channels, one-sided)
// constraints the working model imposes. With n_for_se > 0 each constraint
// is allowed max(tol, 3 binomial standard errors) of slack, for empirical
// tables; n_for_se = 0 means a population table.
FalsificationReport falsify(const ObservedLaw& law, ModelTag model, double tol = kInputTol,
                            long n_for_se = 0);

// q(W=0 | R=1) is point identified as p(W=0 | X=1) (marginal over C, or
// within stratum c).
double point_identify_w0_given_r1(const ObservedLaw& law, int k = 1);
double point_identify_w0_given_r1_stratum(const ObservedLaw& law, int c, int k = 1);

// Compatibility interval for q(W=0 | R=0). The third case of the endpoint
// trichotomy is an open unit interval with one excluded point and forces
// no inflation.
struct BoundInterval {
  double lower = 0.0;
  double upper = 1.0;
  bool lower_open = false;
  bool upper_open = false;
  std::optional<double> excluded_point;
  bool no_inflation = false;
  bool sharp = true;

  bool contains(double q, double tol = 0.0) const;
  double width() const { return upper - lower; }
};

struct BoundEntry {
  int indicator = 1;
  int stratum = -1;  // -1: single interval for the whole law
  double q_w0_r1 = 0.0;
  BoundInterval interval;
  std::string key() const;
};

struct BoundReport {
  ModelTag model = ModelTag::Mcar;
  std::vector<BoundEntry> entries;
  FalsificationReport falsification;
  bool sharp = true;
  const BoundEntry& single() const;  // entries.front(), for mcar / mar_shared
};

struct BoundOptions {
  double tol = kInputTol;
  long n_for_se = 0;
  bool force = false;  // proceed despite a failed falsification
};

BoundReport bound_mcar(const ObservedLaw& law, const BoundOptions& options = {});
BoundReport bound_mar_stratified(const ObservedLaw& law, const BoundOptions& options = {});
BoundReport bound_mar_shared(const ObservedLaw& law, const BoundOptions& options = {});
// Valid but possibly not sharp: the shared-channel bound applied to the
// (X_k, W_k) margin with every other observable flattened into the covariate.
BoundReport bound_mnar_per_indicator(const ObservedLaw& law, int k,
                                     const BoundOptions& options = {});
BoundReport bound_for_model(const ObservedLaw& law, ModelTag model,
                            const BoundOptions& options = {});

// The margin law used by the per-indicator reduction.
ObservedLaw reduce_to_indicator(const ObservedLaw& law, int k);

// Known zero-inflation probability: q(W=0|R=0) = (p(W=0) - q(W=0|R=1) p(R=1)) / p(R=0).
ProxyChannel channel_from_r0_prob(const ObservedLaw& law, double p_r0);
// The same three-parameter relation solved for p(R=0) at a given channel value.
double r0_from_channel(const ObservedLaw& law, double q_w0_r0);
// Image of a channel interval under the map above; sharp iff the input is.
BoundInterval r0_bounds_from_channel_bounds(const ObservedLaw& law,
                                            const BoundInterval& interval);

// Exhaustive feasibility sweep over q(W=0|R=0) in {i/grid_n}: a candidate is
// feasible iff restoration succeeds in every required stratum. Returns the
// hull of feasible points per bound entry. Independent verification path for
// the analytic endpoints.
struct OracleEntry {
  int indicator = 1;
  int stratum = -1;
  BoundInterval hull;
  long n_feasible = 0;
};
std::vector<OracleEntry> grid_feasibility_oracle(const ObservedLaw& law, ModelTag model,
                                                 int grid_n);

}  // namespace zinfer
