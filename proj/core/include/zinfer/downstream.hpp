#pragma once

#include <optional>
#include <vector>

#include "zinfer/bounds.hpp"
#include "zinfer/graph.hpp"
#include "zinfer/laws.hpp"

namespace zinfer {

// p(T, R, W) = p(X, W | R=1) p(R) with the channel read off the ZI law.
// Requires a single indicator without covariate strata and p(R=1) > 0.
FullLaw full_law_mcar(const ZiLaw& zi);

// Covariate-adjusted closed form: p(T=x | c) = p(X=x | R=1, c), assembled
// with p(R | c) and p(W | R, c). Requires p(R=1, c) > 0 in every stratum.
FullLaw full_law_mar(const ZiLaw& zi);

struct IdentifyOutcome {
  enum class Status { Identified, NotIdentified, NotImplementedMnar };
  Status status = Status::Identified;
  IdVerdict verdict;  // the blocking witness when NotIdentified
  std::optional<FullLaw> law;
};

// Gate on the syntactic criterion, then dispatch by missingness class. The
// general identifying functional for identifiable MNAR graphs is out of
// scope and reported as NotImplementedMnar.
IdentifyOutcome identify(const ZiLaw& zi, const MDag& graph);

struct CurvePoint {
  double q = 0.0;                // q(W=0 | R=0) at this grid position
  double p_r0 = 0.0;             // implied inflation probability
  std::vector<double> target;    // p(T = x), or p(T = x | c) on stratum tracks
  bool feasible = false;
};

struct CurveTrack {
  int indicator = 1;
  int stratum = -1;  // -1: the single shared track
  std::vector<CurvePoint> points;
};

// Target-law range of the compatible set, traced by restoring and
// identifying at grid_n+1 evenly spaced channel values per interval.
struct SensitivityCurve {
  ModelTag model = ModelTag::Mcar;
  int grid_n = 0;
  std::vector<CurveTrack> tracks;
  std::vector<double> target_min;  // per x, marginal over strata
  std::vector<double> target_max;
};

SensitivityCurve sensitivity_curve(const ObservedLaw& law, ModelTag model, int grid_n,
                                   const BoundOptions& options = {});

}  // namespace zinfer
