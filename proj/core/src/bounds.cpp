#include "zinfer/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "zinfer/parallel.hpp"
#include "zinfer/restore.hpp"

namespace zinfer {

std::string_view model_tag_name(ModelTag tag) {
  switch (tag) {
    case ModelTag::Mcar: return "mcar";
    case ModelTag::MarStratified: return "mar-stratified";
    case ModelTag::MarShared: return "mar-shared";
    case ModelTag::Mnar: return "mnar";
  }
  return "?";
}

ModelTag model_tag_from_string(std::string_view name) {
  if (name == "mcar") return ModelTag::Mcar;
  if (name == "mar-stratified" || name == "mar_stratified") return ModelTag::MarStratified;
  if (name == "mar-shared" || name == "mar_shared") return ModelTag::MarShared;
  if (name == "mnar") return ModelTag::Mnar;
  fail(ErrorCode::ParseError, "unknown model '" + std::string(name) + "'");
}

double FalsificationReport::max_residual() const {
  double worst = 0.0;
  for (const auto& c : checks) worst = std::max(worst, c.residual);
  return worst;
}

const FalsificationCheck* FalsificationReport::worst() const {
  const FalsificationCheck* out = nullptr;
  for (const auto& c : checks)
    if (!out || c.residual > out->residual) out = &c;
  return out;
}

bool BoundInterval::contains(double q, double tol) const {
  if (q < lower - tol || q > upper + tol) return false;
  if (excluded_point && std::abs(q - *excluded_point) <= kStructuralTol) return false;
  return true;
}

std::string BoundEntry::key() const {
  std::string out = "k=" + std::to_string(indicator);
  if (stratum >= 0) out += ",c=" + std::to_string(stratum);
  return out;
}

const BoundEntry& BoundReport::single() const {
  if (entries.size() != 1)
    fail(ErrorCode::ShapeMismatch, "report holds multiple intervals");
  return entries.front();
}

namespace {

// Per-stratum joint masses of the (X_k, W_k, C) margin: pw[w][x] = p(W=w, X=x, c).
struct StratumView {
  std::vector<double> pw0, pw1;
  double mass = 0.0;  // p(c)
  double px(int x) const {
    return pw0[static_cast<std::size_t>(x)] + pw1[static_cast<std::size_t>(x)];
  }
  double w0_given_x(int x) const { return pw0[static_cast<std::size_t>(x)] / px(x); }
};

std::vector<StratumView> stratum_views(const ObservedLaw& law, int k) {
  ProbTable margin = law.margin_xwc(k);  // axes (Xk, Wk, C)
  int x_card = margin.axis(0).cardinality;
  int c_card = margin.axis(2).cardinality;
  std::vector<StratumView> views(static_cast<std::size_t>(c_card));
  for (int c = 0; c < c_card; ++c) {
    auto& v = views[static_cast<std::size_t>(c)];
    v.pw0.resize(static_cast<std::size_t>(x_card));
    v.pw1.resize(static_cast<std::size_t>(x_card));
    for (int x = 0; x < x_card; ++x) {
      v.pw0[static_cast<std::size_t>(x)] = margin.at({x, 0, c});
      v.pw1[static_cast<std::size_t>(x)] = margin.at({x, 1, c});
      v.mass += v.px(x);
    }
  }
  return views;
}

// Collapse the stratum dimension (marginal view over C).
StratumView collapse(const std::vector<StratumView>& views) {
  StratumView out;
  out.pw0.assign(views.front().pw0.size(), 0.0);
  out.pw1.assign(views.front().pw1.size(), 0.0);
  out.mass = 1.0;
  for (const auto& v : views)
    for (std::size_t x = 0; x < out.pw0.size(); ++x) {
      out.pw0[x] += v.pw0[x];
      out.pw1[x] += v.pw1[x];
    }
  return out;
}

std::string cell_name(int k, int x, int c) {
  std::string out = "p(X" + std::to_string(k) + "=" + std::to_string(x);
  if (c >= 0) out += ", c=" + std::to_string(c);
  return out + ")";
}

// 3 binomial standard errors of the difference of the two conditionals
// behind an equality constraint, at sample size n.
double se_slack(const StratumView& a, int xa, const StratumView& b, int xb, long n) {
  if (n <= 0) return 0.0;
  auto var = [n](const StratumView& v, int x) {
    double cell = v.px(x);
    double p = v.w0_given_x(x);
    return p * (1.0 - p) / (static_cast<double>(n) * cell);
  };
  return 3.0 * std::sqrt(var(a, xa) + var(b, xb));
}

struct FalsifyAccumulator {
  FalsificationReport report;
  void equality(int k, int x, int c, double lhs, double rhs, double slack) {
    FalsificationCheck check{"eq:x=" + std::to_string(x), k, c, std::abs(lhs - rhs)};
    if (check.residual > std::max(report.tol, slack)) report.pass = false;
    report.checks.push_back(std::move(check));
  }
  void skip(const std::string& cell) { report.skipped_cells.push_back(cell); }
};

// Equality constraints of the stratified model: p(W=0|x,c) = p(W=0|x=1,c).
void falsify_stratified_eq(const ObservedLaw& law, int k, FalsifyAccumulator& acc, long n) {
  auto views = stratum_views(law, k);
  int x_card = law.x_card(k);
  for (int c = 0; c < static_cast<int>(views.size()); ++c) {
    const auto& v = views[static_cast<std::size_t>(c)];
    if (v.px(1) <= 0.0)
      fail(ErrorCode::PositivityViolation, cell_name(k, 1, c) + " is empty");
    for (int x = 2; x < x_card; ++x) {
      if (v.px(x) <= 0.0) {
        acc.skip(cell_name(k, x, c));
        continue;
      }
      acc.equality(k, x, c, v.w0_given_x(x), v.w0_given_x(1), se_slack(v, x, v, 1, n));
    }
  }
}

// Constraints of the shared-channel model on one indicator margin: equality
// of every p(W=0|x,c), x != 0, with the marginal p(W=0|x=1), plus the
// one-sided dichotomy over p(W=0|x=0,c).
void falsify_shared_eq(const ObservedLaw& law, int k, FalsifyAccumulator& acc, long n) {
  auto views = stratum_views(law, k);
  StratumView margin = collapse(views);
  int x_card = law.x_card(k);
  if (margin.px(1) <= 0.0)
    fail(ErrorCode::PositivityViolation, cell_name(k, 1, -1) + " is empty");
  double q_r1 = margin.w0_given_x(1);
  bool single_stratum = views.size() == 1;
  for (int c = 0; c < static_cast<int>(views.size()); ++c) {
    const auto& v = views[static_cast<std::size_t>(c)];
    for (int x = 1; x < x_card; ++x) {
      if (single_stratum && x == 1) continue;  // identical to the margin
      if (v.px(x) <= 0.0) {
        acc.skip(cell_name(k, x, c));
        continue;
      }
      acc.equality(k, x, c, v.w0_given_x(x), q_r1, se_slack(v, x, margin, 1, n));
    }
  }
  // dichotomy: either every p(W=0|x=0,c) <= q_r1 or every one >= q_r1
  double worst_above = 0.0, worst_below = 0.0;
  double slack = 0.0;
  for (int c = 0; c < static_cast<int>(views.size()); ++c) {
    const auto& v = views[static_cast<std::size_t>(c)];
    if (v.px(0) <= 0.0)
      fail(ErrorCode::PositivityViolation, cell_name(k, 0, c) + " is empty");
    double diff = v.w0_given_x(0) - q_r1;
    worst_above = std::max(worst_above, diff);
    worst_below = std::max(worst_below, -diff);
    slack = std::max(slack, se_slack(v, 0, margin, 1, n));
  }
  FalsificationCheck check{"dichotomy", k, -1, std::min(worst_above, worst_below)};
  if (check.residual > std::max(acc.report.tol, slack)) acc.report.pass = false;
  acc.report.checks.push_back(std::move(check));
}

}  // namespace

ObservedLaw reduce_to_indicator(const ObservedLaw& law, int k) {
  if (k < 1 || k > law.n_indicators())
    fail(ErrorCode::ShapeMismatch, "no indicator " + std::to_string(k));
  const ProbTable& t = law.table();
  int n = law.n_indicators();
  std::vector<std::string> order{t.axis(k - 1).name, t.axis(n + k - 1).name};
  std::vector<CategoricalSpace> axes{CategoricalSpace::recorded(1, law.x_card(k)),
                                     CategoricalSpace::proxy(1)};
  int z = 1;
  for (int j = 0; j < 2 * n; ++j) {
    if (j == k - 1 || j == n + k - 1) continue;
    order.push_back(t.axis(j).name);
    axes.push_back(CategoricalSpace::covariate(t.axis(j).cardinality, "Z" + std::to_string(z++)));
  }
  order.push_back("C");
  axes.push_back(CategoricalSpace::covariate(t.axes().back().cardinality, "Z" + std::to_string(z)));
  ProbTable reduced = t.permuted(order);
  return ObservedLaw::build(ProbTable(std::move(axes), reduced.entries()));
}

FalsificationReport falsify(const ObservedLaw& law, ModelTag model, double tol, long n_for_se) {
  FalsifyAccumulator acc;
  acc.report.model = model;
  acc.report.tol = tol;
  switch (model) {
    case ModelTag::Mcar: {
      if (law.n_indicators() != 1)
        fail(ErrorCode::ShapeMismatch, "model has a single indicator");
      // the covariate-free model constrains the (X, W) margin only
      auto views = stratum_views(law, 1);
      StratumView margin = collapse(views);
      if (margin.px(1) <= 0.0)
        fail(ErrorCode::PositivityViolation, cell_name(1, 1, -1) + " is empty");
      for (int x = 2; x < law.x_card(1); ++x) {
        if (margin.px(x) <= 0.0) {
          acc.skip(cell_name(1, x, -1));
          continue;
        }
        acc.equality(1, x, -1, margin.w0_given_x(x), margin.w0_given_x(1),
                     se_slack(margin, x, margin, 1, n_for_se));
      }
      break;
    }
    case ModelTag::MarStratified:
      if (law.n_indicators() != 1)
        fail(ErrorCode::ShapeMismatch, "model has a single indicator");
      falsify_stratified_eq(law, 1, acc, n_for_se);
      break;
    case ModelTag::MarShared:
      if (law.n_indicators() != 1)
        fail(ErrorCode::ShapeMismatch, "model has a single indicator");
      falsify_shared_eq(law, 1, acc, n_for_se);
      break;
    case ModelTag::Mnar:
      for (int k = 1; k <= law.n_indicators(); ++k) {
        ObservedLaw reduced = reduce_to_indicator(law, k);
        FalsifyAccumulator sub;
        sub.report.tol = tol;
        falsify_shared_eq(reduced, 1, sub, n_for_se);
        for (auto& check : sub.report.checks) {
          check.indicator = k;
          acc.report.checks.push_back(check);
        }
        for (auto& cell : sub.report.skipped_cells) acc.report.skipped_cells.push_back(cell);
        acc.report.pass = acc.report.pass && sub.report.pass;
      }
      break;
  }
  return acc.report;
}

double point_identify_w0_given_r1(const ObservedLaw& law, int k) {
  StratumView margin = collapse(stratum_views(law, k));
  if (margin.px(1) <= 0.0)
    fail(ErrorCode::PositivityViolation, cell_name(k, 1, -1) + " is empty");
  return margin.w0_given_x(1);
}

double point_identify_w0_given_r1_stratum(const ObservedLaw& law, int c, int k) {
  auto views = stratum_views(law, k);
  if (c < 0 || c >= static_cast<int>(views.size()))
    fail(ErrorCode::ShapeMismatch, "no stratum " + std::to_string(c));
  const auto& v = views[static_cast<std::size_t>(c)];
  if (v.px(1) <= 0.0)
    fail(ErrorCode::PositivityViolation, cell_name(k, 1, c) + " is empty");
  return v.w0_given_x(1);
}

namespace {

// The endpoint trichotomy shared by every bound: compare the zero-cell
// conditional(s) against the point-identified q(W=0|R=1).
BoundInterval interval_from_cases(double q_r1, double lo_candidate, double hi_candidate,
                                  bool any_above, bool any_below) {
  BoundInterval out;
  if (any_above && any_below)
    fail(ErrorCode::FalsifiedModel, "zero-cell conditionals straddle q(W=0|R=1)");
  if (any_above) {
    out.lower = hi_candidate;
    out.upper = 1.0;
  } else if (any_below) {
    out.lower = 0.0;
    out.upper = lo_candidate;
  } else {
    out.lower = 0.0;
    out.upper = 1.0;
    out.lower_open = out.upper_open = true;
    out.excluded_point = q_r1;
    out.no_inflation = true;
  }
  return out;
}

void gate_falsification(const FalsificationReport& report, const BoundOptions& options) {
  if (report.pass || options.force) return;
  const FalsificationCheck* worst = report.worst();
  std::ostringstream msg;
  msg << "observed law violates constraint " << (worst ? worst->constraint_id : "?")
      << " with residual " << (worst ? worst->residual : 0.0);
  fail(ErrorCode::FalsifiedModel, msg.str());
}

BoundReport bound_shared_impl(const ObservedLaw& law, ModelTag model,
                              const BoundOptions& options, int indicator, bool sharp) {
  BoundReport report;
  report.model = model;
  report.falsification = falsify(law, model, options.tol, options.n_for_se);
  gate_falsification(report.falsification, options);

  auto views = stratum_views(law, 1);
  double q_r1 = point_identify_w0_given_r1(law);
  double hi = 0.0, lo = 1.0;
  bool any_above = false, any_below = false;
  for (int c = 0; c < static_cast<int>(views.size()); ++c) {
    const auto& v = views[static_cast<std::size_t>(c)];
    if (v.px(0) <= 0.0)
      fail(ErrorCode::PositivityViolation, cell_name(indicator, 0, c) + " is empty");
    double w0x0 = v.w0_given_x(0);
    hi = std::max(hi, w0x0);
    lo = std::min(lo, w0x0);
    if (w0x0 > q_r1 + kStructuralTol) any_above = true;
    if (w0x0 < q_r1 - kStructuralTol) any_below = true;
  }
  BoundEntry entry;
  entry.indicator = indicator;
  entry.stratum = -1;
  entry.q_w0_r1 = q_r1;
  entry.interval = interval_from_cases(q_r1, lo, hi, any_above, any_below);
  entry.interval.sharp = sharp;
  report.entries.push_back(entry);
  report.sharp = sharp;
  return report;
}

}  // namespace

BoundReport bound_mcar(const ObservedLaw& law, const BoundOptions& options) {
  if (law.n_indicators() != 1)
    fail(ErrorCode::ShapeMismatch, "single-indicator bound");
  BoundReport report;
  report.model = ModelTag::Mcar;
  report.falsification = falsify(law, ModelTag::Mcar, options.tol, options.n_for_se);
  gate_falsification(report.falsification, options);

  StratumView margin = collapse(stratum_views(law, 1));
  if (margin.px(0) <= 0.0)
    fail(ErrorCode::PositivityViolation, cell_name(1, 0, -1) + " is empty");
  double q_r1 = margin.w0_given_x(1);
  double w0x0 = margin.w0_given_x(0);
  BoundEntry entry;
  entry.q_w0_r1 = q_r1;
  entry.interval = interval_from_cases(q_r1, w0x0, w0x0, w0x0 > q_r1 + kStructuralTol,
                                       w0x0 < q_r1 - kStructuralTol);
  report.entries.push_back(entry);
  return report;
}

BoundReport bound_mar_stratified(const ObservedLaw& law, const BoundOptions& options) {
  if (law.n_indicators() != 1)
    fail(ErrorCode::ShapeMismatch, "single-indicator bound");
  BoundReport report;
  report.model = ModelTag::MarStratified;
  report.falsification = falsify(law, ModelTag::MarStratified, options.tol, options.n_for_se);
  gate_falsification(report.falsification, options);

  auto views = stratum_views(law, 1);
  for (int c = 0; c < static_cast<int>(views.size()); ++c) {
    const auto& v = views[static_cast<std::size_t>(c)];
    if (v.px(0) <= 0.0 || v.px(1) <= 0.0)
      fail(ErrorCode::PositivityViolation,
           cell_name(1, v.px(0) <= 0.0 ? 0 : 1, c) + " is empty");
    double q_r1 = v.w0_given_x(1);
    double w0x0 = v.w0_given_x(0);
    BoundEntry entry;
    entry.stratum = c;
    entry.q_w0_r1 = q_r1;
    entry.interval = interval_from_cases(q_r1, w0x0, w0x0, w0x0 > q_r1 + kStructuralTol,
                                         w0x0 < q_r1 - kStructuralTol);
    report.entries.push_back(entry);
  }
  return report;
}

BoundReport bound_mar_shared(const ObservedLaw& law, const BoundOptions& options) {
  if (law.n_indicators() != 1)
    fail(ErrorCode::ShapeMismatch, "single-indicator bound");
  return bound_shared_impl(law, ModelTag::MarShared, options, 1, /*sharp=*/true);
}

BoundReport bound_mnar_per_indicator(const ObservedLaw& law, int k, const BoundOptions& options) {
  ObservedLaw reduced = reduce_to_indicator(law, k);
  BoundReport report = bound_shared_impl(reduced, ModelTag::Mnar, options, k, /*sharp=*/false);
  for (auto& check : report.falsification.checks) check.indicator = k;
  return report;
}

BoundReport bound_for_model(const ObservedLaw& law, ModelTag model, const BoundOptions& options) {
  switch (model) {
    case ModelTag::Mcar: return bound_mcar(law, options);
    case ModelTag::MarStratified: return bound_mar_stratified(law, options);
    case ModelTag::MarShared: return bound_mar_shared(law, options);
    case ModelTag::Mnar: {
      BoundReport report;
      report.model = ModelTag::Mnar;
      report.sharp = false;
      report.falsification = falsify(law, ModelTag::Mnar, options.tol, options.n_for_se);
      gate_falsification(report.falsification, options);
      BoundOptions forced = options;
      forced.force = true;  // already gated on the combined report
      for (int k = 1; k <= law.n_indicators(); ++k) {
        BoundReport sub = bound_mnar_per_indicator(law, k, forced);
        report.entries.push_back(sub.entries.front());
      }
      return report;
    }
  }
  fail(ErrorCode::ShapeMismatch, "unhandled model");
}

ProxyChannel channel_from_r0_prob(const ObservedLaw& law, double p_r0) {
  if (!(p_r0 > 0.0 && p_r0 < 1.0))
    fail(ErrorCode::IncompatibleR0, "p(R=0) must lie strictly inside (0, 1)");
  StratumView margin = collapse(stratum_views(law, 1));
  double q_r1 = point_identify_w0_given_r1(law);
  double p_w0 = 0.0;
  for (std::size_t x = 0; x < margin.pw0.size(); ++x) p_w0 += margin.pw0[x];
  double q_r0 = (p_w0 - q_r1 * (1.0 - p_r0)) / p_r0;
  if (q_r0 < -kStructuralTol || q_r0 > 1.0 + kStructuralTol) {
    std::ostringstream msg;
    msg << "implied q(W=0|R=0) = " << q_r0 << " falls outside [0,1]";
    fail(ErrorCode::IncompatibleR0, msg.str());
  }
  q_r0 = std::clamp(q_r0, 0.0, 1.0);
  if (std::abs(q_r0 - q_r1) <= kStructuralTol)
    fail(ErrorCode::IncompatibleR0, "implied channel is singular");
  return ProxyChannel::shared({ChannelFactor{q_r0, q_r1}});
}

double r0_from_channel(const ObservedLaw& law, double q_w0_r0) {
  StratumView margin = collapse(stratum_views(law, 1));
  double q_r1 = point_identify_w0_given_r1(law);
  double p_w0 = 0.0;
  for (std::size_t x = 0; x < margin.pw0.size(); ++x) p_w0 += margin.pw0[x];
  double det = q_w0_r0 - q_r1;
  if (std::abs(det) <= kStructuralTol)
    fail(ErrorCode::DegenerateInterval, "channel value coincides with q(W=0|R=1)");
  return (p_w0 - q_r1) / det;
}

BoundInterval r0_bounds_from_channel_bounds(const ObservedLaw& law,
                                            const BoundInterval& interval) {
  if (!(interval.lower <= interval.upper))
    fail(ErrorCode::DegenerateInterval, "empty channel interval");
  BoundInterval out;
  out.sharp = interval.sharp;
  if (interval.no_inflation) {
    out.lower = out.upper = 0.0;
    return out;
  }
  double q_r1 = point_identify_w0_given_r1(law);
  if (interval.lower - kStructuralTol <= q_r1 && q_r1 <= interval.upper + kStructuralTol)
    fail(ErrorCode::DegenerateInterval,
         "channel interval crosses the singular point q(W=0|R=1)");
  double at_lower = std::clamp(r0_from_channel(law, interval.lower), 0.0, 1.0);
  double at_upper = std::clamp(r0_from_channel(law, interval.upper), 0.0, 1.0);
  // the map is monotone on either side of the singular point, so the image
  // endpoints are the images of the endpoints
  if (at_lower <= at_upper) {
    out.lower = at_lower;
    out.upper = at_upper;
    out.lower_open = interval.lower_open;
    out.upper_open = interval.upper_open;
  } else {
    out.lower = at_upper;
    out.upper = at_lower;
    out.lower_open = interval.upper_open;
    out.upper_open = interval.lower_open;
  }
  return out;
}

namespace {

// Restoration feasibility of one candidate q within one stratum, using the
// same clamp thresholds as restore_general on the joint masses.
bool stratum_feasible(const StratumView& v, double q_r0, double q_r1) {
  double det = q_r0 - q_r1;
  if (std::abs(det) <= kStructuralTol) return false;
  for (std::size_t x = 0; x < v.pw0.size(); ++x) {
    double demix_r0 = ((1.0 - q_r1) * v.pw0[x] - q_r1 * v.pw1[x]) / det;
    double demix_r1 = ((q_r0 - 1.0) * v.pw0[x] + q_r0 * v.pw1[x]) / det;
    if (demix_r0 < -kRestoreTol || demix_r1 < -kRestoreTol) return false;
    if (x != 0 && std::abs(demix_r0) > kRestoreTol) return false;
  }
  return true;
}

OracleEntry sweep(const std::vector<const StratumView*>& strata, double q_r1, int grid_n,
                  int indicator, int stratum) {
  OracleEntry entry;
  entry.indicator = indicator;
  entry.stratum = stratum;
  long lo = -1, hi = -1, count = 0;

  std::size_t points = static_cast<std::size_t>(grid_n) + 1;
  std::size_t n_chunks = parallel_chunk_count(points);
  struct Partial {
    long lo = -1, hi = -1, count = 0;
  };
  std::vector<Partial> partials(n_chunks);
  parallel_chunks(points, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
    Partial& p = partials[chunk];
    for (std::size_t i = begin; i < end; ++i) {
      double q = static_cast<double>(i) / grid_n;
      bool ok = true;
      for (const StratumView* v : strata)
        if (!stratum_feasible(*v, q, q_r1)) {
          ok = false;
          break;
        }
      if (ok) {
        if (p.lo < 0) p.lo = static_cast<long>(i);
        p.hi = static_cast<long>(i);
        ++p.count;
      }
    }
  });
  for (const auto& p : partials) {
    if (p.lo < 0) continue;
    if (lo < 0) lo = p.lo;
    hi = p.hi;
    count += p.count;
  }
  if (lo < 0) fail(ErrorCode::NoFeasiblePoint, "observed law inconsistent with the model");
  entry.hull.lower = static_cast<double>(lo) / grid_n;
  entry.hull.upper = static_cast<double>(hi) / grid_n;
  entry.n_feasible = count;
  return entry;
}

}  // namespace

std::vector<OracleEntry> grid_feasibility_oracle(const ObservedLaw& law, ModelTag model,
                                                 int grid_n) {
  if (grid_n < 100) fail(ErrorCode::ShapeMismatch, "grid_n must be at least 100");
  std::vector<OracleEntry> out;
  switch (model) {
    case ModelTag::Mcar: {
      StratumView margin = collapse(stratum_views(law, 1));
      double q_r1 = point_identify_w0_given_r1(law);
      out.push_back(sweep({&margin}, q_r1, grid_n, 1, -1));
      break;
    }
    case ModelTag::MarShared: {
      auto views = stratum_views(law, 1);
      double q_r1 = point_identify_w0_given_r1(law);
      std::vector<const StratumView*> ptrs;
      for (const auto& v : views) ptrs.push_back(&v);
      out.push_back(sweep(ptrs, q_r1, grid_n, 1, -1));
      break;
    }
    case ModelTag::MarStratified: {
      auto views = stratum_views(law, 1);
      for (int c = 0; c < static_cast<int>(views.size()); ++c) {
        double q_r1 = point_identify_w0_given_r1_stratum(law, c);
        out.push_back(sweep({&views[static_cast<std::size_t>(c)]}, q_r1, grid_n, 1, c));
      }
      break;
    }
    case ModelTag::Mnar: {
      for (int k = 1; k <= law.n_indicators(); ++k) {
        ObservedLaw reduced = reduce_to_indicator(law, k);
        auto views = stratum_views(reduced, 1);
        double q_r1 = point_identify_w0_given_r1(reduced);
        std::vector<const StratumView*> ptrs;
        for (const auto& v : views) ptrs.push_back(&v);
        OracleEntry entry = sweep(ptrs, q_r1, grid_n, k, -1);
        entry.hull.sharp = false;
        out.push_back(entry);
      }
      break;
    }
  }
  return out;
}

}  // namespace zinfer
