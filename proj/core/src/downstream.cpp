#include "zinfer/downstream.hpp"

#include <algorithm>
#include <cmath>

#include "zinfer/restore.hpp"

namespace zinfer {

namespace {

// p(W=w | R=r, c) read off a ZI law; slices with no indicator mass fall back
// to 0.5 (they only ever multiply cells of probability zero).
struct ZiChannelView {
  std::vector<double> w0_given_rc;  // [r * c_card + c]
  int c_card = 1;
  double operator()(int w, int r, int c) const {
    double w0 = w0_given_rc[static_cast<std::size_t>(r * c_card + c)];
    return w == 0 ? w0 : 1.0 - w0;
  }
};

ZiChannelView channel_view(const ZiLaw& zi) {
  ZiChannelView view;
  view.c_card = zi.c_card();
  view.w0_given_rc.assign(static_cast<std::size_t>(2 * view.c_card), 0.5);
  if (!zi.has_proxies()) return view;
  ProbTable rwc = zi.table().marginal({"R1", "W1", "C"});
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < view.c_card; ++c) {
      double mass = rwc.at({r, 0, c}) + rwc.at({r, 1, c});
      if (mass > 0.0)
        view.w0_given_rc[static_cast<std::size_t>(r * view.c_card + c)] =
            rwc.at({r, 0, c}) / mass;
    }
  return view;
}

FullLaw assemble_adjusted(const ZiLaw& zi) {
  int c_card = zi.c_card();
  int x_card = zi.table().axis(1).cardinality;
  bool has_w = zi.has_proxies();

  ProbTable rxc = zi.table().marginal({"R1", "X1", "C"});
  std::vector<double> p_c(static_cast<std::size_t>(c_card), 0.0);
  std::vector<double> p_r0_c(static_cast<std::size_t>(c_card), 0.0);
  for (int c = 0; c < c_card; ++c) {
    double r0 = 0.0, r1 = 0.0;
    for (int x = 0; x < x_card; ++x) {
      r0 += rxc.at({0, x, c});
      r1 += rxc.at({1, x, c});
    }
    p_c[static_cast<std::size_t>(c)] = r0 + r1;
    if (r1 <= 0.0)
      fail(ErrorCode::PositivityViolation,
           "p(R=1, c=" + std::to_string(c) + ") = 0 blocks adjustment");
    p_r0_c[static_cast<std::size_t>(c)] = r0 / (r0 + r1);
  }
  ZiChannelView w_view = channel_view(zi);

  std::vector<CategoricalSpace> axes{CategoricalSpace::true_value(1, x_card),
                                     CategoricalSpace::indicator(1)};
  if (has_w) axes.push_back(CategoricalSpace::proxy(1));
  axes.push_back(CategoricalSpace::covariate(c_card));
  ProbTable full = ProbTable::zeros(std::move(axes));

  std::vector<int> idx(full.axes().size());
  for (int c = 0; c < c_card; ++c) {
    double r1_mass = 0.0;
    std::vector<double> t_given_c(static_cast<std::size_t>(x_card), 0.0);
    for (int x = 0; x < x_card; ++x) {
      t_given_c[static_cast<std::size_t>(x)] = rxc.at({1, x, c});
      r1_mass += rxc.at({1, x, c});
    }
    for (auto& v : t_given_c) v /= r1_mass;  // p(T=x | c) = p(X=x | R=1, c)

    for (int t = 0; t < x_card; ++t)
      for (int r = 0; r < 2; ++r) {
        double base = p_c[static_cast<std::size_t>(c)] * t_given_c[static_cast<std::size_t>(t)] *
                      (r == 0 ? p_r0_c[static_cast<std::size_t>(c)]
                              : 1.0 - p_r0_c[static_cast<std::size_t>(c)]);
        idx[0] = t;
        idx[1] = r;
        if (has_w) {
          for (int w = 0; w < 2; ++w) {
            idx[2] = w;
            idx[3] = c;
            full.at(std::span<const int>(idx)) = base * w_view(w, r, c);
          }
        } else {
          idx[2] = c;
          full.at(std::span<const int>(idx)) = base;
        }
      }
  }
  return FullLaw::build(std::move(full));
}

}  // namespace

FullLaw full_law_mcar(const ZiLaw& zi) {
  if (zi.n_indicators() != 1)
    fail(ErrorCode::ShapeMismatch, "closed form covers a single indicator");
  if (zi.c_card() != 1)
    fail(ErrorCode::ShapeMismatch, "law carries covariate strata; use full_law_mar");
  return assemble_adjusted(zi);
}

FullLaw full_law_mar(const ZiLaw& zi) {
  if (zi.n_indicators() != 1)
    fail(ErrorCode::ShapeMismatch, "closed form covers a single indicator");
  return assemble_adjusted(zi);
}

IdentifyOutcome identify(const ZiLaw& zi, const MDag& graph) {
  if (graph.n_indicators() != zi.n_indicators())
    fail(ErrorCode::ShapeMismatch, "graph and law disagree on the indicator count");
  IdentifyOutcome outcome;
  outcome.verdict = full_law_identifiable(graph);
  if (!outcome.verdict.identifiable()) {
    outcome.status = IdentifyOutcome::Status::NotIdentified;
    return outcome;
  }
  switch (classify_missingness(graph)) {
    case MissClass::MCAR:
    case MissClass::MAR:
      outcome.status = IdentifyOutcome::Status::Identified;
      outcome.law = zi.c_card() > 1 ? full_law_mar(zi) : full_law_mcar(zi);
      break;
    case MissClass::MNAR:
      outcome.status = IdentifyOutcome::Status::NotImplementedMnar;
      break;
  }
  return outcome;
}

namespace {

// Any channel value strictly inside the interval (used to pin the strata a
// stratified track is not currently varying).
double interior_value(const BoundInterval& iv) {
  if (iv.no_inflation) {
    double q = 0.25;
    if (iv.excluded_point && std::abs(q - *iv.excluded_point) < 1e-6) q = 0.75;
    return q;
  }
  return 0.5 * (iv.lower + iv.upper);
}

std::vector<double> observed_x_marginal(const ObservedLaw& law) {
  ProbTable m = law.table().marginal({"X1"});
  return m.entries();
}

std::vector<double> stratum_x_marginal(const ObservedLaw& law, int c) {
  ProbTable m = law.table().marginal({"X1", "C"});
  std::vector<double> out(static_cast<std::size_t>(law.x_card(1)));
  double total = 0.0;
  for (int x = 0; x < law.x_card(1); ++x) total += m.at({x, c});
  for (int x = 0; x < law.x_card(1); ++x) out[static_cast<std::size_t>(x)] = m.at({x, c}) / total;
  return out;
}

std::vector<double> grid_values(const BoundInterval& iv, int grid_n) {
  double lo = iv.lower + (iv.lower_open ? 1e-12 : 0.0);
  double hi = iv.upper - (iv.upper_open ? 1e-12 : 0.0);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(grid_n) + 1);
  for (int i = 0; i <= grid_n; ++i)
    out.push_back(lo + (hi - lo) * static_cast<double>(i) / grid_n);
  return out;
}

}  // namespace

SensitivityCurve sensitivity_curve(const ObservedLaw& law, ModelTag model, int grid_n,
                                   const BoundOptions& options) {
  if (grid_n < 2) fail(ErrorCode::EmptyInterval, "grid_n must be at least 2");
  if (model == ModelTag::Mnar)
    fail(ErrorCode::ShapeMismatch,
         "target identification for the multi-indicator MNAR model is not provided");
  BoundReport report = bound_for_model(law, model, options);

  SensitivityCurve curve;
  curve.model = model;
  curve.grid_n = grid_n;
  int x_card = law.x_card(1);
  curve.target_min.assign(static_cast<std::size_t>(x_card), 0.0);
  curve.target_max.assign(static_cast<std::size_t>(x_card), 0.0);

  ProbTable c_marginal = law.table().marginal({"C"});

  std::vector<std::vector<double>> track_min, track_max;
  for (const auto& entry : report.entries) {
    CurveTrack track;
    track.indicator = entry.indicator;
    track.stratum = entry.stratum;
    bool stratified = model == ModelTag::MarStratified && law.c_card() > 1;

    if (entry.interval.no_inflation) {
      CurvePoint point;
      point.q = entry.interval.excluded_point.value_or(entry.q_w0_r1);
      point.p_r0 = 0.0;
      point.feasible = true;
      point.target = stratified ? stratum_x_marginal(law, entry.stratum)
                                : observed_x_marginal(law);
      track.points.push_back(std::move(point));
    } else {
      for (double q : grid_values(entry.interval, grid_n)) {
        CurvePoint point;
        point.q = q;
        try {
          ProxyChannel channel = [&]() {
            if (!stratified) return ProxyChannel::shared({ChannelFactor{q, entry.q_w0_r1}});
            std::vector<ChannelFactor> per_c;
            for (const auto& other : report.entries) {
              double qc = other.stratum == entry.stratum ? q : interior_value(other.interval);
              per_c.push_back(ChannelFactor{qc, other.q_w0_r1});
            }
            return ProxyChannel::stratified({per_c});
          }();
          ZiLaw zi = restore_general(law, channel);
          FullLaw full = law.c_card() > 1 ? full_law_mar(zi) : full_law_mcar(zi);
          if (stratified) {
            point.p_r0 = zi.p_r0_given_c(entry.stratum);
            ProbTable tc = full.table().marginal({"T1", "C"});
            double mass = 0.0;
            for (int x = 0; x < x_card; ++x) mass += tc.at({x, entry.stratum});
            for (int x = 0; x < x_card; ++x)
              point.target.push_back(tc.at({x, entry.stratum}) / mass);
          } else {
            point.p_r0 = zi.p_r0();
            point.target = full.target_law();
          }
          point.feasible = true;
        } catch (const Error&) {
          point.feasible = false;
          point.target.clear();
        }
        track.points.push_back(std::move(point));
      }
    }

    std::vector<double> mins(static_cast<std::size_t>(x_card), 1.0);
    std::vector<double> maxs(static_cast<std::size_t>(x_card), 0.0);
    bool any = false;
    for (const auto& p : track.points) {
      if (!p.feasible) continue;
      any = true;
      for (int x = 0; x < x_card; ++x) {
        mins[static_cast<std::size_t>(x)] =
            std::min(mins[static_cast<std::size_t>(x)], p.target[static_cast<std::size_t>(x)]);
        maxs[static_cast<std::size_t>(x)] =
            std::max(maxs[static_cast<std::size_t>(x)], p.target[static_cast<std::size_t>(x)]);
      }
    }
    if (!any) fail(ErrorCode::EmptyInterval, "no feasible point on the curve");
    track_min.push_back(std::move(mins));
    track_max.push_back(std::move(maxs));
    curve.tracks.push_back(std::move(track));
  }

  // marginal target range: single track passes through; stratified tracks
  // combine corner-wise with the stratum weights
  if (curve.tracks.size() == 1 && curve.tracks.front().stratum < 0) {
    curve.target_min = track_min.front();
    curve.target_max = track_max.front();
  } else {
    for (std::size_t i = 0; i < curve.tracks.size(); ++i) {
      double weight = c_marginal.at({curve.tracks[i].stratum});
      for (int x = 0; x < x_card; ++x) {
        curve.target_min[static_cast<std::size_t>(x)] +=
            weight * track_min[i][static_cast<std::size_t>(x)];
        curve.target_max[static_cast<std::size_t>(x)] +=
            weight * track_max[i][static_cast<std::size_t>(x)];
      }
    }
  }
  return curve;
}

}  // namespace zinfer
