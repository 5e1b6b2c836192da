#include <doctest.h>

#include <cmath>

#include "zinfer/downstream.hpp"
#include "zinfer/restore.hpp"
#include "zinfer/rng.hpp"
#include "zinfer/simulate.hpp"

using namespace zinfer;

TEST_CASE("full_law_mcar recovers the fixture target law") {
  ZiLaw zi = restore_mcar(forward_observed_law(fixtures::mcar()),
                          ProxyChannel::shared({ChannelFactor{0.8, 0.2}}));
  FullLaw full = full_law_mcar(zi);
  CHECK(full.target_law()[1] == doctest::Approx(0.5).epsilon(1e-12));
  // consistency marginalization reproduces the ZI law
  CHECK(full.to_zi_law().table().max_abs_diff(zi.table()) < 1e-12);
}

TEST_CASE("no inflation: target equals the recorded marginal") {
  auto r = CategoricalSpace::indicator(1);
  auto x = CategoricalSpace::recorded(1, 2);
  ZiLaw zi = build_zi_law(ProbTable({r, x}, {0.0, 0.0, 0.6, 0.4}));
  FullLaw full = full_law_mcar(zi);
  CHECK(full.target_law()[0] == doctest::Approx(0.6));
  CHECK(full.target_law()[1] == doctest::Approx(0.4));
}

TEST_CASE("p(R=1) = 0 blocks the closed form") {
  auto r = CategoricalSpace::indicator(1);
  auto x = CategoricalSpace::recorded(1, 2);
  ZiLaw zi = build_zi_law(ProbTable({r, x}, {1.0, 0.0, 0.0, 0.0}));
  try {
    full_law_mcar(zi);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PositivityViolation);
  }
}

TEST_CASE("full_law_mar on the shared fixture recovers 0.45") {
  Dgp dgp = fixtures::mar_shared();
  ZiLaw zi = restore_general(forward_observed_law(dgp), dgp.channel());
  FullLaw full = full_law_mar(zi);
  CHECK(full.target_law()[1] == doctest::Approx(0.45).epsilon(1e-12));
}

TEST_CASE("full_law_mar equals full_law_mcar for a single stratum") {
  Dgp dgp = fixtures::mcar();
  ZiLaw zi = restore_general(forward_observed_law(dgp), dgp.channel());
  CHECK(full_law_mar(zi).table().max_abs_diff(full_law_mcar(zi).table()) < 1e-12);
}

TEST_CASE("forward MAR processes: recovered target equals the truth") {
  Rng rng(606);
  for (DgpModel model : {DgpModel::MarShared, DgpModel::MarStratified}) {
    for (int trial = 0; trial < 100; ++trial) {
      Dgp dgp = sample_dgp(model, rng.next_u64());
      ZiLaw zi = restore_general(forward_observed_law(dgp), dgp.channel());
      FullLaw full = full_law_mar(zi);
      std::vector<double> truth = forward_target_law(dgp);
      for (std::size_t x = 0; x < truth.size(); ++x)
        CHECK(std::abs(full.target_law()[x] - truth[x]) < 1e-12);
    }
  }
}

TEST_CASE("identify dispatches by graph") {
  Dgp dgp = fixtures::mcar();
  ZiLaw zi = restore_general(forward_observed_law(dgp), dgp.channel());

  IdentifyOutcome mcar = identify(zi, builtin_graph("zi_mcar_proxy"));
  CHECK(mcar.status == IdentifyOutcome::Status::Identified);
  REQUIRE(mcar.law.has_value());
  CHECK(mcar.law->target_law()[1] == doctest::Approx(0.5).epsilon(1e-12));

  MDag censored = MDag::parse(
      "true_value T1\nindicator R1\nrecorded X1\nproxy W1\n"
      "T1 -> X1\nR1 -> X1\nR1 -> W1\nT1 -> R1\n");
  IdentifyOutcome blocked = identify(zi, censored);
  CHECK(blocked.status == IdentifyOutcome::Status::NotIdentified);
  CHECK(blocked.verdict.kind == IdVerdict::Kind::SelfCensoring);
  CHECK_FALSE(blocked.law.has_value());
}

TEST_CASE("identifiable MNAR graphs report the unimplemented functional") {
  Dgp dgp = fixtures::block_parallel();
  ZiLaw zi = forward_zi_law(dgp);
  IdentifyOutcome outcome = identify(zi, builtin_graph("zi_block_parallel"));
  CHECK(outcome.status == IdentifyOutcome::Status::NotImplementedMnar);
  CHECK_FALSE(outcome.law.has_value());
}

TEST_CASE("fixture sensitivity curve hits the hand-computed endpoints") {
  ObservedLaw law = forward_observed_law(fixtures::mcar());
  SensitivityCurve curve = sensitivity_curve(law, ModelTag::Mcar, 200);
  REQUIRE(curve.tracks.size() == 1);
  const auto& points = curve.tracks.front().points;
  REQUIRE(points.size() == 201);

  CHECK(points.front().q == doctest::Approx(0.31 / 0.65).epsilon(1e-12));
  CHECK(points.front().target[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(points.front().p_r0 == doctest::Approx(0.65).epsilon(1e-9));

  CHECK(points.back().q == doctest::Approx(1.0));
  CHECK(points.back().target[1] == doctest::Approx(0.35 / 0.775).epsilon(1e-9));
  CHECK(points.back().p_r0 == doctest::Approx(0.225).epsilon(1e-9));

  CHECK(curve.target_min[1] == doctest::Approx(0.35 / 0.775).epsilon(1e-9));
  CHECK(curve.target_max[1] == doctest::Approx(1.0).epsilon(1e-9));

  // q strictly increasing; feasible targets normalized; p_r0 decreasing on
  // the upper branch
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i) CHECK(points[i].q > points[i - 1].q);
    REQUIRE(points[i].feasible);
    double sum = points[i].target[0] + points[i].target[1];
    CHECK(std::abs(sum - 1.0) < 1e-12);
    if (i) CHECK(points[i].p_r0 < points[i - 1].p_r0);
  }
}

TEST_CASE("curve through the true channel reproduces the true target") {
  Rng rng(1001);
  for (int trial = 0; trial < 25; ++trial) {
    Dgp dgp = sample_dgp(DgpModel::Mcar, rng.next_u64());
    ObservedLaw law = forward_observed_law(dgp);
    BoundReport rep = bound_mcar(law);
    if (rep.single().interval.no_inflation) continue;
    double truth_q = dgp.true_q_w0_r0();
    ZiLaw zi = restore_general(law, ProxyChannel::shared({ChannelFactor{
                                        truth_q, rep.single().q_w0_r1}}));
    FullLaw full = full_law_mcar(zi);
    std::vector<double> truth = forward_target_law(dgp);
    for (std::size_t x = 0; x < truth.size(); ++x)
      CHECK(std::abs(full.target_law()[x] - truth[x]) < 1e-12);
  }
}

TEST_CASE("no-inflation input yields a single-point curve with the observed marginal") {
  ObservedLaw uniform = build_observed_law(
      ProbTable({CategoricalSpace::proxy(1), CategoricalSpace::recorded(1, 2)},
                {0.25, 0.25, 0.25, 0.25}));
  SensitivityCurve curve = sensitivity_curve(uniform, ModelTag::Mcar, 100);
  REQUIRE(curve.tracks.size() == 1);
  REQUIRE(curve.tracks.front().points.size() == 1);
  const CurvePoint& point = curve.tracks.front().points.front();
  CHECK(point.p_r0 == 0.0);
  CHECK(point.target[0] == doctest::Approx(0.5));
  CHECK(point.target[1] == doctest::Approx(0.5));
}

TEST_CASE("shared fixture curve brackets the true target 0.45") {
  ObservedLaw law = forward_observed_law(fixtures::mar_shared());
  SensitivityCurve curve = sensitivity_curve(law, ModelTag::MarShared, 100);
  CHECK(curve.target_min[1] <= 0.45 + 1e-12);
  CHECK(curve.target_max[1] >= 0.45 - 1e-12);
}

TEST_CASE("stratified fixture: per-stratum tracks bracket the per-stratum truths") {
  Dgp dgp = fixtures::mar_stratified();
  ObservedLaw law = forward_observed_law(dgp);
  SensitivityCurve curve = sensitivity_curve(law, ModelTag::MarStratified, 100);
  REQUIRE(curve.tracks.size() == 2);
  // truth: p(T=1 | c) = 0.4 in both strata
  for (const auto& track : curve.tracks) {
    double lo = 1.0, hi = 0.0;
    for (const auto& p : track.points) {
      if (!p.feasible) continue;
      lo = std::min(lo, p.target[1]);
      hi = std::max(hi, p.target[1]);
    }
    CHECK(lo <= 0.4 + 1e-9);
    CHECK(hi >= 0.4 - 1e-9);
  }
  // marginal range built corner-wise from the stratum weights
  CHECK(curve.target_min[1] <= 0.4 + 1e-9);
  CHECK(curve.target_max[1] >= 0.4 - 1e-9);
}

TEST_CASE("implied p(R=0) rises with q on the lower-branch interval") {
  // swapping the fixture channel puts the compatible set on [0, p(W=0|X=0)]
  Dgp dgp = fixtures::mcar();
  std::get<ScalarDgpParams>(dgp.params).channel = {ChannelFactor{0.2, 0.8}};
  ObservedLaw law = forward_observed_law(dgp);
  BoundReport rep = bound_mcar(law);
  CHECK(rep.single().interval.lower == 0.0);
  CHECK(rep.single().interval.upper < rep.single().q_w0_r1);
  SensitivityCurve curve = sensitivity_curve(law, ModelTag::Mcar, 50);
  const auto& points = curve.tracks.front().points;
  for (std::size_t i = 1; i < points.size(); ++i) {
    REQUIRE(points[i].feasible);
    CHECK(points[i].p_r0 > points[i - 1].p_r0);
  }
  // true channel value sits inside and reproduces the true inflation rate
  CHECK(rep.single().interval.contains(0.2));
}

TEST_CASE("every interior grid point of a sharp interval restores cleanly") {
  Rng rng(321);
  for (int trial = 0; trial < 20; ++trial) {
    Dgp dgp = sample_dgp(DgpModel::MarShared, rng.next_u64());
    ObservedLaw law = forward_observed_law(dgp);
    SensitivityCurve curve = sensitivity_curve(law, ModelTag::MarShared, 50);
    for (const auto& p : curve.tracks.front().points) CHECK(p.feasible);
  }
}
