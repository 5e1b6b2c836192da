#include <doctest.h>

#include <cmath>

#include "zinfer/bounds.hpp"
#include "zinfer/restore.hpp"
#include "zinfer/rng.hpp"
#include "zinfer/simulate.hpp"

using namespace zinfer;

namespace {

ObservedLaw fixture_law() { return forward_observed_law(fixtures::mcar()); }

}  // namespace

TEST_CASE("forward fixture law matches the hand-computed table") {
  ObservedLaw law = fixture_law();
  CHECK(law.table().at({0, 0, 0}) == doctest::Approx(0.31).epsilon(1e-14));
  CHECK(law.table().at({1, 0, 0}) == doctest::Approx(0.07).epsilon(1e-14));
  CHECK(law.table().at({0, 1, 0}) == doctest::Approx(0.34).epsilon(1e-14));
  CHECK(law.table().at({1, 1, 0}) == doctest::Approx(0.28).epsilon(1e-14));
}

TEST_CASE("falsify: binary recorded value imposes no equality constraint") {
  FalsificationReport rep = falsify(fixture_law(), ModelTag::Mcar);
  CHECK(rep.pass);
  CHECK(rep.checks.empty());
}

TEST_CASE("falsify: constructed ternary breach fails with the right id") {
  // p(W=0|X=1) = 0.5 but p(W=0|X=2) = 0.75
  ProbTable t({CategoricalSpace::recorded(1, 3), CategoricalSpace::proxy(1)},
              {0.20, 0.20, 0.10, 0.20, 0.25, 0.05});
  // cells: x0:(w0=.2,w1=.2) x1:(.1,.2)->1/3 x2:(.25,.05)->5/6
  FalsificationReport rep = falsify(build_observed_law(t), ModelTag::Mcar);
  CHECK_FALSE(rep.pass);
  REQUIRE(rep.checks.size() == 1);
  CHECK(rep.checks.front().constraint_id == "eq:x=2");
  CHECK(rep.checks.front().residual == doctest::Approx(5.0 / 6.0 - 1.0 / 3.0));
}

TEST_CASE("falsify: forward law of each fixture passes its own model at 1e-12") {
  CHECK(falsify(forward_observed_law(fixtures::mcar()), ModelTag::Mcar, 1e-12).pass);
  CHECK(falsify(forward_observed_law(fixtures::mar_stratified()), ModelTag::MarStratified, 1e-12)
            .pass);
  CHECK(falsify(forward_observed_law(fixtures::mar_shared()), ModelTag::MarShared, 1e-12).pass);
  CHECK(falsify(forward_observed_law(fixtures::block_parallel()), ModelTag::Mnar, 1e-12).pass);
}

TEST_CASE("falsify: shared-channel dichotomy breach is caught") {
  // two strata whose zero-cell conditionals straddle p(W=0|X=1)
  auto x = CategoricalSpace::recorded(1, 2);
  auto w = CategoricalSpace::proxy(1);
  auto c = CategoricalSpace::covariate(2);
  ProbTable t = ProbTable::zeros({x, w, c});
  // stratum 0: p(w0|x0)=0.9; stratum 1: p(w0|x0)=0.1; both p(w0|x1)=0.5
  t.at({0, 0, 0}) = 0.9 * 0.25;
  t.at({0, 1, 0}) = 0.1 * 0.25;
  t.at({1, 0, 0}) = 0.5 * 0.25;
  t.at({1, 1, 0}) = 0.5 * 0.25;
  t.at({0, 0, 1}) = 0.1 * 0.25;
  t.at({0, 1, 1}) = 0.9 * 0.25;
  t.at({1, 0, 1}) = 0.5 * 0.25;
  t.at({1, 1, 1}) = 0.5 * 0.25;
  FalsificationReport rep = falsify(build_observed_law(t), ModelTag::MarShared);
  CHECK_FALSE(rep.pass);
  bool found = false;
  for (const auto& check : rep.checks)
    if (check.constraint_id == "dichotomy" && check.residual > 0.3) found = true;
  CHECK(found);
}

TEST_CASE("point identification of q(W=0|R=1)") {
  CHECK(point_identify_w0_given_r1(fixture_law()) == doctest::Approx(0.2).epsilon(1e-12));
  ObservedLaw uniform = build_observed_law(
      ProbTable({CategoricalSpace::proxy(1), CategoricalSpace::recorded(1, 2)},
                {0.25, 0.25, 0.25, 0.25}));
  CHECK(point_identify_w0_given_r1(uniform) == doctest::Approx(0.5));
  ProbTable no_x1({CategoricalSpace::recorded(1, 2), CategoricalSpace::proxy(1)},
                  {0.6, 0.4, 0.0, 0.0});
  try {
    point_identify_w0_given_r1(build_observed_law(no_x1));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PositivityViolation);
  }
}

TEST_CASE("endpoint trichotomy on the fixture law") {
  BoundReport rep = bound_mcar(fixture_law());
  const BoundEntry& entry = rep.single();
  CHECK(entry.q_w0_r1 == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(entry.interval.lower == doctest::Approx(0.31 / 0.65).epsilon(1e-12));
  CHECK(entry.interval.upper == 1.0);
  CHECK_FALSE(entry.interval.lower_open);
  CHECK_FALSE(entry.interval.no_inflation);
  CHECK(entry.interval.contains(0.8));
  CHECK(rep.sharp);
}

TEST_CASE("uniform law hits the excluded-point no-inflation case") {
  ObservedLaw uniform = build_observed_law(
      ProbTable({CategoricalSpace::proxy(1), CategoricalSpace::recorded(1, 2)},
                {0.25, 0.25, 0.25, 0.25}));
  BoundReport rep = bound_mcar(uniform);
  const BoundInterval& iv = rep.single().interval;
  CHECK(iv.no_inflation);
  CHECK(iv.lower_open);
  CHECK(iv.upper_open);
  REQUIRE(iv.excluded_point.has_value());
  CHECK(*iv.excluded_point == doctest::Approx(0.5));
  CHECK_FALSE(iv.contains(0.5));
  CHECK(iv.contains(0.3));
}

TEST_CASE("stratified bound matches the fixture endpoints") {
  ObservedLaw law = forward_observed_law(fixtures::mar_stratified());
  BoundReport rep = bound_mar_stratified(law);
  REQUIRE(rep.entries.size() == 2);
  CHECK(rep.entries[0].q_w0_r1 == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(rep.entries[0].interval.lower == doctest::Approx(0.228 / 0.68).epsilon(1e-12));
  CHECK(rep.entries[0].interval.upper == 1.0);
  CHECK(rep.entries[0].interval.contains(0.9));
  CHECK(rep.entries[1].q_w0_r1 == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(rep.entries[1].interval.lower == 0.0);
  CHECK(rep.entries[1].interval.upper == doctest::Approx(0.4125).epsilon(1e-12));
  CHECK(rep.entries[1].interval.contains(0.3));
}

TEST_CASE("shared bound intersects the per-stratum intervals") {
  ObservedLaw law = forward_observed_law(fixtures::mar_shared());
  BoundReport rep = bound_mar_shared(law);
  const BoundEntry& entry = rep.single();
  CHECK(entry.q_w0_r1 == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(entry.interval.lower == doctest::Approx(0.402 / 0.82).epsilon(1e-12));
  CHECK(entry.interval.upper == 1.0);
  CHECK(entry.interval.contains(0.9));
}

TEST_CASE("degenerate stratification: all three bounds agree exactly") {
  ObservedLaw law = fixture_law();  // covariate axis of cardinality 1
  BoundReport a = bound_mcar(law);
  BoundReport b = bound_mar_stratified(law);
  BoundReport c = bound_mar_shared(law);
  CHECK(a.single().interval.lower == b.entries.front().interval.lower);
  CHECK(a.single().interval.lower == c.single().interval.lower);
  CHECK(a.single().interval.upper == b.entries.front().interval.upper);
  CHECK(a.single().q_w0_r1 == b.entries.front().q_w0_r1);
  CHECK(a.single().q_w0_r1 == c.single().q_w0_r1);
}

TEST_CASE("shared interval is contained in each per-stratum interval") {
  Rng rng(555);
  for (int trial = 0; trial < 200; ++trial) {
    Dgp dgp = sample_dgp(DgpModel::MarShared, rng.next_u64());
    ObservedLaw law = forward_observed_law(dgp);
    BoundReport shared = bound_mar_shared(law);
    BoundReport strat = bound_mar_stratified(law);
    if (shared.single().interval.no_inflation) continue;
    for (const auto& entry : strat.entries) {
      CHECK(shared.single().interval.lower >= entry.interval.lower - 1e-12);
      CHECK(shared.single().interval.upper <= entry.interval.upper + 1e-12);
    }
  }
}

TEST_CASE("per-indicator reduction: product blocks reduce to the margin bound") {
  // independent blocks: the k=1 interval equals the plain bound on block 1's margin
  Dgp dgp = fixtures::block_parallel();
  auto& b = std::get<BlockParallelParams>(dgp.params);
  b.t2_one = {0.35, 0.35};   // T2 independent of T1
  b.r1_zero = {0.3, 0.3};    // R1 independent of T2
  b.r2_zero = {0.45, 0.45};  // R2 independent of T1
  ObservedLaw law = forward_observed_law(dgp);
  BoundReport per_k = bound_mnar_per_indicator(law, 1);
  CHECK_FALSE(per_k.sharp);
  CHECK_FALSE(per_k.single().interval.sharp);

  Dgp alone = fixtures::mcar();
  auto& s = std::get<ScalarDgpParams>(alone.params);
  s.p_true = {{1.0 - 0.4, 0.4}};  // block 1 marginal: p(T1=1)=0.4
  s.p_r0 = {0.3};
  s.channel = {b.ch1};
  BoundReport margin = bound_mcar(forward_observed_law(alone));
  CHECK(per_k.single().q_w0_r1 == doctest::Approx(margin.single().q_w0_r1).epsilon(1e-12));
  CHECK(per_k.single().interval.lower ==
        doctest::Approx(margin.single().interval.lower).epsilon(1e-12));
  CHECK(per_k.single().interval.upper ==
        doctest::Approx(margin.single().interval.upper).epsilon(1e-12));
}

TEST_CASE("block-parallel fixture: true channels inside the per-indicator intervals") {
  ObservedLaw law = forward_observed_law(fixtures::block_parallel());
  for (int k = 1; k <= 2; ++k) {
    BoundReport rep = bound_mnar_per_indicator(law, k);
    CHECK(rep.single().interval.contains(fixtures::block_parallel().true_q_w0_r0(k), 1e-12));
  }
}

TEST_CASE("known p(R=0) identifies the channel") {
  ObservedLaw law = fixture_law();
  ProxyChannel ch = channel_from_r0_prob(law, 0.3);
  CHECK(ch.factor(1).w0_given_r0 == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(ch.factor(1).w0_given_r1 == doctest::Approx(0.2).epsilon(1e-12));

  try {
    channel_from_r0_prob(law, 0.05);  // implied q = 3.8
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IncompatibleR0);
  }

  // p(R=0) = 0.65 lands exactly on the interval's lower endpoint
  ProxyChannel at_lb = channel_from_r0_prob(law, 0.65);
  CHECK(at_lb.factor(1).w0_given_r0 == doctest::Approx(0.31 / 0.65).epsilon(1e-12));
}

TEST_CASE("channel interval maps to the p(R=0) interval [0.225, 0.65]") {
  ObservedLaw law = fixture_law();
  BoundReport rep = bound_mcar(law);
  BoundInterval r0 = r0_bounds_from_channel_bounds(law, rep.single().interval);
  CHECK(r0.lower == doctest::Approx(0.225).epsilon(1e-9));
  CHECK(r0.upper == doctest::Approx(0.65).epsilon(1e-9));
  CHECK(r0.contains(0.3));
  // each endpoint agrees with the p(R=0) read off a restoration at that channel value
  for (double q : {rep.single().interval.lower, rep.single().interval.upper}) {
    ZiLaw zi = restore_mcar(law, ProxyChannel::shared({ChannelFactor{q, 0.2}}));
    CHECK(r0_from_channel(law, q) == doctest::Approx(zi.p_r0()).epsilon(1e-12));
  }
}

TEST_CASE("no-inflation interval maps to the single point {0}") {
  ObservedLaw uniform = build_observed_law(
      ProbTable({CategoricalSpace::proxy(1), CategoricalSpace::recorded(1, 2)},
                {0.25, 0.25, 0.25, 0.25}));
  BoundInterval iv = bound_mcar(uniform).single().interval;
  BoundInterval r0 = r0_bounds_from_channel_bounds(uniform, iv);
  CHECK(r0.lower == 0.0);
  CHECK(r0.upper == 0.0);
}

TEST_CASE("Moebius relation round trip at feasible channel values") {
  ObservedLaw law = fixture_law();
  BoundInterval iv = bound_mcar(law).single().interval;
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    double q = iv.lower + t * (iv.upper - iv.lower);
    double p_r0 = r0_from_channel(law, q);
    if (!(p_r0 > 0.0 && p_r0 < 1.0)) continue;
    ProxyChannel ch = channel_from_r0_prob(law, p_r0);
    CHECK(ch.factor(1).w0_given_r0 == doctest::Approx(q).epsilon(1e-12));
  }
}

TEST_CASE("grid oracle brackets the analytic interval on the fixture") {
  ObservedLaw law = fixture_law();
  auto oracle = grid_feasibility_oracle(law, ModelTag::Mcar, 100000);
  REQUIRE(oracle.size() == 1);
  BoundInterval analytic = bound_mcar(law).single().interval;
  CHECK(std::abs(oracle.front().hull.lower - analytic.lower) <= 1.0 / 100000);
  CHECK(std::abs(oracle.front().hull.upper - analytic.upper) <= 1.0 / 100000);
}

TEST_CASE("grid oracle on the uniform law is feasible away from the excluded point") {
  ObservedLaw uniform = build_observed_law(
      ProbTable({CategoricalSpace::proxy(1), CategoricalSpace::recorded(1, 2)},
                {0.25, 0.25, 0.25, 0.25}));
  auto oracle = grid_feasibility_oracle(uniform, ModelTag::Mcar, 1000);
  REQUIRE(oracle.size() == 1);
  CHECK(oracle.front().hull.lower == 0.0);
  CHECK(oracle.front().hull.upper == 1.0);
  CHECK(oracle.front().n_feasible == 1000);  // all 1001 grid points except q = 0.5
}

TEST_CASE("grid oracle agrees with analytic endpoints over random processes") {
  Rng rng(808);
  const int grid_n = 2000;
  for (int trial = 0; trial < 25; ++trial) {
    for (DgpModel model :
         {DgpModel::Mcar, DgpModel::MarStratified, DgpModel::MarShared}) {
      Dgp dgp = sample_dgp(model, rng.next_u64());
      ObservedLaw law = forward_observed_law(dgp);
      BoundReport analytic = bound_for_model(law, model_tag_for(model), {});
      auto oracle = grid_feasibility_oracle(law, model_tag_for(model), grid_n);
      REQUIRE(oracle.size() == analytic.entries.size());
      for (std::size_t i = 0; i < oracle.size(); ++i) {
        const BoundInterval& a = analytic.entries[i].interval;
        const BoundInterval& h = oracle[i].hull;
        if (a.no_inflation) continue;
        CHECK(std::abs(h.lower - a.lower) <= 1.5 / grid_n);
        CHECK(std::abs(h.upper - a.upper) <= 1.5 / grid_n);
      }
    }
  }
}
