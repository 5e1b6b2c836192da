#include <doctest.h>

#include <cmath>

#include "zinfer/restore.hpp"
#include "zinfer/rng.hpp"
#include "zinfer/simulate.hpp"

using namespace zinfer;

TEST_CASE("sample_dgp is deterministic given its seed") {
  for (DgpModel model : {DgpModel::Mcar, DgpModel::MarShared, DgpModel::MarStratified,
                         DgpModel::BlockParallel}) {
    Dgp a = sample_dgp(model, 12345);
    Dgp b = sample_dgp(model, 12345);
    ObservedLaw la = forward_observed_law(a);
    ObservedLaw lb = forward_observed_law(b);
    CHECK(la.table().max_abs_diff(lb.table()) == 0.0);
  }
}

TEST_CASE("sampled parameters look uniform and channels respect the guard") {
  const int n = 10000;
  double mean_c0 = 0.0;
  for (int i = 0; i < n; ++i) {
    Dgp dgp = sample_dgp(DgpModel::MarShared, Rng::substream(7, static_cast<std::uint64_t>(i)));
    const auto& s = dgp.scalar();
    mean_c0 += s.p_c[0];
    CHECK(std::abs(s.channel.front().det()) > 1e-9);
  }
  mean_c0 /= n;
  // 3 sigma of a U[0,1] mean at n = 1e4 is ~0.0087
  CHECK(mean_c0 > 0.49);
  CHECK(mean_c0 < 0.51);
}

TEST_CASE("forward law of the fixture equals the hand-derived four-term sums") {
  ObservedLaw law = forward_observed_law(fixtures::mcar());
  CHECK(law.table().at({0, 0, 0}) == doctest::Approx(0.31).epsilon(1e-14));
  CHECK(law.table().at({1, 0, 0}) == doctest::Approx(0.07).epsilon(1e-14));
  CHECK(law.table().at({0, 1, 0}) == doctest::Approx(0.34).epsilon(1e-14));
  CHECK(law.table().at({1, 1, 0}) == doctest::Approx(0.28).epsilon(1e-14));
}

TEST_CASE("no inflation: observed law factorizes as p(T) x p(W|R=1)") {
  Dgp dgp = fixtures::mcar();
  std::get<ScalarDgpParams>(dgp.params).p_r0 = {0.0};
  ObservedLaw law = forward_observed_law(dgp);
  for (int x = 0; x < 2; ++x)
    for (int w = 0; w < 2; ++w)
      CHECK(law.table().at({x, w, 0}) ==
            doctest::Approx(0.5 * (w == 0 ? 0.2 : 0.8)).epsilon(1e-14));
}

TEST_CASE("forward marginalization chains commute") {
  Rng rng(99);
  for (DgpModel model : {DgpModel::Mcar, DgpModel::MarShared, DgpModel::MarStratified,
                         DgpModel::BlockParallel}) {
    Dgp dgp = sample_dgp(model, rng.next_u64());
    FullLaw full = forward_full_law(dgp);
    ZiLaw zi = forward_zi_law(dgp);
    CHECK(std::abs(full.table().sum() - 1.0) < kStructuralTol);
    CHECK(zi.table().max_abs_diff(full.to_zi_law().table()) < kStructuralTol);
    ObservedLaw from_zi = zi.observed();
    ObservedLaw direct = forward_observed_law(dgp);
    CHECK(from_zi.table().max_abs_diff(direct.table()) < kStructuralTol);
  }
}

TEST_CASE("restoration round trip holds across models") {
  Rng rng(424242);
  for (DgpModel model : {DgpModel::Mcar, DgpModel::MarShared, DgpModel::MarStratified,
                         DgpModel::BlockParallel}) {
    for (int trial = 0; trial < 50; ++trial) {
      Dgp dgp = sample_dgp(model, rng.next_u64());
      ObservedLaw law = forward_observed_law(dgp);
      ZiLaw restored = restore_general(law, dgp.channel());
      CHECK(restored.table().max_abs_diff(forward_zi_law(dgp).table()) < 1e-12);
    }
  }
}

TEST_CASE("sample_dataset is deterministic and near the population cells") {
  Dgp dgp = fixtures::mcar();
  RecordSet a = sample_dataset(dgp, 100000, 5);
  RecordSet b = sample_dataset(dgp, 100000, 5);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); i += 997) {
    CHECK(a.rows[i].x == b.rows[i].x);
    CHECK(a.rows[i].w == b.rows[i].w);
  }
  long n_w0x1 = 0;
  for (const auto& row : a.rows)
    if (row.x == 1 && row.w == 0) ++n_w0x1;
  double p_hat = static_cast<double>(n_w0x1) / static_cast<double>(a.rows.size());
  double se = std::sqrt(0.07 * 0.93 / 100000.0);
  CHECK(std::abs(p_hat - 0.07) < 3.0 * se);

  RecordSet single = sample_dataset(dgp, 1, 11);
  CHECK(single.rows.size() == 1);
  CHECK_NOTHROW(single.validate());
}

TEST_CASE("nonid pair: same p(X), different target law") {
  Dgp base = fixtures::mcar();

  Dgp same = nonid_pair(base, 1.0);
  CHECK(forward_observed_xc(same).max_abs_diff(forward_observed_xc(base)) < 1e-12);
  CHECK(std::abs(forward_target_law(same)[1] - forward_target_law(base)[1]) < 1e-12);

  Dgp scaled = nonid_pair(base, 0.9);
  CHECK(forward_observed_xc(scaled).max_abs_diff(forward_observed_xc(base)) < 1e-12);
  double gap = std::abs(forward_target_law(scaled)[1] - forward_target_law(base)[1]);
  CHECK(gap == doctest::Approx(0.5 / 0.9 - 0.5).epsilon(1e-9));
  CHECK(gap >= 0.05);

  try {
    nonid_pair(base, 0.4);  // below max{p(T=1), p(R=1)} = 0.7
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidM);
  }
}

TEST_CASE("harness smoke run: single fixture-seeded process passes") {
  HarnessOptions options;
  options.model = DgpModel::Mcar;
  options.n_dgps = 1;
  options.grid_n = 11;
  options.seed = 99;
  HarnessReport report = validate_bounds_harness(options);
  CHECK(report.n_pass == 1);
  CHECK(report.all_pass());
  CHECK(report.failures.empty());
}

TEST_CASE("harness is deterministic across runs") {
  HarnessOptions options;
  options.model = DgpModel::MarShared;
  options.n_dgps = 200;
  options.grid_n = 11;
  options.seed = 31337;
  HarnessReport a = validate_bounds_harness(options);
  HarnessReport b = validate_bounds_harness(options);
  CHECK(a.n_pass == b.n_pass);
  CHECK(a.redraws == b.redraws);
  CHECK(a.worst_id_residual == b.worst_id_residual);
  CHECK(a.worst_falsify_residual == b.worst_falsify_residual);
  CHECK(a.worst_roundtrip_residual == b.worst_roundtrip_residual);
}

TEST_CASE("harness: 500 processes per model all pass") {
  for (DgpModel model : {DgpModel::Mcar, DgpModel::MarStratified, DgpModel::MarShared,
                         DgpModel::BlockParallel}) {
    HarnessOptions options;
    options.model = model;
    options.n_dgps = 500;
    options.grid_n = 21;
    options.seed = 2718;
    HarnessReport report = validate_bounds_harness(options);
    INFO(dgp_model_name(model));
    if (!report.failures.empty()) {
      INFO(report.failures.front().check);
    }
    CHECK(report.all_pass());
    CHECK(report.worst_id_residual <= 1e-12);
    CHECK(report.worst_falsify_residual <= 1e-12);
    CHECK(report.worst_roundtrip_residual <= 1e-12);
  }
}
