#include "zinfer/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "zinfer/parallel.hpp"
#include "zinfer/restore.hpp"
#include "zinfer/rng.hpp"

namespace zinfer {

std::string_view dgp_model_name(DgpModel model) {
  switch (model) {
    case DgpModel::Mcar: return "mcar";
    case DgpModel::MarStratified: return "mar-stratified";
    case DgpModel::MarShared: return "mar-shared";
    case DgpModel::BlockParallel: return "block-parallel";
  }
  return "?";
}

DgpModel dgp_model_from_string(std::string_view name) {
  if (name == "mcar") return DgpModel::Mcar;
  if (name == "mar-stratified" || name == "mar_stratified") return DgpModel::MarStratified;
  if (name == "mar-shared" || name == "mar_shared") return DgpModel::MarShared;
  if (name == "block-parallel" || name == "block_parallel" || name == "mnar")
    return DgpModel::BlockParallel;
  fail(ErrorCode::ParseError, "unknown DGP model '" + std::string(name) + "'");
}

ModelTag model_tag_for(DgpModel model) {
  switch (model) {
    case DgpModel::Mcar: return ModelTag::Mcar;
    case DgpModel::MarStratified: return ModelTag::MarStratified;
    case DgpModel::MarShared: return ModelTag::MarShared;
    case DgpModel::BlockParallel: return ModelTag::Mnar;
  }
  return ModelTag::Mcar;
}

const ScalarDgpParams& Dgp::scalar() const {
  if (const auto* p = std::get_if<ScalarDgpParams>(&params)) return *p;
  fail(ErrorCode::ShapeMismatch, "not a single-indicator process");
}

const BlockParallelParams& Dgp::block() const {
  if (const auto* p = std::get_if<BlockParallelParams>(&params)) return *p;
  fail(ErrorCode::ShapeMismatch, "not a block-parallel process");
}

ProxyChannel Dgp::channel() const {
  if (model == DgpModel::BlockParallel) {
    const auto& b = block();
    return ProxyChannel::shared({b.ch1, b.ch2});
  }
  const auto& s = scalar();
  if (model == DgpModel::MarStratified) return ProxyChannel::stratified({s.channel});
  return ProxyChannel::shared({s.channel.front()});
}

double Dgp::true_q_w0_r0(int k, int c) const {
  if (model == DgpModel::BlockParallel)
    return (k == 1 ? block().ch1 : block().ch2).w0_given_r0;
  const auto& s = scalar();
  return s.channel[s.channel.size() == 1 ? 0 : static_cast<std::size_t>(c)].w0_given_r0;
}

double Dgp::true_q_w0_r1(int k, int c) const {
  if (model == DgpModel::BlockParallel)
    return (k == 1 ? block().ch1 : block().ch2).w0_given_r1;
  const auto& s = scalar();
  return s.channel[s.channel.size() == 1 ? 0 : static_cast<std::size_t>(c)].w0_given_r1;
}

namespace {

// Near-flat channels make the de-mixing inverse amplify double rounding by
// 1/|det|; a floor of 1e-3 keeps every harness tolerance (1e-12 round trips,
// the -1e-9 restoration clamp) satisfiable with two orders of margin.
constexpr double kDetFloor = 1e-3;

ChannelFactor draw_channel(Rng& rng, int& redraws) {
  for (;;) {
    ChannelFactor f{rng.uniform(), rng.uniform()};
    if (std::abs(f.det()) > kDetFloor) return f;
    ++redraws;
  }
}

}  // namespace

Dgp sample_dgp(DgpModel model, std::uint64_t seed) {
  Rng rng(seed);
  Dgp dgp;
  dgp.model = model;
  dgp.seed = seed;
  switch (model) {
    case DgpModel::Mcar: {
      ScalarDgpParams p;
      p.p_c = {1.0};
      double t0 = rng.uniform();
      p.p_true = {{t0, 1.0 - t0}};
      p.p_r0 = {rng.uniform()};
      p.channel = {draw_channel(rng, dgp.channel_redraws)};
      dgp.params = std::move(p);
      break;
    }
    case DgpModel::MarStratified:
    case DgpModel::MarShared: {
      ScalarDgpParams p;
      double c0 = rng.uniform();
      p.p_c = {c0, 1.0 - c0};
      for (int c = 0; c < 2; ++c) {
        double t0 = rng.uniform();
        p.p_true.push_back({t0, 1.0 - t0});
        p.p_r0.push_back(rng.uniform());
      }
      if (model == DgpModel::MarStratified) {
        p.channel = {draw_channel(rng, dgp.channel_redraws),
                     draw_channel(rng, dgp.channel_redraws)};
      } else {
        p.channel = {draw_channel(rng, dgp.channel_redraws)};
      }
      dgp.params = std::move(p);
      break;
    }
    case DgpModel::BlockParallel: {
      BlockParallelParams b;
      b.t1_one = rng.uniform();
      b.t2_one = {rng.uniform(), rng.uniform()};
      b.r1_zero = {rng.uniform(), rng.uniform()};
      b.r2_zero = {rng.uniform(), rng.uniform()};
      b.ch1 = draw_channel(rng, dgp.channel_redraws);
      b.ch2 = draw_channel(rng, dgp.channel_redraws);
      dgp.params = b;
      break;
    }
  }
  return dgp;
}

FullLaw forward_full_law(const Dgp& dgp) {
  if (dgp.model == DgpModel::BlockParallel) {
    const auto& b = dgp.block();
    auto t1 = CategoricalSpace::true_value(1, 2);
    auto t2 = CategoricalSpace::true_value(2, 2);
    auto r1 = CategoricalSpace::indicator(1);
    auto r2 = CategoricalSpace::indicator(2);
    auto w1 = CategoricalSpace::proxy(1);
    auto w2 = CategoricalSpace::proxy(2);
    ProbTable p_t1({t1}, {1.0 - b.t1_one, b.t1_one});
    ProbTable p_t2({t2, t1}, {1.0 - b.t2_one[0], 1.0 - b.t2_one[1],  //
                              b.t2_one[0], b.t2_one[1]});
    ProbTable p_r1({r1, t2}, {b.r1_zero[0], b.r1_zero[1],  //
                              1.0 - b.r1_zero[0], 1.0 - b.r1_zero[1]});
    ProbTable p_r2({r2, t1}, {b.r2_zero[0], b.r2_zero[1],  //
                              1.0 - b.r2_zero[0], 1.0 - b.r2_zero[1]});
    ProbTable p_w1({w1, r1}, {b.ch1(0, 0), b.ch1(0, 1), b.ch1(1, 0), b.ch1(1, 1)});
    ProbTable p_w2({w2, r2}, {b.ch2(0, 0), b.ch2(0, 1), b.ch2(1, 0), b.ch2(1, 1)});
    ProbTable joint =
        p_t1.product(p_t2).product(p_r1).product(p_r2).product(p_w1).product(p_w2);
    return FullLaw::build(std::move(joint));
  }

  const auto& s = dgp.scalar();
  int m = s.n_strata();
  int x_card = s.x_card();
  auto c_ax = CategoricalSpace::covariate(m);
  auto t_ax = CategoricalSpace::true_value(1, x_card);
  auto r_ax = CategoricalSpace::indicator(1);
  auto w_ax = CategoricalSpace::proxy(1);

  ProbTable p_c({c_ax}, s.p_c);
  ProbTable p_t = ProbTable::zeros({t_ax, c_ax});
  for (int x = 0; x < x_card; ++x)
    for (int c = 0; c < m; ++c)
      p_t.at({x, c}) = s.p_true[static_cast<std::size_t>(c)][static_cast<std::size_t>(x)];
  ProbTable p_r = ProbTable::zeros({r_ax, c_ax});
  for (int c = 0; c < m; ++c) {
    p_r.at({0, c}) = s.p_r0[static_cast<std::size_t>(c)];
    p_r.at({1, c}) = 1.0 - s.p_r0[static_cast<std::size_t>(c)];
  }
  ProbTable joint = p_c.product(p_t).product(p_r);
  if (s.channel.size() == 1) {
    const ChannelFactor& f = s.channel.front();
    ProbTable p_w({w_ax, r_ax}, {f(0, 0), f(0, 1), f(1, 0), f(1, 1)});
    joint = joint.product(p_w);
  } else {
    ProbTable p_w = ProbTable::zeros({w_ax, r_ax, c_ax});
    for (int c = 0; c < m; ++c) {
      const ChannelFactor& f = s.channel[static_cast<std::size_t>(c)];
      for (int w = 0; w < 2; ++w)
        for (int r = 0; r < 2; ++r) p_w.at({w, r, c}) = f(w, r);
    }
    joint = joint.product(p_w);
  }
  return FullLaw::build(std::move(joint));
}

ZiLaw forward_zi_law(const Dgp& dgp) { return forward_full_law(dgp).to_zi_law(); }

ObservedLaw forward_observed_law(const Dgp& dgp) { return forward_zi_law(dgp).observed(); }

std::vector<double> forward_target_law(const Dgp& dgp) {
  return forward_full_law(dgp).target_law();
}

ProbTable forward_observed_xc(const Dgp& dgp) {
  ObservedLaw law = forward_observed_law(dgp);
  std::vector<std::string> keep;
  for (const auto& a : law.table().axes())
    if (a.kind == VarKind::Recorded || a.kind == VarKind::Covariate) keep.push_back(a.name);
  return law.table().marginal(keep);
}

void RecordSet::validate() const {
  for (const auto& row : rows)
    if (row.x < 0 || row.x >= x_card || row.w < 0 || row.w >= w_card || row.c < 0 ||
        row.c >= c_card)
      fail(ErrorCode::ParseError, "record value outside its declared space");
}

RecordSet sample_dataset(const Dgp& dgp, long n, std::uint64_t seed) {
  if (n < 1) fail(ErrorCode::EmptyData, "need at least one record");
  if (dgp.model == DgpModel::BlockParallel)
    fail(ErrorCode::ShapeMismatch, "records carry one (x, w, c) triple per row");
  ObservedLaw law = forward_observed_law(dgp);
  const ProbTable& t = law.table();  // axes (X1, W1, C)

  std::vector<double> cdf(t.entries().begin(), t.entries().end());
  for (std::size_t i = 1; i < cdf.size(); ++i) cdf[i] += cdf[i - 1];

  RecordSet out;
  out.x_card = law.x_card(1);
  out.w_card = 2;
  out.c_card = law.c_card();
  out.provenance = "seed:" + std::to_string(seed);
  out.rows.reserve(static_cast<std::size_t>(n));
  Rng rng(seed);
  std::vector<int> idx(3);
  for (long i = 0; i < n; ++i) {
    double u = rng.uniform();
    std::size_t cell =
        static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (cell >= cdf.size()) cell = cdf.size() - 1;
    t.unravel(cell, idx);
    out.rows.push_back({idx[0], idx[1], idx[2]});
  }
  return out;
}

Dgp nonid_pair(const Dgp& dgp, double m) {
  if (dgp.model != DgpModel::Mcar)
    fail(ErrorCode::ShapeMismatch, "construction applies to the covariate-free model");
  const auto& s = dgp.scalar();
  if (s.x_card() != 2)
    fail(ErrorCode::ShapeMismatch, "construction stated for binary true values");
  double t1 = s.p_true[0][1];
  double r1 = 1.0 - s.p_r0[0];
  if (!(m > 0.0 && m <= 1.0) || m + kStructuralTol < std::max(t1, r1))
    fail(ErrorCode::InvalidM,
         "m must satisfy max{p(T=1), p(R=1)} <= m <= 1 to keep the scaled process valid");
  Dgp out = dgp;
  ScalarDgpParams p = s;
  double t1_new = std::min(1.0, t1 / m);
  p.p_true[0] = {1.0 - t1_new, t1_new};
  p.p_r0[0] = 1.0 - m * r1;
  out.params = std::move(p);
  return out;
}

namespace fixtures {

Dgp mcar() {
  Dgp dgp;
  dgp.model = DgpModel::Mcar;
  ScalarDgpParams p;
  p.p_c = {1.0};
  p.p_true = {{0.5, 0.5}};
  p.p_r0 = {0.3};
  p.channel = {ChannelFactor{0.8, 0.2}};
  dgp.params = std::move(p);
  return dgp;
}

Dgp mar_stratified() {
  Dgp dgp;
  dgp.model = DgpModel::MarStratified;
  ScalarDgpParams p;
  p.p_c = {0.5, 0.5};
  p.p_true = {{0.6, 0.4}, {0.6, 0.4}};
  p.p_r0 = {0.2, 0.5};
  p.channel = {ChannelFactor{0.9, 0.1}, ChannelFactor{0.3, 0.6}};
  dgp.params = std::move(p);
  return dgp;
}

Dgp mar_shared() {
  Dgp dgp;
  dgp.model = DgpModel::MarShared;
  ScalarDgpParams p;
  p.p_c = {0.5, 0.5};
  p.p_true = {{0.4, 0.6}, {0.7, 0.3}};
  p.p_r0 = {0.2, 0.4};
  p.channel = {ChannelFactor{0.9, 0.1}};
  dgp.params = std::move(p);
  return dgp;
}

Dgp block_parallel() {
  Dgp dgp;
  dgp.model = DgpModel::BlockParallel;
  BlockParallelParams b;
  b.t1_one = 0.4;
  b.t2_one = {0.3, 0.7};
  b.r1_zero = {0.25, 0.45};
  b.r2_zero = {0.2, 0.5};
  b.ch1 = ChannelFactor{0.85, 0.15};
  b.ch2 = ChannelFactor{0.7, 0.25};
  dgp.params = b;
  return dgp;
}

}  // namespace fixtures

namespace {

struct DgpChecker {
  const HarnessOptions& options;
  double worst_id = 0.0, worst_falsify = 0.0, worst_roundtrip = 0.0;
  long passes = 0, redraws = 0;
  std::vector<HarnessFailure> failures;

  explicit DgpChecker(const HarnessOptions& opts) : options(opts) {}

  void note_failure(std::uint64_t seed, const std::string& check, double value) {
    if (failures.size() < 32) failures.push_back({seed, check, value});
  }

  // true iff every check passes for this DGP
  bool run(std::uint64_t dgp_seed) {
    Dgp dgp = sample_dgp(options.model, dgp_seed);
    redraws += dgp.channel_redraws;
    bool ok = true;
    try {
      ObservedLaw law = forward_observed_law(dgp);
      ZiLaw zi_truth = forward_zi_law(dgp);

      // observed-law constraints hold at floating-point precision
      FalsificationReport fr = falsify(law, model_tag_for(options.model), 1e-12);
      worst_falsify = std::max(worst_falsify, fr.max_residual());
      if (!fr.pass) {
        note_failure(dgp_seed, "falsification", fr.max_residual());
        ok = false;
      }

      // restoration round trip at the true channel
      ZiLaw restored = restore_general(law, dgp.channel());
      double rt = restored.table().max_abs_diff(zi_truth.table());
      worst_roundtrip = std::max(worst_roundtrip, rt);
      if (rt > 1e-12) {
        note_failure(dgp_seed, "roundtrip", rt);
        ok = false;
      }

      if (options.model == DgpModel::BlockParallel) {
        ok = check_block(dgp, law) && ok;
      } else {
        ok = check_scalar(dgp, law) && ok;
      }
    } catch (const Error& e) {
      note_failure(dgp_seed, std::string("exception: ") + e.what(), 0.0);
      ok = false;
    }
    if (ok) ++passes;
    return ok;
  }

  bool check_identity(std::uint64_t seed, double estimate, double truth) {
    double residual = std::abs(estimate - truth);
    worst_id = std::max(worst_id, residual);
    if (residual > 1e-12) {
      note_failure(seed, "identification", residual);
      return false;
    }
    return true;
  }

  bool check_containment(std::uint64_t seed, const BoundInterval& interval, double truth) {
    if (!interval.contains(truth, 1e-12)) {
      note_failure(seed, "containment", truth);
      return false;
    }
    return true;
  }

  // restoration validity across the interval interior (and closed endpoints)
  bool check_grid(std::uint64_t seed, const ObservedLaw& law, const BoundEntry& entry,
                  const ProxyChannel& true_channel, int stratum_for_entry) {
    const BoundInterval& iv = entry.interval;
    if (iv.no_inflation) return true;  // point-identified no-inflation case
    for (int i = 0; i < options.grid_n; ++i) {
      double t = options.grid_n == 1 ? 0.5
                                     : static_cast<double>(i) / (options.grid_n - 1);
      double q = iv.lower + t * (iv.upper - iv.lower);
      if (iv.lower_open || iv.upper_open) q = std::clamp(q, iv.lower + 1e-12, iv.upper - 1e-12);
      if (iv.excluded_point && std::abs(q - *iv.excluded_point) < 1e-9) continue;
      try {
        ProxyChannel candidate = grid_channel(law, entry, q, true_channel, stratum_for_entry);
        ZiLaw restored = restore_general(law, candidate);
        (void)restored;
      } catch (const Error& e) {
        note_failure(seed, std::string("grid-restore(q=") + std::to_string(q) + "): " + e.what(),
                     q);
        return false;
      }
    }
    return true;
  }

  // Candidate channel placing stratum `c` of a stratified model at q while
  // other strata sit at their true values; shared models use a single factor.
  ProxyChannel grid_channel(const ObservedLaw& law, const BoundEntry& entry, double q,
                            const ProxyChannel& true_channel, int stratum) {
    if (options.model == DgpModel::MarStratified) {
      std::vector<ChannelFactor> per_c;
      for (int c = 0; c < law.c_card(); ++c) {
        ChannelFactor f = true_channel.factor(1, c);
        if (c == stratum) f.w0_given_r0 = q;
        f.w0_given_r1 = point_identify_w0_given_r1_stratum(law, c);
        per_c.push_back(f);
      }
      return ProxyChannel::stratified({per_c});
    }
    return ProxyChannel::shared({ChannelFactor{q, entry.q_w0_r1}});
  }

  bool check_scalar(const Dgp& dgp, const ObservedLaw& law) {
    BoundOptions bopts;
    bopts.tol = 1e-9;
    bool ok = true;
    switch (options.model) {
      case DgpModel::Mcar: {
        BoundReport rep = bound_mcar(law, bopts);
        ok = check_identity(dgp.seed, rep.single().q_w0_r1, dgp.true_q_w0_r1()) && ok;
        ok = check_containment(dgp.seed, rep.single().interval, dgp.true_q_w0_r0()) && ok;
        ok = check_grid(dgp.seed, law, rep.single(), dgp.channel(), -1) && ok;
        break;
      }
      case DgpModel::MarShared: {
        BoundReport rep = bound_mar_shared(law, bopts);
        ok = check_identity(dgp.seed, rep.single().q_w0_r1, dgp.true_q_w0_r1()) && ok;
        ok = check_containment(dgp.seed, rep.single().interval, dgp.true_q_w0_r0()) && ok;
        ok = check_grid(dgp.seed, law, rep.single(), dgp.channel(), -1) && ok;
        break;
      }
      case DgpModel::MarStratified: {
        BoundReport rep = bound_mar_stratified(law, bopts);
        for (const auto& entry : rep.entries) {
          ok = check_identity(dgp.seed, entry.q_w0_r1,
                              dgp.true_q_w0_r1(1, entry.stratum)) &&
               ok;
          ok = check_containment(dgp.seed, entry.interval,
                                 dgp.true_q_w0_r0(1, entry.stratum)) &&
               ok;
          ok = check_grid(dgp.seed, law, entry, dgp.channel(), entry.stratum) && ok;
        }
        break;
      }
      case DgpModel::BlockParallel:
        break;
    }
    return ok;
  }

  bool check_block(const Dgp& dgp, const ObservedLaw& law) {
    BoundOptions bopts;
    bopts.tol = 1e-9;
    bool ok = true;
    for (int k = 1; k <= 2; ++k) {
      BoundReport rep = bound_mnar_per_indicator(law, k, bopts);
      ok = check_identity(dgp.seed, rep.single().q_w0_r1, dgp.true_q_w0_r1(k)) && ok;
      ok = check_containment(dgp.seed, rep.single().interval, dgp.true_q_w0_r0(k)) && ok;
    }
    return ok;
  }
};

}  // namespace

HarnessReport validate_bounds_harness(const HarnessOptions& options) {
  if (options.n_dgps < 1) fail(ErrorCode::EmptyData, "need at least one process");
  HarnessReport report;
  report.model = options.model;
  report.n_dgps = options.n_dgps;
  report.grid_n = options.grid_n;
  report.seed = options.seed;

  std::size_t n = static_cast<std::size_t>(options.n_dgps);
  std::size_t n_chunks = parallel_chunk_count(n);
  std::vector<DgpChecker> checkers(n_chunks, DgpChecker(options));
  parallel_chunks(n, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
    DgpChecker& checker = checkers[chunk];
    for (std::size_t i = begin; i < end; ++i)
      checker.run(Rng::substream(options.seed, i));
  });
  for (const auto& c : checkers) {
    report.n_pass += c.passes;
    report.redraws += c.redraws;
    report.worst_id_residual = std::max(report.worst_id_residual, c.worst_id);
    report.worst_falsify_residual = std::max(report.worst_falsify_residual, c.worst_falsify);
    report.worst_roundtrip_residual =
        std::max(report.worst_roundtrip_residual, c.worst_roundtrip);
    for (const auto& f : c.failures)
      if (report.failures.size() < 32) report.failures.push_back(f);
  }
  return report;
}

}  // namespace zinfer
