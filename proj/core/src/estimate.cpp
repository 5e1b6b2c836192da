#include "zinfer/estimate.hpp"

#include <algorithm>
#include <cmath>

#include "zinfer/rng.hpp"

namespace zinfer {

ObservedLaw mle_counting(const RecordSet& data, double alpha) {
  if (data.rows.empty()) fail(ErrorCode::EmptyData, "record set is empty");
  data.validate();
  ProbTable counts = ProbTable::zeros({CategoricalSpace::recorded(1, data.x_card),
                                       CategoricalSpace::proxy(1),
                                       CategoricalSpace::covariate(data.c_card)});
  auto& entries = counts.mutable_entries();
  for (auto& e : entries) e = alpha;
  for (const auto& row : data.rows) counts.at({row.x, row.w, row.c}) += 1.0;
  double total = counts.sum();
  for (auto& e : entries) e /= total;
  return ObservedLaw::build(std::move(counts));
}

namespace {

// sufficient statistics: counts over the (x, w, c) cells
struct CellCounts {
  int x_card = 2, c_card = 1;
  std::vector<double> n;  // [x][w][c] flattened
  double total = 0.0;
  double& at(int x, int w, int c) {
    return n[static_cast<std::size_t>((x * 2 + w) * c_card + c)];
  }
  double at(int x, int w, int c) const {
    return n[static_cast<std::size_t>((x * 2 + w) * c_card + c)];
  }
};

CellCounts collapse_rows(const RecordSet& data) {
  CellCounts counts;
  counts.x_card = data.x_card;
  counts.c_card = data.c_card;
  counts.n.assign(static_cast<std::size_t>(data.x_card * 2 * data.c_card), 0.0);
  for (const auto& row : data.rows) {
    counts.at(row.x, row.w, row.c) += 1.0;
    counts.total += 1.0;
  }
  return counts;
}

struct EmState {
  ScalarDgpParams params;
  bool stratified_channel = false;

  const ChannelFactor& factor(int c) const {
    return params.channel[stratified_channel ? static_cast<std::size_t>(c) : 0];
  }

  double cell_prob(int x, int w, int c) const {
    const ChannelFactor& f = factor(c);
    double pc = params.p_c[static_cast<std::size_t>(c)];
    double r0 = params.p_r0[static_cast<std::size_t>(c)];
    double px = params.p_true[static_cast<std::size_t>(c)][static_cast<std::size_t>(x)];
    double p = (1.0 - r0) * px * f(w, 1);
    if (x == 0) p += r0 * f(w, 0);
    return pc * p;
  }

  double loglik(const CellCounts& counts) const {
    double ll = 0.0;
    for (int x = 0; x < counts.x_card; ++x)
      for (int w = 0; w < 2; ++w)
        for (int c = 0; c < counts.c_card; ++c) {
          double n = counts.at(x, w, c);
          if (n == 0.0) continue;
          ll += n * std::log(std::max(cell_prob(x, w, c), 1e-300));
        }
    return ll;
  }
};

EmState random_init(const CellCounts& counts, bool stratified_channel, Rng& rng) {
  EmState state;
  state.stratified_channel = stratified_channel;
  auto& p = state.params;
  int m = counts.c_card;
  // p(C) from the data (complete); everything else uniform random
  p.p_c.assign(static_cast<std::size_t>(m), 0.0);
  for (int x = 0; x < counts.x_card; ++x)
    for (int w = 0; w < 2; ++w)
      for (int c = 0; c < m; ++c) p.p_c[static_cast<std::size_t>(c)] += counts.at(x, w, c);
  for (auto& v : p.p_c) v /= counts.total;

  for (int c = 0; c < m; ++c) {
    std::vector<double> t(static_cast<std::size_t>(counts.x_card));
    double sum = 0.0;
    for (auto& v : t) {
      v = 0.05 + rng.uniform();
      sum += v;
    }
    for (auto& v : t) v /= sum;
    p.p_true.push_back(std::move(t));
    p.p_r0.push_back(rng.uniform());
  }
  int n_factors = stratified_channel ? m : 1;
  for (int i = 0; i < n_factors; ++i) {
    ChannelFactor f{rng.uniform(), rng.uniform()};
    while (std::abs(f.det()) <= 0.05) f = ChannelFactor{rng.uniform(), rng.uniform()};
    p.channel.push_back(f);
  }
  return state;
}

// One E+M sweep over the cell counts; closed-form weighted-count updates.
void em_step(EmState& state, const CellCounts& counts) {
  int m = counts.c_card;
  int x_card = counts.x_card;
  auto& p = state.params;

  // E-step: gamma(w, c) = P(R=0 | X=0, w, c); zero for x != 0 rows
  std::vector<double> gamma(static_cast<std::size_t>(2 * m), 0.0);
  for (int w = 0; w < 2; ++w)
    for (int c = 0; c < m; ++c) {
      const ChannelFactor& f = state.factor(c);
      double r0 = p.p_r0[static_cast<std::size_t>(c)];
      double a = r0 * f(w, 0);
      double b = (1.0 - r0) * p.p_true[static_cast<std::size_t>(c)][0] * f(w, 1);
      gamma[static_cast<std::size_t>(w * m + c)] = a + b > 0.0 ? a / (a + b) : 0.0;
    }

  // M-step
  std::vector<std::vector<double>> t_new;
  std::vector<double> r0_new;
  int n_factors = state.stratified_channel ? m : 1;
  std::vector<double> ch_r0_w0(static_cast<std::size_t>(n_factors), 0.0);
  std::vector<double> ch_r0_tot(static_cast<std::size_t>(n_factors), 0.0);
  std::vector<double> ch_r1_w0(static_cast<std::size_t>(n_factors), 0.0);
  std::vector<double> ch_r1_tot(static_cast<std::size_t>(n_factors), 0.0);

  for (int c = 0; c < m; ++c) {
    double n_c = 0.0, weight_r0 = 0.0;
    std::vector<double> t(static_cast<std::size_t>(x_card), 0.0);
    int fi = state.stratified_channel ? c : 0;
    for (int w = 0; w < 2; ++w) {
      double g = gamma[static_cast<std::size_t>(w * m + c)];
      for (int x = 0; x < x_card; ++x) {
        double n = counts.at(x, w, c);
        n_c += n;
        double r0_weight = x == 0 ? n * g : 0.0;
        double r1_weight = n - r0_weight;
        weight_r0 += r0_weight;
        t[static_cast<std::size_t>(x)] += r1_weight;
        if (w == 0) {
          ch_r0_w0[static_cast<std::size_t>(fi)] += r0_weight;
          ch_r1_w0[static_cast<std::size_t>(fi)] += r1_weight;
        }
        ch_r0_tot[static_cast<std::size_t>(fi)] += r0_weight;
        ch_r1_tot[static_cast<std::size_t>(fi)] += r1_weight;
      }
    }
    double r1_mass = n_c - weight_r0;
    if (r1_mass > 0.0)
      for (auto& v : t) v /= r1_mass;
    else
      t = p.p_true[static_cast<std::size_t>(c)];  // no information; keep
    t_new.push_back(std::move(t));
    r0_new.push_back(n_c > 0.0 ? weight_r0 / n_c : 0.0);
  }
  p.p_true = std::move(t_new);
  p.p_r0 = std::move(r0_new);
  for (int i = 0; i < n_factors; ++i) {
    if (ch_r0_tot[static_cast<std::size_t>(i)] > 0.0)
      p.channel[static_cast<std::size_t>(i)].w0_given_r0 =
          ch_r0_w0[static_cast<std::size_t>(i)] / ch_r0_tot[static_cast<std::size_t>(i)];
    if (ch_r1_tot[static_cast<std::size_t>(i)] > 0.0)
      p.channel[static_cast<std::size_t>(i)].w0_given_r1 =
          ch_r1_w0[static_cast<std::size_t>(i)] / ch_r1_tot[static_cast<std::size_t>(i)];
  }
}

}  // namespace

ObservedLaw EmFit::fitted_observed_law() const { return forward_observed_law(params); }

EmFit em_fit(const RecordSet& data, ModelTag model, const EmConfig& config) {
  if (data.rows.empty()) fail(ErrorCode::EmptyData, "record set is empty");
  data.validate();
  if (model == ModelTag::Mnar)
    fail(ErrorCode::ShapeMismatch, "records carry a single indicator");
  bool stratified_channel = model == ModelTag::MarStratified;
  if (model == ModelTag::Mcar && data.c_card != 1)
    fail(ErrorCode::ShapeMismatch, "covariate-free model, but records carry strata");
  CellCounts counts = collapse_rows(data);

  EmFit best;
  best.model = model;
  bool have_best = false;
  for (int restart = 0; restart < config.n_restarts; ++restart) {
    Rng rng(Rng::substream(config.seed, static_cast<std::uint64_t>(restart)));
    EmState state = random_init(counts, stratified_channel, rng);
    std::vector<double> trace{state.loglik(counts)};
    bool converged = false;
    int iter = 0;
    while (iter < config.max_iter) {
      ++iter;
      em_step(state, counts);
      trace.push_back(state.loglik(counts));
      double delta = trace[trace.size() - 1] - trace[trace.size() - 2];
      if (std::abs(delta) < config.tol) {
        converged = true;
        break;
      }
    }

    // restarts that collapsed onto a flat channel carry no usable fit
    bool degenerate = false;
    double max_r0 = *std::max_element(state.params.p_r0.begin(), state.params.p_r0.end());
    for (const auto& f : state.params.channel)
      if (std::abs(f.det()) <= kStructuralTol && max_r0 > 1e-8) degenerate = true;
    if (degenerate) continue;

    if (!have_best || trace.back() > best.loglik_trace.back()) {
      best.params.model =
          model == ModelTag::Mcar
              ? DgpModel::Mcar
              : (stratified_channel ? DgpModel::MarStratified : DgpModel::MarShared);
      best.params.params = state.params;
      best.params.seed = config.seed;
      best.loglik_trace = std::move(trace);
      best.iterations = iter;
      best.converged = converged;
      have_best = true;
    }
    best.n_restarts_used = restart + 1;
  }
  if (!have_best)
    fail(ErrorCode::DegenerateInit, "every restart collapsed to a flat channel");
  return best;
}

}  // namespace zinfer
