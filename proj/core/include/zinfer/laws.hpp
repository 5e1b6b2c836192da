#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zinfer/prob_table.hpp"

namespace zinfer {

// One binary proxy-indicator conditional, column-stochastic by construction:
// q(W=1|R=r) = 1 - q(W=0|R=r). Invertibility (the A2-type condition) is
// equivalent to w0_given_r0 != w0_given_r1.
struct ChannelFactor {
  double w0_given_r0 = 1.0;
  double w0_given_r1 = 0.0;
  double det() const { return w0_given_r0 - w0_given_r1; }
  double operator()(int w, int r) const {
    double w0 = r == 0 ? w0_given_r0 : w0_given_r1;
    return w == 0 ? w0 : 1.0 - w0;
  }
};

// The proxy-indicator conditional p(W | R) (shared across covariate strata)
// or p(W | R, C) (one factor per stratum). This is the sensitivity parameter
// of the whole pipeline.
class ProxyChannel {
 public:
  enum class Mode { Shared, Stratified };

  // factors[k] for indicators k = 0..n-1
  static ProxyChannel shared(std::vector<ChannelFactor> factors);
  // factors[k][c] for indicator k, stratum c
  static ProxyChannel stratified(std::vector<std::vector<ChannelFactor>> factors);

  Mode mode() const { return mode_; }
  int n_indicators() const { return static_cast<int>(factors_.size()); }
  int n_strata() const;

  // shared access (stratum ignored when shared)
  const ChannelFactor& factor(int k) const;
  const ChannelFactor& factor(int k, int c) const;

 private:
  ProxyChannel(Mode mode, std::vector<std::vector<ChannelFactor>> factors);
  Mode mode_;
  std::vector<std::vector<ChannelFactor>> factors_;  // [k][c]; shared keeps one column
};

// Validates a factor: probabilities in [0,1] and |det| > kStructuralTol.
void validate_factor(const ChannelFactor& factor, const std::string& where);

// Tensor product of the per-indicator 2x2 channels of a shared-mode channel,
// as a conditional table over (W1..Wn, R1..Rn). Guarded at n <= 12.
ProbTable kronecker_channel(const ProxyChannel& channel);
ProbTable kronecker_channel(const ProxyChannel& channel, const std::vector<int>& order);

// ---------------------------------------------------------------------------
// Laws. All laws canonicalize their axes and always carry a covariate axis
// "C" (cardinality 1 when the input had none); multiple covariate axes are
// flattened into that single axis, first-listed axis slowest.
// ---------------------------------------------------------------------------

// The directly estimable joint p(X1..Xn, W1..Wn, C).
class ObservedLaw {
 public:
  static ObservedLaw build(ProbTable table);

  const ProbTable& table() const { return table_; }
  int n_indicators() const { return n_; }
  int x_card(int k) const;
  int c_card() const;
  // p(x_1..x_n, c) > 0 for every cell
  bool positivity() const { return positivity_; }
  double min_xc_mass() const { return min_xc_mass_; }

  // marginal over (Xk, Wk, C) with the covariate axis last
  ProbTable margin_xwc(int k) const;

 private:
  ObservedLaw(ProbTable table, int n, bool positivity, double min_mass)
      : table_(std::move(table)), n_(n), positivity_(positivity), min_xc_mass_(min_mass) {}
  ProbTable table_;
  int n_;
  bool positivity_;
  double min_xc_mass_;
};

// The joint p(R1..Rn, X1..Xn, W1..Wn, C). Carries the structural footprint of
// zero-inflation consistency: no mass on {R_k = 0, X_k != 0}.
class ZiLaw {
 public:
  static ZiLaw build(ProbTable table);

  const ProbTable& table() const { return table_; }
  int n_indicators() const { return n_; }
  bool has_proxies() const { return has_w_; }
  int c_card() const;

  // marginal probability of R_k = 0
  double p_r0(int k = 1) const;
  // q(R_k = 0 | C = c)
  double p_r0_given_c(int c, int k = 1) const;
  ObservedLaw observed() const;  // marginalize out the R axes

 private:
  ZiLaw(ProbTable table, int n, bool has_w)
      : table_(std::move(table)), n_(n), has_w_(has_w) {}
  ProbTable table_;
  int n_;
  bool has_w_;
};

// The identified joint p(T1..Tn, R1..Rn, W1..Wn, C), where T_k is the true
// (uncensored) value of X_k.
class FullLaw {
 public:
  static FullLaw build(ProbTable table);

  const ProbTable& table() const { return table_; }
  int n_indicators() const { return n_; }

  // p(T1 = x), the target law (single-indicator shorthand)
  std::vector<double> target_law() const;
  // the ZI law implied by zero-inflation consistency
  ZiLaw to_zi_law() const;

 private:
  FullLaw(ProbTable table, int n, bool has_w)
      : table_(std::move(table)), n_(n), has_w_(has_w) {}
  ProbTable table_;
  int n_;
  bool has_w_;
};

// Free-function spellings of the builders.
inline ObservedLaw build_observed_law(ProbTable table) { return ObservedLaw::build(std::move(table)); }
inline ZiLaw build_zi_law(ProbTable table) { return ZiLaw::build(std::move(table)); }

}  // namespace zinfer
