#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "zinfer/bounds.hpp"
#include "zinfer/laws.hpp"

namespace zinfer {

enum class DgpModel { Mcar, MarStratified, MarShared, BlockParallel };
std::string_view dgp_model_name(DgpModel model);
DgpModel dgp_model_from_string(std::string_view name);
ModelTag model_tag_for(DgpModel model);

// Parameters of a single-indicator process: p(C), p(T|C), p(R=0|C) and the
// proxy channel (one factor, or one per stratum).
struct ScalarDgpParams {
  std::vector<double> p_c;                          // p(C = c)
  std::vector<std::vector<double>> p_true;          // [c][x]  p(T = x | c)
  std::vector<double> p_r0;                         // [c]     p(R = 0 | c)
  std::vector<ChannelFactor> channel;               // size 1, or one per stratum
  int n_strata() const { return static_cast<int>(p_c.size()); }
  int x_card() const { return static_cast<int>(p_true.front().size()); }
};

// Two zero-inflated variables censoring each other's block.
struct BlockParallelParams {
  double t1_one = 0.5;                 // p(T1 = 1)
  std::array<double, 2> t2_one{};      // p(T2 = 1 | T1 = t)
  std::array<double, 2> r1_zero{};     // p(R1 = 0 | T2 = t)
  std::array<double, 2> r2_zero{};     // p(R2 = 0 | T1 = t)
  ChannelFactor ch1, ch2;
};

struct Dgp {
  DgpModel model = DgpModel::Mcar;
  std::variant<ScalarDgpParams, BlockParallelParams> params;
  std::uint64_t seed = 0;
  int channel_redraws = 0;

  const ScalarDgpParams& scalar() const;
  const BlockParallelParams& block() const;
  ProxyChannel channel() const;
  // the DGP's q(W_k=0 | R_k=0), per stratum where the channel is stratified
  double true_q_w0_r0(int k = 1, int c = 0) const;
  double true_q_w0_r1(int k = 1, int c = 0) const;
};

// All free parameters drawn independently uniform on [0, 1]; channels with
// |det| <= 1e-9 are redrawn (the count is recorded on the Dgp).
Dgp sample_dgp(DgpModel model, std::uint64_t seed);

// Exact forward marginalizations of the factored joint.
FullLaw forward_full_law(const Dgp& dgp);
ZiLaw forward_zi_law(const Dgp& dgp);
ObservedLaw forward_observed_law(const Dgp& dgp);
std::vector<double> forward_target_law(const Dgp& dgp);
// Observed law of the proxy-free problem, p(X, C); the object the
// non-identifiability construction preserves.
ProbTable forward_observed_xc(const Dgp& dgp);

// Raw records of (x, w, c).
struct RecordSet {
  struct Row {
    int x = 0, w = 0, c = 0;
  };
  std::vector<Row> rows;
  int x_card = 2;
  int w_card = 2;
  int c_card = 1;
  std::string provenance = "external";
  void validate() const;  // values within the declared spaces
};

RecordSet sample_dataset(const Dgp& dgp, long n, std::uint64_t seed);

// Second process with the same p(X, C) but a different target law:
// p2(T=1) = p1(T=1)/m and p2(R=1) = m p1(R=1).
Dgp nonid_pair(const Dgp& dgp, double m);

namespace fixtures {
Dgp mcar();            // p(R=0)=0.3, p(T=1)=0.5, channel (0.8, 0.2)
Dgp mar_stratified();  // per-stratum channels (0.9,0.1) and (0.3,0.6)
Dgp mar_shared();      // shared channel (0.9, 0.1)
Dgp block_parallel();
}  // namespace fixtures

// Per-DGP validation: identification residual, bound containment, interior
// restorations, observed-law constraints, and the restoration round trip.
struct HarnessOptions {
  DgpModel model = DgpModel::Mcar;
  long n_dgps = 10000;
  int grid_n = 101;  // interior restoration points per interval
  std::uint64_t seed = 1;
};

struct HarnessFailure {
  std::uint64_t dgp_seed = 0;
  std::string check;
  double value = 0.0;
};

struct HarnessReport {
  DgpModel model = DgpModel::Mcar;
  long n_dgps = 0;
  int grid_n = 0;
  std::uint64_t seed = 0;
  long n_pass = 0;
  long redraws = 0;
  double worst_id_residual = 0.0;
  double worst_falsify_residual = 0.0;
  double worst_roundtrip_residual = 0.0;
  std::vector<HarnessFailure> failures;  // capped at 32 entries
  bool all_pass() const { return n_pass == n_dgps; }
};

HarnessReport validate_bounds_harness(const HarnessOptions& options);

}  // namespace zinfer
