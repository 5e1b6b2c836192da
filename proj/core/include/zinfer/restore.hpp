#pragma once

#include <array>
#include <vector>

#include "zinfer/laws.hpp"

namespace zinfer {

// Restored entries in [-kRestoreTol, 0) are treated as floating-point
// cancellation and clamped to 0; anything below is evidence the supplied
// channel is incompatible with the observed law.
inline constexpr double kRestoreTol = 1e-9;

// Analytic inverse of a 2x2 column-stochastic channel:
//   (1/det) [ 1-q(w0|r1)   -q(w0|r1) ]
//           [ q(w0|r0)-1    q(w0|r0) ]
// with det = q(w0|r0) - q(w0|r1).
struct FactorInverse {
  double det = 1.0;
  std::array<std::array<double, 2>, 2> inv{{{1.0, 0.0}, {0.0, 1.0}}};
};

struct ChannelInverse {
  ProxyChannel::Mode mode = ProxyChannel::Mode::Shared;
  std::vector<std::vector<FactorInverse>> factors;  // [k][c]; shared keeps one column
  const FactorInverse& factor(int k) const { return factors[static_cast<std::size_t>(k - 1)].front(); }
  const FactorInverse& factor(int k, int c) const {
    const auto& col = factors[static_cast<std::size_t>(k - 1)];
    return mode == ProxyChannel::Mode::Shared ? col.front() : col[static_cast<std::size_t>(c)];
  }
};

FactorInverse invert_factor(const ChannelFactor& factor);
ChannelInverse invert_channel(const ProxyChannel& channel);

// Single-indicator restoration without covariates:
//   p(r,x,w) = p(w|r) [ inv(p(W|R)) p(WX) ]_{r,x}
ZiLaw restore_mcar(const ObservedLaw& law, const ProxyChannel& channel);

// General restoration. Shared mode applies the tensor-product inverse to
// p(X,W,C) stratum by stratum with one channel; stratified mode uses the
// per-stratum factors. The output passes the ZI-law validity checks or the
// operation fails with IncompatibleChannel.
ZiLaw restore_general(const ObservedLaw& law, const ProxyChannel& channel);

}  // namespace zinfer
