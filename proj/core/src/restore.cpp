#include "zinfer/restore.hpp"

#include <cmath>
#include <sstream>

namespace zinfer {

FactorInverse invert_factor(const ChannelFactor& factor) {
  double det = factor.det();
  if (std::abs(det) <= kStructuralTol)
    fail(ErrorCode::SingularChannel, "q(W=0|R=0) = q(W=0|R=1)");
  FactorInverse out;
  out.det = det;
  out.inv[0][0] = (1.0 - factor.w0_given_r1) / det;
  out.inv[0][1] = -factor.w0_given_r1 / det;
  out.inv[1][0] = (factor.w0_given_r0 - 1.0) / det;
  out.inv[1][1] = factor.w0_given_r0 / det;
  return out;
}

ChannelInverse invert_channel(const ProxyChannel& channel) {
  ChannelInverse out;
  out.mode = channel.mode();
  int strata = channel.mode() == ProxyChannel::Mode::Shared ? 1 : channel.n_strata();
  out.factors.resize(static_cast<std::size_t>(channel.n_indicators()));
  for (int k = 1; k <= channel.n_indicators(); ++k) {
    auto& col = out.factors[static_cast<std::size_t>(k - 1)];
    col.reserve(static_cast<std::size_t>(strata));
    for (int c = 0; c < strata; ++c) col.push_back(invert_factor(channel.factor(k, c)));
  }
  return out;
}

namespace {

// Contract the W_k axis of `table` against the 2x2 inverse of its factor
// (chosen per covariate stratum), turning it into the R_k axis:
// out[r, ...] = sum_w inv[r][w] * in[w, ...].
ProbTable apply_inverse_along(const ProbTable& table, const std::string& w_name,
                              const CategoricalSpace& r_axis,
                              const std::vector<const FactorInverse*>& fi_by_stratum) {
  int ax = table.axis_index(w_name);
  std::vector<CategoricalSpace> axes = table.axes();
  axes[static_cast<std::size_t>(ax)] = r_axis;
  ProbTable out(axes, table.entries());
  int c_ax = out.axis_index("C");

  std::vector<int> idx(axes.size());
  auto& entries = out.mutable_entries();
  const auto& in = table.entries();
  for (std::size_t off = 0; off < entries.size(); ++off) {
    out.unravel(off, idx);
    if (idx[static_cast<std::size_t>(ax)] != 0) continue;  // handle both rows at once
    int c = idx[static_cast<std::size_t>(c_ax)];
    const FactorInverse& fi =
        *fi_by_stratum[fi_by_stratum.size() == 1 ? 0 : static_cast<std::size_t>(c)];
    std::vector<int> other = idx;
    other[static_cast<std::size_t>(ax)] = 1;
    std::size_t off1 = table.offset(std::span<const int>(other));
    double w0 = in[off];
    double w1 = in[off1];
    entries[off] = fi.inv[0][0] * w0 + fi.inv[0][1] * w1;
    entries[off1] = fi.inv[1][0] * w0 + fi.inv[1][1] * w1;
  }
  return out;
}

// Validate the de-mixed joint over (R..., X..., C): clamp cancellation noise,
// zero the structurally-required cells, reject anything worse.
void validate_demixed(ProbTable& q, int n, const char* context) {
  auto& entries = q.mutable_entries();
  std::vector<int> idx(q.axes().size());
  for (std::size_t off = 0; off < entries.size(); ++off) {
    double v = entries[off];
    if (v < 0.0) {
      if (v < -kRestoreTol) {
        q.unravel(off, idx);
        std::ostringstream msg;
        msg << context << ": restored entry " << v << " at (";
        for (std::size_t i = 0; i < idx.size(); ++i)
          msg << (i ? "," : "") << q.axes()[i].name << "=" << idx[i];
        msg << ")";
        fail(ErrorCode::IncompatibleChannel, msg.str());
      }
      entries[off] = 0.0;
      v = 0.0;
    }
    q.unravel(off, idx);
    for (int k = 0; k < n; ++k) {
      if (idx[static_cast<std::size_t>(k)] == 0 && idx[static_cast<std::size_t>(n + k)] != 0) {
        // zero-inflation restriction cell: must vanish
        if (v > kRestoreTol) {
          std::ostringstream msg;
          msg << context << ": mass " << v << " on (R" << k + 1 << "=0, X" << k + 1 << "="
              << idx[static_cast<std::size_t>(n + k)] << ", c=" << idx.back()
              << ") signals an incompatible channel";
          fail(ErrorCode::IncompatibleChannel, msg.str());
        }
        entries[off] = 0.0;
        break;
      }
    }
  }
  double total = q.sum();
  if (std::abs(total - 1.0) > kRestoreTol)
    fail(ErrorCode::IncompatibleChannel,
         std::string(context) + ": restored mass " + std::to_string(total));
  for (auto& e : entries) e /= total;
}

ZiLaw restore_impl(const ObservedLaw& law, const ProxyChannel& channel, const char* context) {
  int n = law.n_indicators();
  if (channel.n_indicators() != n)
    fail(ErrorCode::AxisMismatch, "channel has a factor count different from the law");
  if (channel.mode() == ProxyChannel::Mode::Stratified && channel.n_strata() != law.c_card())
    fail(ErrorCode::AxisMismatch, "stratified channel does not match the covariate axis");
  ChannelInverse inverse = invert_channel(channel);

  // de-mix: (X..., W..., C) -> (X..., R..., C)
  ProbTable mixed = law.table();
  int strata = channel.mode() == ProxyChannel::Mode::Stratified ? law.c_card() : 1;
  for (int k = 1; k <= n; ++k) {
    std::vector<const FactorInverse*> fi;
    for (int c = 0; c < strata; ++c) fi.push_back(&inverse.factor(k, c));
    mixed = apply_inverse_along(mixed, "W" + std::to_string(k),
                                CategoricalSpace::indicator(k), fi);
  }
  // canonical (R..., X..., C)
  std::vector<std::string> order;
  for (int k = 1; k <= n; ++k) order.push_back("R" + std::to_string(k));
  for (int k = 1; k <= n; ++k) order.push_back("X" + std::to_string(k));
  order.push_back("C");
  ProbTable q_rxc = mixed.permuted(order);
  validate_demixed(q_rxc, n, context);

  // re-attach the proxies: zi(r,x,w,c) = q(r,x,c) prod_k q(w_k | r_k [, c])
  std::vector<CategoricalSpace> zi_axes;
  for (int k = 0; k < 2 * n; ++k) zi_axes.push_back(q_rxc.axis(k));
  for (int k = 1; k <= n; ++k) zi_axes.push_back(CategoricalSpace::proxy(k));
  zi_axes.push_back(q_rxc.axes().back());
  ProbTable zi = ProbTable::zeros(std::move(zi_axes));
  auto& entries = zi.mutable_entries();
  std::vector<int> idx(zi.axes().size());
  std::vector<int> rxc_idx(q_rxc.axes().size());
  for (std::size_t off = 0; off < entries.size(); ++off) {
    zi.unravel(off, idx);
    for (int k = 0; k < 2 * n; ++k) rxc_idx[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(k)];
    rxc_idx.back() = idx.back();
    double mass = q_rxc.at(std::span<const int>(rxc_idx));
    if (mass == 0.0) continue;
    int c = idx.back();
    double value = mass;
    for (int k = 1; k <= n; ++k)
      value *= channel.factor(k, c)(idx[static_cast<std::size_t>(2 * n + k - 1)],
                                    idx[static_cast<std::size_t>(k - 1)]);
    entries[off] = value;
  }
  return ZiLaw::build(std::move(zi));
}

}  // namespace

ZiLaw restore_mcar(const ObservedLaw& law, const ProxyChannel& channel) {
  if (law.n_indicators() != 1)
    fail(ErrorCode::AxisMismatch, "single-indicator restoration requires one X/W pair");
  if (law.c_card() != 1)
    fail(ErrorCode::AxisMismatch, "law has covariates; use restore_general");
  if (channel.mode() != ProxyChannel::Mode::Shared)
    fail(ErrorCode::AxisMismatch, "single-indicator restoration uses a shared channel");
  return restore_impl(law, channel, "restore_mcar");
}

ZiLaw restore_general(const ObservedLaw& law, const ProxyChannel& channel) {
  return restore_impl(law, channel, "restore_general");
}

}  // namespace zinfer
