#include "zinfer/laws.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace zinfer {

namespace {

// trailing integer of an axis name ("X12" -> 12); 0 when absent
int name_index(const std::string& name) {
  std::size_t pos = name.size();
  while (pos > 0 && std::isdigit(static_cast<unsigned char>(name[pos - 1]))) --pos;
  if (pos == name.size()) return 0;
  return std::stoi(name.substr(pos));
}

struct AxisGroups {
  std::vector<CategoricalSpace> true_values;
  std::vector<CategoricalSpace> indicators;
  std::vector<CategoricalSpace> recorded;
  std::vector<CategoricalSpace> proxies;
  std::vector<CategoricalSpace> covariates;  // appearance order
};

AxisGroups group_axes(const ProbTable& table) {
  AxisGroups g;
  for (const auto& a : table.axes()) {
    switch (a.kind) {
      case VarKind::TrueValue: g.true_values.push_back(a); break;
      case VarKind::Indicator: g.indicators.push_back(a); break;
      case VarKind::Recorded: g.recorded.push_back(a); break;
      case VarKind::Proxy: g.proxies.push_back(a); break;
      case VarKind::Covariate: g.covariates.push_back(a); break;
    }
  }
  auto by_index = [](const CategoricalSpace& a, const CategoricalSpace& b) {
    return name_index(a.name) < name_index(b.name);
  };
  std::sort(g.true_values.begin(), g.true_values.end(), by_index);
  std::sort(g.indicators.begin(), g.indicators.end(), by_index);
  std::sort(g.recorded.begin(), g.recorded.end(), by_index);
  std::sort(g.proxies.begin(), g.proxies.end(), by_index);
  return g;
}

// Permute to the given leading axes followed by the covariates, then fuse all
// covariate axes into a single trailing "C" axis (first covariate slowest).
ProbTable canonicalize(const ProbTable& table, const std::vector<CategoricalSpace>& leading,
                       const std::vector<CategoricalSpace>& covariates) {
  std::vector<std::string> order;
  for (const auto& a : leading) order.push_back(a.name);
  for (const auto& a : covariates) order.push_back(a.name);
  ProbTable permuted = table.permuted(order);

  int c_card = 1;
  for (const auto& a : covariates) c_card *= a.cardinality;
  std::vector<CategoricalSpace> axes = leading;
  axes.push_back(CategoricalSpace::covariate(c_card));
  // trailing covariate axes are contiguous and row-major, so the flat data
  // already matches the fused layout
  return ProbTable(std::move(axes), permuted.entries());
}

void require_binary(const CategoricalSpace& axis) {
  if (axis.cardinality != 2)
    fail(ErrorCode::AxisMismatch, "axis " + axis.name + " must be binary");
}

void require_paired(const std::vector<CategoricalSpace>& lhs,
                    const std::vector<CategoricalSpace>& rhs, const char* what) {
  if (lhs.size() != rhs.size())
    fail(ErrorCode::AxisMismatch, std::string("unpaired ") + what + " axes");
  for (std::size_t k = 0; k < lhs.size(); ++k)
    if (name_index(lhs[k].name) != name_index(rhs[k].name))
      fail(ErrorCode::AxisMismatch, std::string("mismatched indices between ") + what + " axes");
}

std::string cell_string(const ProbTable& table, std::span<const int> idx) {
  std::ostringstream s;
  s << "(";
  for (std::size_t i = 0; i < idx.size(); ++i)
    s << (i ? "," : "") << table.axes()[i].name << "=" << idx[i];
  s << ")";
  return s.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// ProxyChannel
// ---------------------------------------------------------------------------

void validate_factor(const ChannelFactor& factor, const std::string& where) {
  if (!(factor.w0_given_r0 >= 0.0 && factor.w0_given_r0 <= 1.0 &&
        factor.w0_given_r1 >= 0.0 && factor.w0_given_r1 <= 1.0))
    fail(ErrorCode::SingularFactor, "channel entries outside [0,1] " + where);
  if (std::abs(factor.det()) <= kStructuralTol)
    fail(ErrorCode::SingularFactor, "q(W=0|R=0) = q(W=0|R=1) " + where);
}

ProxyChannel::ProxyChannel(Mode mode, std::vector<std::vector<ChannelFactor>> factors)
    : mode_(mode), factors_(std::move(factors)) {}

ProxyChannel ProxyChannel::shared(std::vector<ChannelFactor> factors) {
  if (factors.empty()) fail(ErrorCode::AxisMismatch, "channel needs at least one factor");
  std::vector<std::vector<ChannelFactor>> cols;
  cols.reserve(factors.size());
  for (std::size_t k = 0; k < factors.size(); ++k) {
    validate_factor(factors[k], "(indicator " + std::to_string(k + 1) + ")");
    cols.push_back({factors[k]});
  }
  return ProxyChannel(Mode::Shared, std::move(cols));
}

ProxyChannel ProxyChannel::stratified(std::vector<std::vector<ChannelFactor>> factors) {
  if (factors.empty() || factors.front().empty())
    fail(ErrorCode::AxisMismatch, "channel needs at least one factor");
  std::size_t strata = factors.front().size();
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (factors[k].size() != strata)
      fail(ErrorCode::AxisMismatch, "inconsistent stratum count across indicators");
    for (std::size_t c = 0; c < strata; ++c)
      validate_factor(factors[k][c], "(indicator " + std::to_string(k + 1) + ", stratum " +
                                         std::to_string(c) + ")");
  }
  return ProxyChannel(Mode::Stratified, std::move(factors));
}

int ProxyChannel::n_strata() const { return static_cast<int>(factors_.front().size()); }

const ChannelFactor& ProxyChannel::factor(int k) const {
  return factors_.at(static_cast<std::size_t>(k - 1)).front();
}

const ChannelFactor& ProxyChannel::factor(int k, int c) const {
  const auto& col = factors_.at(static_cast<std::size_t>(k - 1));
  if (mode_ == Mode::Shared) return col.front();
  return col.at(static_cast<std::size_t>(c));
}

ProbTable kronecker_channel(const ProxyChannel& channel) {
  std::vector<int> order(static_cast<std::size_t>(channel.n_indicators()));
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k) + 1;
  return kronecker_channel(channel, order);
}

ProbTable kronecker_channel(const ProxyChannel& channel, const std::vector<int>& order) {
  if (channel.mode() != ProxyChannel::Mode::Shared)
    fail(ErrorCode::AxisMismatch, "tensor-product channel requires shared mode");
  int n = static_cast<int>(order.size());
  if (n < 1 || n > 12) fail(ErrorCode::TooManyIndicators, "supported range is 1..12 indicators");

  std::vector<CategoricalSpace> axes;
  for (int k : order) axes.push_back(CategoricalSpace::proxy(k));
  for (int k : order) axes.push_back(CategoricalSpace::indicator(k));
  ProbTable out = ProbTable::zeros(std::move(axes));
  auto& entries = out.mutable_entries();
  std::size_t cells = entries.size();
  std::vector<int> idx(static_cast<std::size_t>(2 * n));
  for (std::size_t off = 0; off < cells; ++off) {
    out.unravel(off, idx);
    double value = 1.0;
    for (int j = 0; j < n; ++j)
      value *= channel.factor(order[static_cast<std::size_t>(j)])(idx[static_cast<std::size_t>(j)],
                                                                  idx[static_cast<std::size_t>(n + j)]);
    entries[off] = value;
  }
  return out;
}

// ---------------------------------------------------------------------------
// ObservedLaw
// ---------------------------------------------------------------------------

ObservedLaw ObservedLaw::build(ProbTable table) {
  table = validate_joint(std::move(table));
  AxisGroups g = group_axes(table);
  if (!g.true_values.empty() || !g.indicators.empty())
    fail(ErrorCode::AxisMismatch, "observed law cannot carry true-value or indicator axes");
  if (g.recorded.empty() || g.proxies.empty())
    fail(ErrorCode::AxisMismatch, "observed law needs at least one X axis and one W axis");
  require_paired(g.recorded, g.proxies, "X/W");
  for (const auto& w : g.proxies) require_binary(w);

  std::vector<CategoricalSpace> leading = g.recorded;
  leading.insert(leading.end(), g.proxies.begin(), g.proxies.end());
  ProbTable canonical = canonicalize(table, leading, g.covariates);

  // positivity over the joint (x_1..x_n, c) cells
  std::vector<std::string> xc_names;
  for (const auto& a : g.recorded) xc_names.push_back(a.name);
  xc_names.push_back("C");
  double min_mass = canonical.marginal(xc_names).min();

  return ObservedLaw(std::move(canonical), static_cast<int>(g.recorded.size()),
                     min_mass > 0.0, min_mass);
}

int ObservedLaw::x_card(int k) const {
  return table_.axis(k - 1).cardinality;
}

int ObservedLaw::c_card() const {
  return table_.axes().back().cardinality;
}

ProbTable ObservedLaw::margin_xwc(int k) const {
  return table_.marginal({table_.axis(k - 1).name, table_.axis(n_ + k - 1).name, "C"});
}

// ---------------------------------------------------------------------------
// ZiLaw
// ---------------------------------------------------------------------------

ZiLaw ZiLaw::build(ProbTable table) {
  table = validate_joint(std::move(table));
  AxisGroups g = group_axes(table);
  if (!g.true_values.empty())
    fail(ErrorCode::AxisMismatch, "ZI law cannot carry true-value axes");
  if (g.indicators.empty() || g.recorded.empty())
    fail(ErrorCode::AxisMismatch, "ZI law needs R and X axes");
  require_paired(g.indicators, g.recorded, "R/X");
  bool has_w = !g.proxies.empty();
  if (has_w) require_paired(g.indicators, g.proxies, "R/W");
  for (const auto& r : g.indicators) require_binary(r);
  for (const auto& w : g.proxies) require_binary(w);

  std::vector<CategoricalSpace> leading = g.indicators;
  leading.insert(leading.end(), g.recorded.begin(), g.recorded.end());
  leading.insert(leading.end(), g.proxies.begin(), g.proxies.end());
  ProbTable canonical = canonicalize(table, leading, g.covariates);

  // restriction on the ZI law: no mass on {R_k = 0, X_k != 0}
  int n = static_cast<int>(g.indicators.size());
  auto& entries = canonical.mutable_entries();
  std::vector<int> idx(canonical.axes().size());
  for (std::size_t off = 0; off < entries.size(); ++off) {
    if (entries[off] == 0.0) continue;
    canonical.unravel(off, idx);
    for (int k = 0; k < n; ++k) {
      if (idx[static_cast<std::size_t>(k)] == 0 && idx[static_cast<std::size_t>(n + k)] != 0) {
        if (entries[off] > kStructuralTol) {
          std::ostringstream msg;
          msg << "mass " << entries[off] << " on " << cell_string(canonical, idx);
          fail(ErrorCode::ZViolation, msg.str());
        }
        entries[off] = 0.0;
        break;
      }
    }
  }
  double total = canonical.sum();
  for (auto& e : entries) e /= total;

  return ZiLaw(std::move(canonical), n, has_w);
}

int ZiLaw::c_card() const { return table_.axes().back().cardinality; }

double ZiLaw::p_r0(int k) const {
  ProbTable m = table_.marginal({table_.axis(k - 1).name});
  return m.at({0});
}

double ZiLaw::p_r0_given_c(int c, int k) const {
  ProbTable m = table_.marginal({table_.axis(k - 1).name, "C"});
  double denom = m.at({0, c}) + m.at({1, c});
  if (denom <= 0.0)
    fail(ErrorCode::PositivityViolation, "no mass in stratum c=" + std::to_string(c));
  return m.at({0, c}) / denom;
}

ObservedLaw ZiLaw::observed() const {
  if (!has_w_)
    fail(ErrorCode::AxisMismatch, "ZI law has no proxy axes to observe");
  std::vector<std::string> drop;
  for (int k = 0; k < n_; ++k) drop.push_back(table_.axis(k).name);
  return ObservedLaw::build(table_.sum_out(drop));
}

// ---------------------------------------------------------------------------
// FullLaw
// ---------------------------------------------------------------------------

FullLaw FullLaw::build(ProbTable table) {
  table = validate_joint(std::move(table));
  AxisGroups g = group_axes(table);
  if (!g.recorded.empty())
    fail(ErrorCode::AxisMismatch, "full law carries true values, not recorded values");
  if (g.true_values.empty() || g.indicators.empty())
    fail(ErrorCode::AxisMismatch, "full law needs true-value and indicator axes");
  require_paired(g.true_values, g.indicators, "T/R");
  bool has_w = !g.proxies.empty();
  if (has_w) require_paired(g.true_values, g.proxies, "T/W");
  for (const auto& r : g.indicators) require_binary(r);
  for (const auto& w : g.proxies) require_binary(w);

  std::vector<CategoricalSpace> leading = g.true_values;
  leading.insert(leading.end(), g.indicators.begin(), g.indicators.end());
  leading.insert(leading.end(), g.proxies.begin(), g.proxies.end());
  ProbTable canonical = canonicalize(table, leading, g.covariates);

  FullLaw law(std::move(canonical), static_cast<int>(g.true_values.size()), has_w);
  law.to_zi_law();  // must marginalize to a valid ZI law
  return law;
}

std::vector<double> FullLaw::target_law() const {
  ProbTable m = table_.marginal({table_.axis(0).name});
  return m.entries();
}

ZiLaw FullLaw::to_zi_law() const {
  // zi(r, x, w, c) = sum_t full(t, r, w, c) [x_k = t_k if r_k = 1 else 0]
  std::vector<CategoricalSpace> axes;
  for (int k = 0; k < n_; ++k) axes.push_back(table_.axis(n_ + k));  // R axes
  for (int k = 0; k < n_; ++k) {
    const auto& t = table_.axis(k);
    axes.push_back(CategoricalSpace::recorded(name_index(t.name), t.cardinality));
  }
  std::size_t w_axes = has_w_ ? static_cast<std::size_t>(n_) : 0;
  for (std::size_t k = 0; k < w_axes; ++k)
    axes.push_back(table_.axis(2 * n_ + static_cast<int>(k)));
  axes.push_back(table_.axes().back());  // C

  ProbTable zi = ProbTable::zeros(std::move(axes));
  std::vector<int> src(table_.axes().size());
  std::vector<int> dst(zi.axes().size());
  const auto& entries = table_.entries();
  for (std::size_t off = 0; off < entries.size(); ++off) {
    if (entries[off] == 0.0) continue;
    table_.unravel(off, src);
    for (int k = 0; k < n_; ++k) {
      int r = src[static_cast<std::size_t>(n_ + k)];
      dst[static_cast<std::size_t>(k)] = r;
      dst[static_cast<std::size_t>(n_ + k)] = r == 1 ? src[static_cast<std::size_t>(k)] : 0;
    }
    for (std::size_t k = 0; k < w_axes; ++k)
      dst[2 * static_cast<std::size_t>(n_) + k] = src[2 * static_cast<std::size_t>(n_) + k];
    dst.back() = src.back();
    zi.at(std::span<const int>(dst)) += entries[off];
  }
  return ZiLaw::build(std::move(zi));
}

}  // namespace zinfer
