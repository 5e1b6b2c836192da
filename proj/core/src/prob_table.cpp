#include "zinfer/prob_table.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace zinfer {

std::string_view var_kind_name(VarKind kind) {
  switch (kind) {
    case VarKind::TrueValue: return "true_value";
    case VarKind::Indicator: return "indicator";
    case VarKind::Recorded: return "recorded";
    case VarKind::Proxy: return "proxy";
    case VarKind::Covariate: return "covariate";
  }
  return "?";
}

CategoricalSpace CategoricalSpace::true_value(int k, int cardinality) {
  if (cardinality < 2)
    fail(ErrorCode::AxisMismatch, "zero-inflatable variable needs cardinality >= 2");
  return {"T" + std::to_string(k), VarKind::TrueValue, cardinality};
}

CategoricalSpace CategoricalSpace::indicator(int k) {
  return {"R" + std::to_string(k), VarKind::Indicator, 2};
}

CategoricalSpace CategoricalSpace::recorded(int k, int cardinality) {
  if (cardinality < 2)
    fail(ErrorCode::AxisMismatch, "zero-inflatable variable needs cardinality >= 2");
  return {"X" + std::to_string(k), VarKind::Recorded, cardinality};
}

CategoricalSpace CategoricalSpace::proxy(int k) {
  return {"W" + std::to_string(k), VarKind::Proxy, 2};
}

CategoricalSpace CategoricalSpace::covariate(int cardinality, const std::string& name) {
  if (cardinality < 1) fail(ErrorCode::AxisMismatch, "covariate needs cardinality >= 1");
  return {name, VarKind::Covariate, cardinality};
}

ProbTable::ProbTable(std::vector<CategoricalSpace> axes, std::vector<double> entries)
    : axes_(std::move(axes)), entries_(std::move(entries)) {
  compute_strides();
  std::size_t expected = 1;
  for (const auto& a : axes_) {
    if (a.cardinality < 1) fail(ErrorCode::AxisMismatch, "axis " + a.name + " has no values");
    expected *= static_cast<std::size_t>(a.cardinality);
  }
  if (entries_.size() != expected) {
    std::ostringstream msg;
    msg << "table has " << entries_.size() << " entries, axes imply " << expected;
    fail(ErrorCode::AxisMismatch, msg.str());
  }
  for (std::size_t i = 0; i < axes_.size(); ++i)
    for (std::size_t j = i + 1; j < axes_.size(); ++j)
      if (axes_[i].name == axes_[j].name)
        fail(ErrorCode::AxisMismatch, "duplicate axis name " + axes_[i].name);
}

ProbTable ProbTable::zeros(std::vector<CategoricalSpace> axes) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= static_cast<std::size_t>(a.cardinality);
  return ProbTable(std::move(axes), std::vector<double>(n, 0.0));
}

ProbTable ProbTable::scalar(double value) { return ProbTable({}, {value}); }

void ProbTable::compute_strides() {
  strides_.assign(axes_.size(), 1);
  for (int i = static_cast<int>(axes_.size()) - 2; i >= 0; --i)
    strides_[static_cast<std::size_t>(i)] =
        strides_[static_cast<std::size_t>(i) + 1] *
        static_cast<std::size_t>(axes_[static_cast<std::size_t>(i) + 1].cardinality);
}

bool ProbTable::has_axis(std::string_view name) const {
  for (const auto& a : axes_)
    if (a.name == name) return true;
  return false;
}

int ProbTable::axis_index(std::string_view name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (axes_[i].name == name) return static_cast<int>(i);
  fail(ErrorCode::AxisMismatch, "no axis named " + std::string(name));
}

std::size_t ProbTable::offset(std::span<const int> idx) const {
  if (idx.size() != axes_.size())
    fail(ErrorCode::AxisMismatch, "index rank does not match table rank");
  std::size_t off = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= axes_[i].cardinality)
      fail(ErrorCode::AxisMismatch, "index out of range on axis " + axes_[i].name);
    off += strides_[i] * static_cast<std::size_t>(idx[i]);
  }
  return off;
}

void ProbTable::unravel(std::size_t offset, std::span<int> idx_out) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    idx_out[i] = static_cast<int>(offset / strides_[i]);
    offset %= strides_[i];
  }
}

double ProbTable::sum() const { return std::accumulate(entries_.begin(), entries_.end(), 0.0); }

double ProbTable::min() const {
  return entries_.empty() ? 0.0 : *std::min_element(entries_.begin(), entries_.end());
}

ProbTable ProbTable::sum_out(const std::vector<std::string>& names) const {
  std::vector<std::string> keep;
  for (const auto& a : axes_)
    if (std::find(names.begin(), names.end(), a.name) == names.end()) keep.push_back(a.name);
  for (const auto& n : names) axis_index(n);  // all named axes must exist
  return marginal(keep);
}

ProbTable ProbTable::marginal(const std::vector<std::string>& names) const {
  std::vector<int> kept_axes;
  kept_axes.reserve(names.size());
  std::vector<CategoricalSpace> out_axes;
  for (const auto& n : names) {
    int i = axis_index(n);
    kept_axes.push_back(i);
    out_axes.push_back(axes_[static_cast<std::size_t>(i)]);
  }
  ProbTable out = ProbTable::zeros(std::move(out_axes));
  std::vector<int> idx(axes_.size());
  std::vector<int> out_idx(names.size());
  for (std::size_t off = 0; off < entries_.size(); ++off) {
    unravel(off, idx);
    for (std::size_t j = 0; j < kept_axes.size(); ++j)
      out_idx[j] = idx[static_cast<std::size_t>(kept_axes[j])];
    out.at(std::span<const int>(out_idx)) += entries_[off];
  }
  return out;
}

ProbTable ProbTable::slice(std::string_view name, int value) const {
  int ax = axis_index(name);
  if (value < 0 || value >= axes_[static_cast<std::size_t>(ax)].cardinality)
    fail(ErrorCode::AxisMismatch, "slice value out of range on axis " + std::string(name));
  std::vector<CategoricalSpace> out_axes;
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (static_cast<int>(i) != ax) out_axes.push_back(axes_[i]);
  ProbTable out = ProbTable::zeros(std::move(out_axes));
  std::vector<int> idx(axes_.size());
  std::vector<int> out_idx(axes_.size() - 1);
  for (std::size_t off = 0; off < entries_.size(); ++off) {
    unravel(off, idx);
    if (idx[static_cast<std::size_t>(ax)] != value) continue;
    std::size_t j = 0;
    for (std::size_t i = 0; i < axes_.size(); ++i)
      if (static_cast<int>(i) != ax) out_idx[j++] = idx[i];
    out.at(std::span<const int>(out_idx)) = entries_[off];
  }
  return out;
}

ProbTable ProbTable::permuted(const std::vector<std::string>& names) const {
  if (names.size() != axes_.size())
    fail(ErrorCode::AxisMismatch, "permutation must name every axis");
  return marginal(names);  // marginal with a full axis list is a pure permutation
}

ProbTable ProbTable::product(const ProbTable& other) const {
  std::vector<CategoricalSpace> out_axes = axes_;
  // map other-axis -> position in out_axes
  std::vector<int> other_pos(other.axes_.size(), -1);
  for (std::size_t i = 0; i < other.axes_.size(); ++i) {
    const auto& a = other.axes_[i];
    bool found = false;
    for (std::size_t j = 0; j < out_axes.size(); ++j) {
      if (out_axes[j].name == a.name) {
        if (!(out_axes[j] == a))
          fail(ErrorCode::AxisMismatch, "axis " + a.name + " differs between factors");
        other_pos[i] = static_cast<int>(j);
        found = true;
        break;
      }
    }
    if (!found) {
      other_pos[i] = static_cast<int>(out_axes.size());
      out_axes.push_back(a);
    }
  }
  ProbTable out = ProbTable::zeros(out_axes);
  std::vector<int> idx(out_axes.size());
  std::vector<int> lhs_idx(axes_.size());
  std::vector<int> rhs_idx(other.axes_.size());
  for (std::size_t off = 0; off < out.entries_.size(); ++off) {
    out.unravel(off, idx);
    for (std::size_t i = 0; i < axes_.size(); ++i) lhs_idx[i] = idx[i];
    for (std::size_t i = 0; i < other.axes_.size(); ++i)
      rhs_idx[i] = idx[static_cast<std::size_t>(other_pos[i])];
    out.entries_[off] = at(std::span<const int>(lhs_idx)) *
                        other.at(std::span<const int>(rhs_idx));
  }
  return out;
}

ProbTable ProbTable::conditional(const std::vector<std::string>& target,
                                 const std::vector<std::string>& given) const {
  std::vector<std::string> joint_names = target;
  joint_names.insert(joint_names.end(), given.begin(), given.end());
  ProbTable joint = marginal(joint_names);
  if (given.empty()) return joint.normalized();
  ProbTable denom = marginal(given);
  ProbTable out = joint;
  std::vector<int> idx(joint.axes_.size());
  std::vector<int> given_idx(given.size());
  for (std::size_t off = 0; off < out.entries_.size(); ++off) {
    out.unravel(off, idx);
    for (std::size_t i = 0; i < given.size(); ++i) given_idx[i] = idx[target.size() + i];
    double d = denom.at(std::span<const int>(given_idx));
    out.entries_[off] = d > 0.0 ? out.entries_[off] / d : 0.0;
  }
  return out;
}

ProbTable ProbTable::normalized() const {
  double total = sum();
  if (total <= 0.0) fail(ErrorCode::NotNormalized, "table has no mass to normalize");
  ProbTable out = *this;
  for (auto& e : out.entries_) e /= total;
  return out;
}

void ProbTable::scale(double factor) {
  for (auto& e : entries_) e *= factor;
}

double ProbTable::max_abs_diff(const ProbTable& other) const {
  if (axes() != other.axes()) {
    // allow permuted axis order
    std::vector<std::string> names;
    for (const auto& a : axes_) names.push_back(a.name);
    return max_abs_diff(other.permuted(names));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < entries_.size(); ++i)
    worst = std::max(worst, std::abs(entries_[i] - other.entries_[i]));
  return worst;
}

void ProbTable::for_each(const std::function<void(std::span<const int>, double)>& fn) const {
  std::vector<int> idx(axes_.size());
  for (std::size_t off = 0; off < entries_.size(); ++off) {
    unravel(off, idx);
    fn(std::span<const int>(idx), entries_[off]);
  }
}

ProbTable validate_joint(ProbTable table) {
  auto& entries = table.mutable_entries();
  std::vector<int> idx(table.axes().size());
  for (std::size_t off = 0; off < entries.size(); ++off) {
    double v = entries[off];
    if (!std::isfinite(v)) fail(ErrorCode::NegativeEntry, "non-finite entry");
    if (v < -kInputTol) {
      table.unravel(off, idx);
      std::ostringstream msg;
      msg << "entry " << v << " at (";
      for (std::size_t i = 0; i < idx.size(); ++i)
        msg << (i ? "," : "") << table.axes()[i].name << "=" << idx[i];
      msg << ")";
      fail(ErrorCode::NegativeEntry, msg.str());
    }
    if (v < 0.0) entries[off] = 0.0;
  }
  double total = table.sum();
  if (std::abs(total - 1.0) > kInputTol) {
    std::ostringstream msg;
    msg << "entries sum to " << total;
    fail(ErrorCode::NotNormalized, msg.str());
  }
  for (auto& e : entries) e /= total;
  return table;
}

}  // namespace zinfer
