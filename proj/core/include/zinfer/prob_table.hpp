#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zinfer/error.hpp"

namespace zinfer {

// Absolute tolerances used throughout. Structural facts (normalization of
// stored tables, the zero-inflation restriction) are held to 1e-12;
// user-supplied input is accepted up to 1e-9 and renormalized.
inline constexpr double kStructuralTol = 1e-12;
inline constexpr double kInputTol = 1e-9;

// Role a variable plays in the zero-inflation setup.
//   TrueValue   - the underlying (possibly censored) value, X(1)
//   Indicator   - binary observability indicator R; R=0 means an imposed zero
//   Recorded    - the recorded value X (equals TrueValue when R=1, else 0)
//   Proxy       - binary proxy W of an indicator
//   Covariate   - fully observed covariate C
enum class VarKind { TrueValue, Indicator, Recorded, Proxy, Covariate };

std::string_view var_kind_name(VarKind kind);

// One categorical axis. Values are the integers 0..cardinality-1, with the
// "zero" slot always at index 0.
struct CategoricalSpace {
  std::string name;
  VarKind kind = VarKind::Covariate;
  int cardinality = 2;

  static CategoricalSpace true_value(int k, int cardinality);
  static CategoricalSpace indicator(int k);
  static CategoricalSpace recorded(int k, int cardinality);
  static CategoricalSpace proxy(int k);
  static CategoricalSpace covariate(int cardinality, const std::string& name = "C");

  bool operator==(const CategoricalSpace& other) const {
    return name == other.name && kind == other.kind && cardinality == other.cardinality;
  }
};

// Dense nonnegative table over a product of categorical axes. Row-major with
// the last axis fastest. Joint tables sum to 1; conditional factors are plain
// nonnegative tables (each conditioning slice sums to 1, checked by callers).
class ProbTable {
 public:
  ProbTable() = default;
  ProbTable(std::vector<CategoricalSpace> axes, std::vector<double> entries);

  static ProbTable zeros(std::vector<CategoricalSpace> axes);
  static ProbTable scalar(double value);  // rank-0 table

  int rank() const { return static_cast<int>(axes_.size()); }
  const std::vector<CategoricalSpace>& axes() const { return axes_; }
  const CategoricalSpace& axis(int i) const { return axes_.at(static_cast<std::size_t>(i)); }
  std::size_t size() const { return entries_.size(); }
  const std::vector<double>& entries() const { return entries_; }
  std::vector<double>& mutable_entries() { return entries_; }

  bool has_axis(std::string_view name) const;
  // Index of the named axis; throws AxisMismatch when absent.
  int axis_index(std::string_view name) const;

  double at(std::span<const int> idx) const { return entries_[offset(idx)]; }
  double& at(std::span<const int> idx) { return entries_[offset(idx)]; }
  double at(std::initializer_list<int> idx) const {
    return at(std::span<const int>(idx.begin(), idx.size()));
  }
  double& at(std::initializer_list<int> idx) {
    return entries_[offset(std::span<const int>(idx.begin(), idx.size()))];
  }

  std::size_t offset(std::span<const int> idx) const;
  void unravel(std::size_t offset, std::span<int> idx_out) const;

  double sum() const;
  double min() const;

  // Sum out the named axes.
  ProbTable sum_out(const std::vector<std::string>& names) const;
  // Marginal over exactly the named axes, in the given order.
  ProbTable marginal(const std::vector<std::string>& names) const;
  // Fix one axis at a value and drop it.
  ProbTable slice(std::string_view name, int value) const;
  // Reorder axes to the given complete name list.
  ProbTable permuted(const std::vector<std::string>& names) const;

  // Factor product: axes are matched by name; the result carries this
  // table's axes followed by the other's remaining axes.
  ProbTable product(const ProbTable& other) const;

  // p(target | given): divides the (target, given) marginal by the given
  // marginal. Slices with zero mass are left at zero.
  ProbTable conditional(const std::vector<std::string>& target,
                        const std::vector<std::string>& given) const;

  ProbTable normalized() const;
  void scale(double factor);

  double max_abs_diff(const ProbTable& other) const;

  void for_each(const std::function<void(std::span<const int>, double)>& fn) const;

 private:
  std::vector<CategoricalSpace> axes_;
  std::vector<std::size_t> strides_;
  std::vector<double> entries_;

  void compute_strides();
};

// Validates and normalizes a user-supplied joint table: entries finite and
// >= -kInputTol (NegativeEntry otherwise, tiny negatives clamped), total
// within kInputTol of 1 (NotNormalized otherwise), then rescaled to sum to 1.
ProbTable validate_joint(ProbTable table);

}  // namespace zinfer
