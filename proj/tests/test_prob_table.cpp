#include <doctest.h>

#include <cmath>
#include <vector>

#include "zinfer/prob_table.hpp"
#include "zinfer/rng.hpp"

using namespace zinfer;

namespace {

ProbTable random_joint(Rng& rng, std::vector<CategoricalSpace> axes) {
  ProbTable t = ProbTable::zeros(std::move(axes));
  double total = 0.0;
  for (auto& e : t.mutable_entries()) {
    e = rng.uniform();
    total += e;
  }
  for (auto& e : t.mutable_entries()) e /= total;
  return t;
}

}  // namespace

TEST_CASE("construction checks shapes and names") {
  auto x = CategoricalSpace::recorded(1, 2);
  auto w = CategoricalSpace::proxy(1);
  CHECK_NOTHROW(ProbTable({x, w}, {0.25, 0.25, 0.25, 0.25}));
  CHECK_THROWS_AS(ProbTable({x, w}, {0.5, 0.5}), Error);
  CHECK_THROWS_AS(ProbTable({x, x}, {0.25, 0.25, 0.25, 0.25}), Error);
}

TEST_CASE("indexing is row-major, last axis fastest") {
  ProbTable t({CategoricalSpace::proxy(1), CategoricalSpace::recorded(1, 3)},
              {0.1, 0.2, 0.3, 0.15, 0.15, 0.1});
  CHECK(t.at({0, 0}) == 0.1);
  CHECK(t.at({0, 2}) == 0.3);
  CHECK(t.at({1, 0}) == 0.15);
  std::vector<int> idx{1, 2};
  CHECK(t.offset(idx) == 5);
}

TEST_CASE("marginal and slice agree with direct sums") {
  Rng rng(7);
  auto t = random_joint(rng, {CategoricalSpace::recorded(1, 3), CategoricalSpace::proxy(1),
                              CategoricalSpace::covariate(2)});
  ProbTable mx = t.marginal({"X1"});
  for (int x = 0; x < 3; ++x) {
    double direct = 0.0;
    for (int w = 0; w < 2; ++w)
      for (int c = 0; c < 2; ++c) direct += t.at({x, w, c});
    CHECK(mx.at({x}) == doctest::Approx(direct).epsilon(1e-14));
  }
  ProbTable sl = t.slice("C", 1);
  CHECK(sl.rank() == 2);
  CHECK(sl.at({2, 1}) == t.at({2, 1, 1}));
}

TEST_CASE("operations preserve nonnegativity and total mass to 1e-12") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    auto t = random_joint(rng, {CategoricalSpace::recorded(1, 3), CategoricalSpace::proxy(1),
                                CategoricalSpace::covariate(3)});
    ProbTable m = t.marginal({"W1", "C"});
    CHECK(m.min() >= 0.0);
    CHECK(std::abs(m.sum() - 1.0) < kStructuralTol);
    ProbTable p = t.permuted({"C", "X1", "W1"});
    CHECK(std::abs(p.sum() - 1.0) < kStructuralTol);
    CHECK(p.at({2, 1, 0}) == t.at({1, 0, 2}));
  }
}

TEST_CASE("factor product matches manual joint assembly") {
  // p(c) * p(x|c) as tables, multiplied into the joint
  ProbTable pc({CategoricalSpace::covariate(2)}, {0.4, 0.6});
  ProbTable px_c({CategoricalSpace::recorded(1, 2), CategoricalSpace::covariate(2)},
                 {0.7, 0.1, 0.3, 0.9});  // p(x|c): columns c
  ProbTable joint = pc.product(px_c);
  CHECK(joint.rank() == 2);
  int c_axis = joint.axis_index("C");
  int x_axis = joint.axis_index("X1");
  std::vector<int> idx(2);
  idx[static_cast<std::size_t>(c_axis)] = 0;
  idx[static_cast<std::size_t>(x_axis)] = 1;
  CHECK(joint.at(std::span<const int>(idx)) == doctest::Approx(0.4 * 0.3));
  CHECK(joint.sum() == doctest::Approx(1.0));
}

TEST_CASE("conditional renormalizes each slice") {
  Rng rng(3);
  auto t = random_joint(rng, {CategoricalSpace::recorded(1, 2), CategoricalSpace::covariate(3)});
  ProbTable cond = t.conditional({"X1"}, {"C"});
  for (int c = 0; c < 3; ++c) {
    double total = cond.at({0, c}) + cond.at({1, c});
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("validate_joint flags bad input") {
  auto x = CategoricalSpace::recorded(1, 2);
  auto w = CategoricalSpace::proxy(1);
  CHECK_THROWS_AS(validate_joint(ProbTable({x, w}, {-0.1, 0.4, 0.35, 0.35})), Error);
  try {
    validate_joint(ProbTable({x, w}, {-0.1, 0.4, 0.35, 0.35}));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeEntry);
  }
  CHECK_THROWS_AS(validate_joint(ProbTable({x, w}, {0.3, 0.3, 0.3, 0.3})), Error);
  // sub-tolerance drift is absorbed
  ProbTable ok = validate_joint(ProbTable({x, w}, {0.25, 0.25, 0.25, 0.25 + 5e-10}));
  CHECK(std::abs(ok.sum() - 1.0) < kStructuralTol);
}

TEST_CASE("rng substreams are deterministic and distinct") {
  CHECK(Rng::substream(42, 0) == Rng::substream(42, 0));
  CHECK(Rng::substream(42, 0) != Rng::substream(42, 1));
  Rng a(5), b(5);
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng u(11);
  for (int i = 0; i < 1000; ++i) {
    double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}
