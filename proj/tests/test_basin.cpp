#include <doctest.h>

#include <cmath>

#include "riddled/basin.hpp"
#include "riddled/rng.hpp"

using namespace riddled;

namespace {

const SystemParams kDefault{};
const StepControl kControl{};
const CaptureCriterion kCriterion{};

// Multiples of 2^-20 keep y + 2pi exactly representable.
double dyadic(Xoshiro256& rng, double lo, double hi) {
  return std::ldexp(std::floor(std::ldexp(rng.uniform(lo, hi), 20)), -20);
}

}  // namespace

TEST_CASE("label encoding") {
  CHECK(to_int(BasinLabel::CPlus) == 1);
  CHECK(to_int(BasinLabel::CMinus) == -1);
  CHECK(to_int(BasinLabel::Unresolved) == 0);
  for (auto l : {BasinLabel::CPlus, BasinLabel::CMinus})
    CHECK(s_plus(l) + s_minus(l) == 1);
  CHECK(s_plus(BasinLabel::Unresolved) + s_minus(BasinLabel::Unresolved) == 0);
  CHECK(negate(BasinLabel::CPlus) == BasinLabel::CMinus);
  CHECK(negate(BasinLabel::Unresolved) == BasinLabel::Unresolved);
}

TEST_CASE("folded distances") {
  CHECK(folded_distance_to_zero(0.0) == 0.0);
  CHECK(folded_distance_to_zero(kTwoPi) == 0.0);
  CHECK(folded_distance_to_zero(-0.25) == 0.25);
  CHECK(folded_distance_to_zero(kPi) == kPi);
  CHECK(folded_distance_to_pi(kPi) == 0.0);
  CHECK(folded_distance_to_pi(3 * kPi) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  for (double y : {0.1, 1.0, 2.0, 3.0, 10.0, -7.5}) {
    CHECK(folded_distance_to_zero(y) == folded_distance_to_zero(-y));
    CHECK(canonical_transverse(y) == canonical_transverse(-y));
    CHECK(canonical_transverse(y) >= 0.0);
    CHECK(canonical_transverse(y) <= kPi);
  }
}

TEST_CASE("capture radii") {
  CaptureCriterion c;
  auto [dy, dv] = c.radii(0.0);
  CHECK(dy == c.delta_y);
  CHECK(dv == c.delta_v);
  std::tie(dy, dv) = c.radii(1.0);
  CHECK(dy == c.delta_y);
  std::tie(dy, dv) = c.radii(1e-3);
  CHECK(dy == doctest::Approx(1e-5));
  CHECK(dv == doctest::Approx(1e-5));
  std::tie(dy, dv) = c.radii(1e-20);
  CHECK(dy == c.min_delta_y);
  c.relative_delta = 0.0;
  std::tie(dy, dv) = c.radii(1e-3);
  CHECK(dy == c.delta_y);
  CHECK_NOTHROW(c.validate());
  c.k_sections = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("invariant manifolds") {
  CHECK(classify_rest(0.5, 0.0, kDefault, kControl, kCriterion) == BasinLabel::CPlus);
  CHECK(classify_rest(0.5, kPi, kDefault, kControl, kCriterion) == BasinLabel::CMinus);
  Xoshiro256 rng(21);
  for (int i = 0; i < 20; ++i) {
    const AttractorPoint X{rng.uniform(-1.5, 1.5), rng.uniform(-2, 2)};
    CHECK(classify_from_state(X, 0.0, kDefault, kControl, kCriterion) == BasinLabel::CPlus);
    CHECK(classify_from_state(X, kTwoPi, kDefault, kControl, kCriterion) == BasinLabel::CPlus);
    CHECK(classify_from_state(X, kPi, kDefault, kControl, kCriterion) == BasinLabel::CMinus);
  }
}

TEST_CASE("the repelling manifold is never resolved") {
  for (double x : {-0.7, 0.0, 0.4}) {
    const auto c = classify_state(x, 0.0, kPi / 2, kDefault, kControl, kCriterion);
    CHECK(c.label == BasinLabel::Unresolved);
    CHECK_FALSE(c.underflow);
    CHECK(c.final_state.y == kPi / 2);
  }
}

TEST_CASE("classify_from_state agrees with classify_rest") {
  Xoshiro256 rng(22);
  for (int i = 0; i < 30; ++i) {
    const double x = rng.uniform(-1, 1);
    const double y = rng.uniform(0.05, kPi - 0.05);
    CHECK(classify_from_state({x, 0.0}, y, kDefault, kControl, kCriterion) ==
          classify_rest(x, y, kDefault, kControl, kCriterion));
  }
}

TEST_CASE("mirror antisymmetry, periodicity and evenness") {
  Xoshiro256 rng(23);
  int resolved = 0;
  for (int i = 0; i < 150; ++i) {
    const double x = rng.uniform(-1, 1);
    const double y = dyadic(rng, kPi / 2, kPi);  // pi - y is exact
    const auto a = classify_rest(x, y, kDefault, kControl, kCriterion);
    const auto b = classify_rest(x, kPi - y, kDefault, kControl, kCriterion);
    if (a != BasinLabel::Unresolved && b != BasinLabel::Unresolved) {
      ++resolved;
      CHECK(a == negate(b));
    }
    CHECK(classify_rest(x, y + kTwoPi, kDefault, kControl, kCriterion) == a);
    CHECK(classify_rest(x, -y, kDefault, kControl, kCriterion) == a);
  }
  CHECK(resolved >= 140);
}

TEST_CASE("capture state is on the capturing manifold") {
  Xoshiro256 rng(24);
  for (int i = 0; i < 20; ++i) {
    const auto c = classify_state(rng.uniform(-1, 1), 0.0, rng.uniform(0.1, 3.0), kDefault, kControl, kCriterion);
    if (c.label == BasinLabel::CPlus) CHECK(folded_distance_to_zero(c.final_state.y) < kCriterion.delta_y);
    if (c.label == BasinLabel::CMinus) CHECK(folded_distance_to_pi(c.final_state.y) < kCriterion.delta_y);
    if (c.label != BasinLabel::Unresolved) {
      CHECK(c.t_end > 0.0);
      // Capture is decided at a section.
      CHECK(std::abs(std::remainder(c.t_end, kDefault.period())) < 1e-9);
    }
  }
}

TEST_CASE("grid coordinates") {
  GridSpec g;
  g.nx = 5;
  g.ny = 3;
  CHECK(g.x_at(0) == -1.0);
  CHECK(g.x_at(4) == 1.0);
  CHECK(g.y_at(2) == kPi / 2);
  g.centered = true;
  CHECK(g.x_at(0) == doctest::Approx(-0.8));
  CHECK(g.y_at(0) == doctest::Approx(kPi / 12));
  g.nx = 0;
  CHECK_THROWS_AS(g.validate(), Error);
}

TEST_CASE("grid scan over the full window") {
  GridSpec g;
  g.nx = 20;
  g.ny = 20;
  const auto r = grid_scan(g, kDefault, kControl, 1);
  REQUIRE(r.labels.size() == 400);
  REQUIRE(r.t_end.size() == 400);
  for (std::size_t i = 0; i < 20; ++i) CHECK(r.at(i, 0) == BasinLabel::CPlus);
  // The last row sits on y = pi/2 exactly.
  CHECK(r.cells_on_repelling_manifold == 20);
  for (std::size_t i = 0; i < 20; ++i) CHECK(r.at(i, 19) == BasinLabel::Unresolved);
  CHECK(r.unresolved >= 20);
  double mean = 0.0;
  for (auto l : r.labels) mean += to_int(l);
  mean /= 400.0;
  CHECK(mean >= -1.0);
  CHECK(mean <= 1.0);

  SUBCASE("result is independent of the worker count") {
    GridSpec small = g;
    small.nx = 6;
    small.ny = 6;
    small.centered = true;
    const auto a = grid_scan(small, kDefault, kControl, 1);
    const auto b = grid_scan(small, kDefault, kControl, 3);
    CHECK(a.labels == b.labels);
    CHECK(a.t_end == b.t_end);
  }
}

TEST_CASE("tolerance scan") {
  const auto s = tol_scan(8, 0.4 * kPi, 3, kDefault, kControl, kCriterion, 1);
  REQUIRE(s.x.size() == 8);
  REQUIRE(s.labels.size() == 24);
  CHECK(s.x.front() == doctest::Approx(-1.0 + 1.0 / 8));
  for (std::size_t i = 0; i < 8; ++i)
    CHECK(s.at(2, i) == classify_rest(s.x[i], 0.4 * kPi, kDefault, kControl.with_tol_index(2), kCriterion));
  CHECK_THROWS_AS(tol_scan(8, 0.4 * kPi, 1, kDefault, kControl, kCriterion, 1), Error);
}

TEST_CASE("halving the capture radius rarely changes a label") {
  GridSpec g;
  g.nx = 50;
  g.ny = 50;
  g.centered = true;
  const auto a = grid_scan(g, kDefault, kControl, 0);
  g.criterion.delta_y /= 2;
  const auto b = grid_scan(g, kDefault, kControl, 0);
  std::size_t changed = 0;
  for (std::size_t k = 0; k < a.labels.size(); ++k) changed += a.labels[k] != b.labels[k];
  MESSAGE("labels changed by halving delta_y: " << changed << " of " << a.labels.size());
  CHECK(static_cast<double>(changed) < 0.02 * static_cast<double>(a.labels.size()));
}
