#include <doctest.h>

#include <cmath>

#include "riddled/dynamics.hpp"
#include "riddled/error.hpp"
#include "riddled/integrate.hpp"
#include "riddled/rng.hpp"

using namespace riddled;

namespace {

const SystemParams kDefault{};

PhaseState random_state(Xoshiro256& rng) {
  return {rng.uniform(0.0, 20.0), rng.uniform(-2.0, 2.0), rng.uniform(-3.0, 3.0), rng.uniform(-7.0, 7.0),
          rng.uniform(-3.0, 3.0)};
}

}  // namespace

TEST_CASE("potential_vd examples") {
  CHECK(potential_vd(1.0) == 0.0);
  CHECK(potential_vd(0.0) == 1.0);
  CHECK(potential_vd(2.0) == 9.0);
}

TEST_CASE("potential_vq examples") {
  CHECK(potential_vq(1.0, 0.0, kDefault) == 0.0);
  CHECK(potential_vq(1.0, kPi, kDefault) == doctest::Approx(0.0).epsilon(1e-30));
  CHECK(std::abs(potential_vq(1.0, kPi, kDefault)) < 1e-30);
  CHECK(potential_vq(0.0, kPi / 2, kDefault) == doctest::Approx(1.0 + 1.81e-4).epsilon(1e-14));
}

TEST_CASE("rhs_full examples") {
  const auto d = rhs_full({0.0, 1.0, 0.0, 0.0, 0.0}, kDefault);
  for (double v : d) CHECK(v == 0.0);

  const auto q = rhs_full({0.0, 0.0, 0.0, kPi / 4, 0.0}, kDefault);
  CHECK(q[3] == doctest::Approx(-1.81).epsilon(1e-14));

  Xoshiro256 rng(11);
  for (int i = 0; i < 100; ++i) {
    const auto h = rhs_full({rng.uniform(0, 10), rng.uniform(-2, 2), rng.uniform(-2, 2), kPi / 2, 0.0}, kDefault);
    CHECK(h[2] == 0.0);
    CHECK(std::abs(h[3]) < 1e-15);
  }
}

TEST_CASE("rhs_duffing examples") {
  const auto a = rhs_duffing(0.0, 0.0, 0.0, kDefault);
  CHECK(a[0] == 0.0);
  CHECK(a[1] == 0.0);
  const auto b = rhs_duffing(kPi / (2 * kDefault.omega), 0.0, 0.0, kDefault);
  CHECK(b[0] == 0.0);
  CHECK(b[1] == doctest::Approx(kDefault.p).epsilon(1e-15));
}

TEST_CASE("rhs_duffing matches rhs_full on y = 0 over one period") {
  StepControl c;
  c.tol = 1e-10;
  double t2 = 0.0, t4 = 0.0;
  Vec<2> s2{1.0, 0.0};
  Vec<4> s4{1.0, 0.0, 0.0, 0.0};
  const double T = kDefault.period();
  REQUIRE(integrate_field<2>(DuffingField{kDefault}, t2, s2, T, c) == IntegrationStatus::Completed);
  REQUIRE(integrate_field<4>(FullField{kDefault}, t4, s4, T, c) == IntegrationStatus::Completed);
  CHECK(std::abs(s2[0] - s4[0]) <= 1e-10);
  CHECK(std::abs(s2[1] - s4[1]) <= 1e-10);
  CHECK(s4[2] == 0.0);
  CHECK(s4[3] == 0.0);
}

TEST_CASE("transverse_jacobian examples") {
  CHECK(transverse_jacobian(-kDefault.xbar, kDefault).stiffness == 0.0);
  CHECK(transverse_jacobian(0.0, kDefault).stiffness == doctest::Approx(-3.62).epsilon(1e-15));
  CHECK(transverse_jacobian(0.0, kDefault).damping == -kDefault.gamma);
  CHECK(transverse_jacobian(-kDefault.xbar - 1e-9, kDefault).stiffness > 0.0);
  CHECK(transverse_jacobian(-kDefault.xbar + 1e-9, kDefault).stiffness < 0.0);
}

TEST_CASE("manifold invariance") {
  Xoshiro256 rng(3);
  for (double y : {0.0, kPi / 2, kPi}) {
    for (int i = 0; i < 50; ++i) {
      const auto d = rhs_full({rng.uniform(0, 10), rng.uniform(-2, 2), rng.uniform(-2, 2), y, 0.0}, kDefault);
      CHECK(d[2] == 0.0);
      CHECK(std::abs(d[3]) < 1e-15);
    }
  }
  // Trajectories started on y = 0 or y = pi never leave it.
  StepControl c;
  for (double y : {0.0, kPi}) {
    double t = 0.0;
    Vec<4> s{0.3, 0.1, y, 0.0};
    REQUIRE(integrate_field<4>(FullField{kDefault}, t, s, 50 * kDefault.period(), c) == IntegrationStatus::Completed);
    CHECK(std::abs(s[2] - y) < 1e-13);
    CHECK(std::abs(s[3]) < 1e-13);
  }
  // The centred field keeps u = 0 exactly.
  double t = 0.0;
  Vec<4> s{0.3, 0.1, 0.0, 0.0};
  REQUIRE(integrate_field<4>(CenteredField{kDefault}, t, s, 50 * kDefault.period(), c) ==
          IntegrationStatus::Completed);
  CHECK(s[2] == 0.0);
  CHECK(s[3] == 0.0);
}

TEST_CASE("force components are minus the potential gradient") {
  Xoshiro256 rng(17);
  const double h = 1e-5;
  const double eps2 = kDefault.epsilon * kDefault.epsilon;
  for (int i = 0; i < 1000; ++i) {
    const auto s = random_state(rng);
    const auto d = rhs_full(s, kDefault);
    const double fx = d[1] + kDefault.gamma * s.vx - kDefault.p * std::sin(kDefault.omega * s.t);
    const double gx = -(potential_vq(s.x + h, s.y, kDefault) - potential_vq(s.x - h, s.y, kDefault)) / (2 * h);
    // Rescaled y: the transverse force is the physical one divided by epsilon^2.
    const double fy = d[3] + kDefault.gamma * s.vy;
    const double gy = -(potential_vq(s.x, s.y + h, kDefault) - potential_vq(s.x, s.y - h, kDefault)) / (2 * h) / eps2;
    CHECK(std::abs(fx - gx) <= 1e-6 * std::max(1.0, std::abs(gx)));
    CHECK(std::abs(fy - gy) <= 1e-6 * std::max(1.0, std::abs(gy)));
  }
}

TEST_CASE("mirror symmetry of the field") {
  Xoshiro256 rng(5);
  for (int i = 0; i < 1000; ++i) {
    auto s = random_state(rng);
    s.y = rng.uniform(kPi / 2, kPi);  // pi - y is then exact
    const auto a = rhs_full(s, kDefault);
    const auto b = rhs_full({s.t, s.x, s.vx, kPi - s.y, -s.vy}, kDefault);
    CHECK(a[0] == b[0]);
    CHECK(a[1] == doctest::Approx(b[1]).epsilon(1e-15));
    CHECK(a[2] == -b[2]);
    CHECK(a[3] == doctest::Approx(-b[3]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("centred field is exactly odd in (u, vu)") {
  Xoshiro256 rng(6);
  const CenteredField f{kDefault};
  for (int i = 0; i < 1000; ++i) {
    const Vec<4> s{rng.uniform(-2, 2), rng.uniform(-3, 3), rng.uniform(-1.6, 1.6), rng.uniform(-3, 3)};
    Vec<4> a{}, b{};
    const double t = rng.uniform(0, 20);
    f(t, s, a);
    f(t, {s[0], s[1], -s[2], -s[3]}, b);
    CHECK(a[0] == b[0]);
    CHECK(a[1] == b[1]);
    CHECK(a[2] == -b[2]);
    CHECK(a[3] == -b[3]);
  }
}

TEST_CASE("centred field agrees with the full field") {
  Xoshiro256 rng(8);
  const CenteredField f{kDefault};
  for (int i = 0; i < 200; ++i) {
    const auto s = random_state(rng);
    Vec<4> c{};
    f(s.t, {s.x, s.vx, s.y - kPi / 2, s.vy}, c);
    const auto d = rhs_full(s, kDefault);
    for (int k = 0; k < 4; ++k) CHECK(c[k] == doctest::Approx(d[k]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("decoupling limit is bit identical") {
  SystemParams p = kDefault;
  p.epsilon = 0.0;
  Xoshiro256 rng(9);
  for (int i = 0; i < 1000; ++i) {
    const auto s = random_state(rng);
    const auto full = rhs_full(s, p);
    const auto duff = rhs_duffing(s.t, s.x, s.vx, p);
    CHECK(full[0] == duff[0]);
    CHECK(full[1] == duff[1]);
  }
}

TEST_CASE("params validation") {
  CHECK_NOTHROW(kDefault.validate());
  SystemParams p;
  p.gamma = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.omega = -1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.epsilon = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.xbar = NAN;
  CHECK_THROWS_AS(p.validate(), Error);
  CHECK(SystemParams::xbar_cr == 1.7887);
}
