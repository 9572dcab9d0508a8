#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "hemo/wss.hpp"

using namespace hemo;
using namespace hemo::wss;

namespace {

Eigen::Matrix3d random_symmetric(std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Eigen::Matrix3d a;
  for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = d(rng);
  return a + a.transpose();
}

std::vector<TractionSample> series(int n, double dt, auto&& traction) {
  std::vector<TractionSample> s(n);
  for (int i = 0; i < n; ++i) s[i] = {i * dt, traction(i)};
  return s;
}

}  // namespace

TEST_SUITE("wss") {

TEST_CASE("deviatoric stress from the moment") {
  const rheology::LatticeScaling sc(1e-5, 5e-5, 1000.0);
  CHECK(deviatoric_stress(Eigen::Matrix3d::Zero(), 0.8, sc).norm() == 0.0);

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Matrix3d pi = 1e-4 * random_symmetric(rng);
    const double tau = 0.51 + trial * 0.005;
    const Eigen::Matrix3d T = deviatoric_stress(pi, tau, sc);
    CHECK(std::abs(T.trace()) <= 1e-12 * T.norm());
    CHECK((T - T.transpose()).norm() == 0.0);
    const double unit = 1000.0 * 5e-5 * 5e-5 / (1e-5 * 1e-5);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double dev = pi(i, j) - (i == j ? pi.trace() / 3.0 : 0.0);
        CHECK(T(i, j) == doctest::Approx(-(1.0 - 1.0 / (2.0 * tau)) * dev * unit).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("traction") {
  CHECK(traction(Eigen::Matrix3d::Zero(), Eigen::Vector3d::UnitZ()).norm() == 0.0);
  Eigen::Matrix3d T = Eigen::Matrix3d::Zero();
  T(0, 1) = T(1, 0) = 2.5;
  CHECK(traction(T, Eigen::Vector3d::UnitY()) == Eigen::Vector3d(2.5, 0, 0));
  CHECK_THROWS_AS(traction(T, Eigen::Vector3d(0, 2, 0)), std::invalid_argument);
  CHECK_THROWS_AS(traction(T, Eigen::Vector3d::Zero()), std::invalid_argument);

  std::mt19937_64 rng(6);
  std::normal_distribution<double> d;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Matrix3d M = traceless(random_symmetric(rng));
    const Eigen::Vector3d n = Eigen::Vector3d(d(rng), d(rng), d(rng)).normalized();
    const Eigen::Vector3d t = traction(M, n);
    for (int i = 0; i < 3; ++i) {
      const double brute = M(i, 0) * n[0] + M(i, 1) * n[1] + M(i, 2) * n[2];
      CHECK(t[i] == doctest::Approx(brute).epsilon(1e-14));
    }
  }
}

TEST_CASE("signed WSS: constant traction") {
  const auto sig = signed_wss(series(50, 0.01, [](int) { return Eigen::Vector3d(1, 0, 0); }));
  for (double s : sig.S) CHECK(s == 1.0);
  CHECK(sig.mean_traction == Eigen::Vector3d(1, 0, 0));
  CHECK_FALSE(sig.zero_traction);
}

TEST_CASE("signed WSS: 60/40 alternating traction") {
  const auto sig = signed_wss(series(100, 0.01, [](int i) {
    return Eigen::Vector3d(i % 10 < 6 ? 1.0 : -1.0, 0, 0);
  }));
  CHECK(sig.mean_traction.x() > 0.0);
  for (int i = 0; i < 100; ++i) CHECK(sig.S[i] == (i % 10 < 6 ? 1.0 : -1.0));
}

TEST_CASE("signed WSS: rotating traction changes sign at the analytic angles") {
  const int n = 1000;
  const double arc = 1.2 * std::numbers::pi;  // the traction turns through 216 degrees
  const double dtheta = arc / n;
  const auto sig = signed_wss(series(n, 1e-3, [&](int i) {
    return Eigen::Vector3d(std::cos(i * dtheta), std::sin(i * dtheta), 0);
  }));
  // uniform samples on an arc average to the arc midpoint direction
  const double mid = 0.5 * (n - 1) * dtheta;
  const double up = (mid - 0.5 * std::numbers::pi) / dtheta;
  const double down = (mid + 0.5 * std::numbers::pi) / dtheta;
  int first_pos = -1, first_neg_after = -1;
  for (int i = 0; i < n; ++i) {
    if (first_pos < 0 && sig.S[i] > 0) first_pos = i;
    if (first_pos >= 0 && first_neg_after < 0 && sig.S[i] < 0) first_neg_after = i;
  }
  CHECK(std::abs(first_pos - up) <= 1.0);
  CHECK(std::abs(first_neg_after - down) <= 1.0);
  for (double s : sig.S) CHECK(std::abs(std::abs(s) - 1.0) < 1e-12);
}

TEST_CASE("signed WSS: window and degenerate input") {
  auto samples = series(200, 0.01, [](int i) {
    return Eigen::Vector3d(i < 100 ? -5.0 : 1.0, 0, 0);
  });
  const auto whole = signed_wss(samples);
  CHECK(whole.S[150] == -1.0);
  AnalysisWindow w;
  w.begin = 1.0 - 0.005;
  const auto late = signed_wss(samples, w);
  CHECK(late.window_begin == 100);
  CHECK(late.window_end == 200);
  CHECK(late.mean_traction.x() == 1.0);
  CHECK(late.S[150] == 1.0);
  CHECK(late.S[50] == -5.0);
  CHECK(late.window_values().size() == 100);
  CHECK(late.window_times().front() == doctest::Approx(1.0));

  w.begin = 1.985;
  CHECK_THROWS_AS(signed_wss(samples, w), std::invalid_argument);

  const auto zero = signed_wss(series(10, 0.1, [](int) { return Eigen::Vector3d::Zero().eval(); }));
  CHECK(zero.zero_traction);
  for (double s : zero.S) CHECK(s == 0.0);
}

TEST_CASE("signed WSS: a zero dot product counts as positive") {
  auto samples = series(3, 0.1, [](int i) {
    return i < 2 ? Eigen::Vector3d(2, 0, 0) : Eigen::Vector3d(0, 3, 0);
  });
  AnalysisWindow w;
  w.end = 0.15;
  const auto sig = signed_wss(samples, w);
  CHECK(sig.mean_traction == Eigen::Vector3d(2, 0, 0));
  CHECK(sig.S[2] == 3.0);
}

TEST_CASE("signal CSV round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "hemo_unit_wss";
  std::filesystem::create_directories(dir);
  const auto sig = signed_wss(series(20, 0.05, [](int i) {
    return Eigen::Vector3d(std::sin(0.7 * i), 0.1 * i, -0.25);
  }));
  write_wss_csv(dir / "w.csv", sig);
  const auto back = read_signal_csv(dir / "w.csv");
  REQUIRE(back.values.size() == 20);
  for (int i = 0; i < 20; ++i) {
    CHECK(back.values[i] == sig.S[i]);
    CHECK(back.times[i] == sig.samples[i].t);
  }
}

}  // TEST_SUITE
