// Copyright 2026 The mimoscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "mimoscope/metrics.hpp"
#include "mimoscope/stats.hpp"
#include "oracles.hpp"

using namespace mimoscope;
using fixture::kind_of;

namespace {

double mean_power(const ChannelTensor& t) {
  double sum = 0.0;
  for (const auto& x : t.data()) sum += std::norm(x);
  return sum / static_cast<double>(t.size());
}

GainSeries series(std::vector<double> v) { return GainSeries{std::move(v), 1}; }

std::vector<Complex> to_vec(const CMatrix& col) { return {col.data(), col.data() + col.size()}; }

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("normalize examples") {
    const auto n = normalize(fixture::constant_tensor(4, 2, 3, {2.0, 0.0}));
    for (const auto& x : n.tensor().data()) CHECK(x == Complex(1.0, 0.0));
    CHECK(n.rms_scale() == 2.0);

    const auto unit = fixture::constant_tensor(3, 1, 2, {0.6, 0.8});
    const auto u = normalize(unit);
    for (std::size_t i = 0; i < unit.size(); ++i) CHECK(std::abs(u.tensor().data()[i] - unit.data()[i]) < 1e-15);

    fixture::Random rng(21);
    const auto r = normalize(rng.tensor(50, 2, 8, 2.0));
    CHECK(std::abs(mean_power(r.tensor()) - 1.0) < 1e-12);
    CHECK(r.rms_scale() == doctest::Approx(2.0).epsilon(0.1));

    CHECK(kind_of([] { normalize(fixture::constant_tensor(2, 1, 2, {0.0, 0.0})); }) == ErrorKind::kDegenerateInput);
  }

  TEST_CASE("normalize is idempotent and scale invariant") {
    fixture::Random rng(22);
    for (int trial = 0; trial < 50; ++trial) {
      const auto t = rng.tensor(10, 2, 4, rng.uniform(0.1, 10.0));
      const auto n1 = normalize(t);
      const auto n2 = normalize(n1.tensor());
      const double c = rng.uniform(1e-3, 1e3);
      std::vector<Complex> scaled(t.data().begin(), t.data().end());
      for (auto& x : scaled) x *= c;
      const auto n3 = normalize(ChannelTensor("t", 10, 2, 4, scaled));
      for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(std::abs(n1.tensor().data()[i] - n2.tensor().data()[i]) < 1e-14);
        CHECK(std::abs(n1.tensor().data()[i] - n3.tensor().data()[i]) < 1e-14);
      }
    }
  }

  TEST_CASE("instantaneous gain") {
    fixture::Random rng(23);
    const auto t = rng.tensor(20, 2, 1);
    const auto n = normalize(t);
    const auto g = instantaneous_gain(n);
    REQUIRE(g.values.size() == 40);
    for (std::size_t i = 0; i < 40; ++i) CHECK(g.values[i] == doctest::Approx(std::norm(n.tensor().data()[i])));

    const auto ones = instantaneous_gain(normalize(fixture::constant_tensor(3, 2, 4, {0.0, 1.0})));
    for (double v : ones.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));

    // Two silent antennas and two with |h|^2 = 2 average to 1.
    const double s2 = std::sqrt(2.0);
    const ChannelTensor half("h", 1, 1, 4, {0.0, 0.0, s2, Complex(0.0, s2)});
    CHECK(instantaneous_gain(normalize(half)).values[0] == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("mean gain and std") {
    fixture::Random rng(24);
    CHECK(mean_gain(instantaneous_gain(normalize(rng.tensor(30, 2, 6)))) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mean_gain(series({2.5, 2.5, 2.5})) == 2.5);
    CHECK(mean_gain(series({0.5, 1.5})) == 1.0);
    CHECK(gain_std(series({3.0, 3.0, 3.0})) == 0.0);
    CHECK(gain_std(series({0.0, 2.0})) == 1.0);
    CHECK(kind_of([] { gain_std(series({1.0})); }) == ErrorKind::kDegenerateInput);
    CHECK(kind_of([] { mean_gain(series({})); }) == ErrorKind::kDegenerateInput);
    CHECK(hardening_ratio(series({0.0, 2.0})) == 1.0);
  }

  TEST_CASE("single-antenna gain std of unit Rayleigh is one") {
    fixture::Random rng(25);
    const auto n = normalize(rng.tensor(500000, 2, 1));
    CHECK(std::abs(gain_std(instantaneous_gain(n)) - 1.0) < 0.01);
  }

  TEST_CASE("subset gain is renormalized to unit mean") {
    fixture::Random rng(26);
    const auto n = normalize(rng.tensor(100, 2, 8));
    for (std::size_t m = 1; m <= 8; ++m) {
      const auto g = subset_gain(n, ArrayGeometry::ula(8), m);
      CHECK(g.antenna_count == m);
      CHECK(mean_gain(g) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("hardening in dB") {
    fixture::Random rng(27);
    const auto geometry = ArrayGeometry::ula(32);
    const auto n = normalize(rng.tensor(20000, 2, 32));
    CHECK(hardening_db(n, geometry, 1) == 0.0);
    CHECK(std::abs(hardening_db(n, geometry, 4) - 10.0 * std::log10(2.0)) < 0.3);
    CHECK(std::abs(hardening_db(n, geometry, 31) - 7.5) < 0.3);
    const auto flat = normalize(fixture::constant_tensor(10, 1, 4, {1.0, 0.0}));
    CHECK(kind_of([&] { hardening_db(flat, ArrayGeometry::ula(4), 2); }) == ErrorKind::kDegenerateInput);
  }

  TEST_CASE("hardening grows with m for Rayleigh channels") {
    fixture::Random rng(28);
    const auto geometry = ArrayGeometry::ula(16);
    std::vector<double> sum(17, 0.0);
    const int windows = 1000;
    for (int w = 0; w < windows; ++w) {
      const auto n = normalize(rng.tensor(600, 2, 16));
      for (std::size_t m : {1u, 2u, 4u, 8u, 16u}) sum[m] += hardening_db(n, geometry, m);
    }
    CHECK(sum[1] < sum[2]);
    CHECK(sum[2] < sum[4]);
    CHECK(sum[4] < sum[8]);
    CHECK(sum[8] < sum[16]);
  }

  TEST_CASE("correlation coefficient") {
    const std::vector<Complex> a{Complex(1, 2), Complex(-0.5, 0.1), 3.0};
    CHECK(correlation_coefficient(a, a) == doctest::Approx(1.0).epsilon(1e-15));
    const std::vector<Complex> e0{1.0, 0.0}, e1{0.0, 1.0};
    CHECK(correlation_coefficient(e0, e1) == 0.0);
    const std::vector<Complex> s1{Complex(0.3, -2.0)}, s2{Complex(-7.0, 0.5)};
    CHECK(correlation_coefficient(s1, s2) == 1.0);

    fixture::Random rng(29);
    for (int trial = 0; trial < 100; ++trial) {
      const auto x = to_vec(rng.gaussian(6, 1));
      const auto y = to_vec(rng.gaussian(6, 1));
      const double d = correlation_coefficient(x, y);
      CHECK(d >= 0.0);
      CHECK(d <= 1.0);
      CHECK(correlation_coefficient(y, x) == doctest::Approx(d).epsilon(1e-14));
      auto xs = x;
      auto ys = y;
      const Complex cx = rng.complex_normal() * 5.0, cy = rng.complex_normal() * 0.1;
      for (auto& v : xs) v *= cx;
      for (auto& v : ys) v *= cy;
      CHECK(correlation_coefficient(xs, ys) == doctest::Approx(d).epsilon(1e-12));
    }
    CHECK(kind_of([&] { correlation_coefficient(e0, a); }) == ErrorKind::kInvalidInput);
    const std::vector<Complex> zero{0.0, 0.0};
    CHECK(kind_of([&] { correlation_coefficient(zero, e0); }) == ErrorKind::kDegenerateInput);
  }

  TEST_CASE("correlation matrix") {
    // Scaling back by rms_scale^2 recovers the raw-sample average.
    const auto one = normalize(ChannelTensor("r", 1, 1, 2, {1.0, 0.0}));
    const CMatrix r1 = correlation_matrix(one, TimeWindow{0, 1}, 0).matrix() * std::pow(one.rms_scale(), 2);
    CMatrix expect1 = CMatrix::Zero(2, 2);
    expect1(0, 0) = 1.0;
    CHECK((r1 - expect1).norm() < 1e-15);

    const auto two = normalize(ChannelTensor("r", 2, 1, 2, {1.0, 0.0, 0.0, 1.0}));
    const CMatrix r2 = correlation_matrix(two, TimeWindow{0, 2}, 0).matrix() * std::pow(two.rms_scale(), 2);
    CHECK((r2 - 0.5 * CMatrix::Identity(2, 2)).norm() < 1e-15);

    CHECK(kind_of([&] { correlation_matrix(two, TimeWindow{1, 2}, 0); }) == ErrorKind::kOutOfRange);
    CHECK(kind_of([&] { correlation_matrix(two, TimeWindow{0, 2}, 1); }) == ErrorKind::kOutOfRange);
  }

  TEST_CASE("correlation matrix trace equals the window mean of M times the gain") {
    fixture::Random rng(30);
    const auto n = normalize(rng.tensor(40, 3, 5));
    const TimeWindow w{10, 20};
    for (std::size_t f = 0; f < 3; ++f) {
      const double trace = correlation_matrix(n, w, f).matrix().trace().real();
      const auto g = instantaneous_gain(n);
      double sum = 0.0;
      for (std::size_t k = w.start; k < w.start + w.length; ++k) sum += 5.0 * g.values[k * 3 + f];
      CHECK(std::abs(trace - sum / 20.0) < 1e-10);
    }
  }

  TEST_CASE("Rayleigh correlation eigenvalues cluster around 0 dB") {
    fixture::Random rng(31);
    const auto n = normalize(rng.tensor(600, 1, 31));
    const auto s = eigh(correlation_matrix(n, TimeWindow{0, 600}, 0));
    for (Eigen::Index i = 0; i < s.dim(); ++i) CHECK(std::abs(10.0 * std::log10(s.values(i))) < 2.5);
  }

  TEST_CASE("inverse condition number") {
    fixture::Random rng(32);
    CHECK(inverse_condition_number(rng.gaussian(3, 5)) == 0.0);
    CHECK(inverse_condition_number(rng.orthonormal(6, 4)) == doctest::Approx(1.0).epsilon(1e-12));
    CMatrix cols(2, 2);
    cols << 1.0, 1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(inverse_condition_number(cols) == doctest::Approx((1.0 - r) / (1.0 + r)).epsilon(1e-12));
    CHECK(std::abs(inverse_condition_number(cols) - 0.17157) < 1e-5);

    for (int trial = 0; trial < 50; ++trial) {
      const CMatrix h = rng.gaussian(5, 3);
      const CMatrix u = rng.unitary(5);
      CHECK(inverse_condition_number(u * h) == doctest::Approx(inverse_condition_number(h)).epsilon(1e-9));
      const CMatrix h2 = rng.gaussian(4, 2);
      CHECK(std::abs(inverse_condition_number(h2) - oracle::inverse_condition_2(h2)) < 1e-9);
    }
    CMatrix zero_col = rng.gaussian(3, 2);
    zero_col.col(1).setZero();
    CHECK(kind_of([&] { inverse_condition_number(zero_col); }) == ErrorKind::kDegenerateInput);
  }

  TEST_CASE("chordal distance") {
    fixture::Random rng(33);
    const CMatrix u = rng.orthonormal(8, 3);
    CHECK(chordal_distance(u, u) < 1e-12);
    CHECK(chordal_distance(u, u * rng.unitary(3)) < 1e-10);

    const CMatrix q = rng.unitary(8);
    CHECK(std::abs(chordal_distance(q.leftCols(3), q.middleCols(3, 3)) - 6.0) < 1e-9);

    for (int trial = 0; trial < 200; ++trial) {
      const CMatrix a = rng.orthonormal(10, 3);
      const CMatrix b = rng.orthonormal(10, 3);
      const double d = chordal_distance(a, b);
      CHECK(d >= 0.0);
      CHECK(d <= 6.0);
      CHECK(std::abs(d - oracle::projector_chordal(a, b)) < 1e-9);
      CHECK(std::abs(chordal_distance(a * rng.unitary(3), b) - d) < 1e-9);
      CHECK(chordal_distance(b, a) == doctest::Approx(d).epsilon(1e-12));
    }
    CHECK(kind_of([&] { chordal_distance(u, rng.orthonormal(8, 2)); }) == ErrorKind::kInvalidInput);
    CHECK(kind_of([&] { chordal_distance(u, 2.0 * u); }) == ErrorKind::kInvalidInput);
    CHECK(has_orthonormal_columns(u));
    CHECK_FALSE(has_orthonormal_columns(2.0 * u));
  }

  TEST_CASE("dominant eigenspace and energy fraction") {
    CMatrix d = CMatrix::Zero(3, 3);
    d(0, 0) = 1.0;
    d(1, 1) = 3.0;
    d(2, 2) = 2.0;
    const auto s = eigh(HermitianMatrix(d));
    const CMatrix top = dominant_eigenspace(s, 2);
    CHECK(std::abs(top(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(top(2, 1)) == doctest::Approx(1.0));
    const CMatrix full = dominant_eigenspace(s, 3);
    CHECK((full.adjoint() * full - CMatrix::Identity(3, 3)).norm() < 1e-12);
    CHECK(eigen_energy_fraction(s, 3) == 1.0);

    CMatrix d2 = CMatrix::Zero(2, 2);
    d2(0, 0) = 3.0;
    d2(1, 1) = 1.0;
    CHECK(eigen_energy_fraction(eigh(HermitianMatrix(d2)), 1) == 0.75);

    fixture::Random rng(34);
    const CMatrix h = rng.gaussian(5, 1);
    const auto rank1 = eigh(HermitianMatrix(h * h.adjoint()));
    CHECK(kind_of([&] { dominant_eigenspace(rank1, 3); }) == ErrorKind::kInsufficientRank);
    CHECK(kind_of([&] { dominant_eigenspace(rank1, 0); }) == ErrorKind::kOutOfRange);
    CHECK(kind_of([&] { dominant_eigenspace(rank1, 6); }) == ErrorKind::kOutOfRange);
  }

  TEST_CASE("per-antenna gain and array gain") {
    const auto unit = per_antenna_mean_gain_db(fixture::constant_tensor(5, 2, 4, {0.0, -1.0}));
    for (const auto& v : unit) {
      REQUIRE(v.has_value());
      CHECK(std::abs(*v) < 1e-12);
    }
    fixture::Random rng(35);
    const auto base = rng.tensor(50, 2, 4);
    std::vector<Complex> scaled(base.data().begin(), base.data().end());
    for (std::size_t i = 2; i < scaled.size(); i += 4) scaled[i] *= std::sqrt(10.0);
    const auto a = per_antenna_mean_gain_db(base);
    const auto b = per_antenna_mean_gain_db(ChannelTensor("s", 50, 2, 4, scaled));
    CHECK(*b[2] - *a[2] == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(*b[0] == *a[0]);

    std::vector<Complex> dead(8, Complex(1.0, 0.0));
    for (std::size_t i = 1; i < dead.size(); i += 2) dead[i] = 0.0;
    CHECK_FALSE(per_antenna_mean_gain_db(ChannelTensor("d", 4, 1, 2, dead))[1].has_value());

    CHECK(array_gain_db(1) == 0.0);
    CHECK(array_gain_db(10) == 10.0);
    CHECK(array_gain_db(32) == doctest::Approx(15.05).epsilon(1e-3));
    CHECK(kind_of([] { array_gain_db(0); }) == ErrorKind::kInvalidInput);
  }
}

TEST_SUITE("stats") {
  TEST_CASE("pairwise sum and standard error") {
    std::vector<double> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.1 * static_cast<double>(i);
    CHECK(pairwise_sum(v) == doctest::Approx(49950.0).epsilon(1e-14));
    CHECK(mean_of(v) == doctest::Approx(49.95).epsilon(1e-14));
    const std::vector<double> two{1.0, 3.0};
    CHECK(standard_error(two) == doctest::Approx(1.0));
    const std::vector<double> single{5.0};
    CHECK(standard_error(single) == 0.0);
  }

  TEST_CASE("dB floor") {
    CHECK(*power_to_db(100.0) == doctest::Approx(20.0));
    CHECK_FALSE(power_to_db(1e-16).has_value());
    CHECK_FALSE(power_to_db(0.0).has_value());
  }

  TEST_CASE("parallel_for fills every slot and rethrows the first failure") {
    std::vector<int> out(257, 0);
    parallel_for(out.size(), 8, [&](std::size_t i) { out[i] = static_cast<int>(i) * 2; });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i) * 2);
    CHECK(resolve_threads(0) >= 1);
    CHECK(resolve_threads(3) == 3);
    try {
      parallel_for(100, 4, [](std::size_t i) {
        if (i == 17 || i == 80) throw Error(ErrorKind::kDegenerateInput, "item " + std::to_string(i));
      });
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("item 17") != std::string::npos);
    }
  }
}
