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

#pragma once

// Random inputs for tests, drawn from the standard library engine so they
// stay independent of the library's own generator.

#include <Eigen/Dense>
#include <doctest.h>
#include <complex>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "mimoscope/error.hpp"
#include "mimoscope/linalg.hpp"
#include "mimoscope/tensor.hpp"

namespace fixture {

using mimoscope::CMatrix;
using mimoscope::Complex;

class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  double normal() { return gauss_(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  Complex complex_normal() { return {normal() * std::sqrt(0.5), normal() * std::sqrt(0.5)}; }

  CMatrix gaussian(Eigen::Index rows, Eigen::Index cols) {
    CMatrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = complex_normal();
    return m;
  }

  CMatrix hermitian(Eigen::Index n) {
    const CMatrix a = gaussian(n, n);
    return 0.5 * (a + a.adjoint());
  }

  /// M x p matrix with orthonormal columns spanning a uniformly random subspace.
  CMatrix orthonormal(Eigen::Index m, Eigen::Index p) {
    Eigen::HouseholderQR<CMatrix> qr(gaussian(m, p));
    return qr.householderQ() * CMatrix::Identity(m, p);
  }

  CMatrix unitary(Eigen::Index n) { return orthonormal(n, n); }

  mimoscope::ChannelTensor tensor(std::size_t n, std::size_t f, std::size_t m, double scale = 1.0,
                                  std::string id = "t") {
    std::vector<Complex> data(n * f * m);
    for (auto& x : data) x = scale * complex_normal();
    return {std::move(id), n, f, m, std::move(data)};
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> gauss_;
};

/// Kind of the mimoscope::Error thrown by fn; fails the test if none is thrown.
template <class Fn>
mimoscope::ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const mimoscope::Error& e) {
    return e.kind();
  }
  FAIL("expected a mimoscope::Error");
  return mimoscope::ErrorKind::kInvalidInput;
}

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("mimoscope-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

inline mimoscope::ChannelTensor constant_tensor(std::size_t n, std::size_t f, std::size_t m, Complex value,
                                                std::string id = "c") {
  return {std::move(id), n, f, m, std::vector<Complex>(n * f * m, value)};
}

}  // namespace fixture
