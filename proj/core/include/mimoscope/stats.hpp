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

#include <cstddef>
#include <functional>
#include <optional>
#include <span>

namespace mimoscope {

/// Recursive pairwise summation; result depends only on the values and
/// their order.
double pairwise_sum(std::span<const double> values);

double mean_of(std::span<const double> values);

/// Sample standard deviation over sqrt(n); 0 for fewer than two values.
double standard_error(std::span<const double> values);

/// 10 log10(x) for power quantities; nullopt when x is below the 1e-15 floor.
std::optional<double> power_to_db(double linear);

inline constexpr double kDbFloor = 1e-15;

/// Runs body(i) for i in [0, count) on up to `threads` workers
/// (0 = hardware concurrency). body must write only to slot i of its output.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

unsigned resolve_threads(unsigned requested);

}  // namespace mimoscope
