// Copyright 2026 The tsnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Non-leaky integrate-and-fire neuron with exponentially decaying synaptic
// current, tau = threshold = 1:
//
//   dv/dt = sum_i w_i * u(t - t_i) * exp(-(t - t_i))
//
// In the z-domain (z = exp(t)) the firing time solves, over the causal set C
// of inputs that spike strictly before the output,
//
//   z_out = sum_{i in C} w_i z_i / (sum_{i in C} w_i - 1).
//
// C is found by growing it over inputs in ascending z order and accepting the
// first prefix whose candidate lands after its last member and no later than
// the next input.

#pragma once

#include <algorithm>
#include <span>
#include <utility>
#include <vector>

#include "tsnn/common.hpp"

namespace tsnn {

template <typename Scalar>
struct NeuronSolveResult {
  Scalar z_out = no_spike<Scalar>();
  int causal_set_size = 0;
  Scalar denominator = 0;  // sum of causal weights minus 1
  std::vector<int> causal;  // input indices, in firing order

  bool fired() const { return is_spike(z_out); }
};

// Present inputs of one neuron (or one receptive field) in firing order;
// ties in z are broken by index.
template <typename Scalar>
struct SortedInputs {
  std::vector<Scalar> z;
  std::vector<int> index;

  void clear() {
    z.clear();
    index.clear();
  }
  int size() const { return static_cast<int>(z.size()); }
};

namespace internal {

template <typename Scalar>
struct ZIndex {
  Scalar z;
  int index;
  bool operator<(const ZIndex& o) const {
    return z < o.z || (z == o.z && index < o.index);
  }
};

}  // namespace internal

// Sorts the present entries of z (finite values) into `out`. `scratch` is
// reused across calls to avoid reallocating.
template <typename Scalar, typename ZLookup>
void sort_present(int n, ZLookup&& z_at, SortedInputs<Scalar>& out,
                  std::vector<internal::ZIndex<Scalar>>& scratch) {
  scratch.clear();
  for (int i = 0; i < n; ++i) {
    const Scalar z = z_at(i);
    if (is_spike(z)) scratch.push_back({z, i});
  }
  std::sort(scratch.begin(), scratch.end());
  out.z.resize(scratch.size());
  out.index.resize(scratch.size());
  for (std::size_t k = 0; k < scratch.size(); ++k) {
    out.z[k] = scratch[k].z;
    out.index[k] = scratch[k].index;
  }
}

// Causal-set scan over pre-sorted inputs. `weight_at(local_index)` returns the
// weight of the input whose index is stored in `sorted.index`. Returns the
// output z (or no_spike), and writes the causal-set size and denominator.
template <typename Scalar, typename WeightLookup>
Scalar scan_causal_set(const SortedInputs<Scalar>& sorted, WeightLookup&& weight_at,
                       Scalar epsilon_denom, int* causal_size, Scalar* denominator) {
  Scalar sum_w = 0;
  Scalar sum_wz = 0;
  const int n = sorted.size();
  for (int m = 0; m < n; ++m) {
    const Scalar z = sorted.z[static_cast<std::size_t>(m)];
    const Scalar w = weight_at(sorted.index[static_cast<std::size_t>(m)]);
    sum_w += w;
    sum_wz += w * z;
    const Scalar d = sum_w - Scalar(1);
    if (!(d > epsilon_denom)) continue;
    // candidate = sum_wz / d; compared in multiplied form since d > 0.
    if (sum_wz > d * z &&
        (m + 1 == n || sum_wz <= d * sorted.z[static_cast<std::size_t>(m + 1)])) {
      *causal_size = m + 1;
      *denominator = d;
      return sum_wz / d;
    }
  }
  *causal_size = 0;
  *denominator = 0;
  return no_spike<Scalar>();
}

// Solves one neuron. z holds exp(t_i) for present inputs and +infinity for
// absent ones. Throws DomainError on a present z < 1 or a NaN weight.
template <typename ZDerived, typename WDerived>
NeuronSolveResult<typename ZDerived::Scalar> solve_neuron(
    const Eigen::MatrixBase<ZDerived>& z, const Eigen::MatrixBase<WDerived>& w,
    typename ZDerived::Scalar epsilon_denom = typename ZDerived::Scalar(kDefaultEpsilonDenom)) {
  using Scalar = typename ZDerived::Scalar;
  if (z.size() != w.size()) throw ShapeError("solve_neuron: z and w differ in length");
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (isnan(z(i)) || z(i) < Scalar(1)) {
      throw DomainError("solve_neuron: present input with z < 1");
    }
    if (isnan(w(i))) throw DomainError("solve_neuron: NaN weight");
  }
  SortedInputs<Scalar> sorted;
  std::vector<internal::ZIndex<Scalar>> scratch;
  sort_present<Scalar>(static_cast<int>(z.size()),
                       [&](int i) { return Scalar(z(i)); }, sorted, scratch);
  NeuronSolveResult<Scalar> r;
  r.z_out = scan_causal_set<Scalar>(
      sorted, [&](int i) { return Scalar(w(i)); }, epsilon_denom,
      &r.causal_set_size, &r.denominator);
  r.causal.assign(sorted.index.begin(), sorted.index.begin() + r.causal_set_size);
  return r;
}

struct OdeSimConfig {
  double tau = 1.0;
  double theta = 1.0;
  double dt = 1e-4;
  double t_max = 50.0;

  void validate() const;
};

// Reference time-stepping simulation of the membrane equation. Each step
// integrates the decaying synaptic current exactly over dt and the threshold
// crossing is located by linear interpolation inside the step. Absent inputs
// are +infinity. Returns the first crossing time, or kNoSpike by t_max.
double simulate_ode(std::span<const double> input_times,
                    std::span<const double> weights, const OdeSimConfig& config);

}  // namespace tsnn
