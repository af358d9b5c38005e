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

// Spiking layers over z = exp(t) values. Fully-connected and convolutional
// layers solve every output neuron with the causal-set rule from neuron.hpp;
// convolutions share one kernel per output channel and use "same" padding,
// where padded positions are inputs that never spike. Pooling works on z
// directly: average pooling takes the window mean with non-spiking inputs
// counted as z_max, and max pooling keeps the earliest spike.
//
// Everything here is templated on the scalar so the same network can be
// evaluated in extended precision (see grad_check).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsnn/common.hpp"
#include "tsnn/neuron.hpp"

namespace tsnn {

enum class LayerKind : std::uint32_t {
  kDense = 1,
  kConv = 2,
  kAvgPool = 3,
  kMaxPool = 4,
};

const char* to_string(LayerKind kind);

template <typename Scalar>
struct BasicLayer {
  LayerKind kind = LayerKind::kDense;
  Shape in;
  Shape out;
  int kernel = 0;  // conv kernel side or pooling window side
  int stride = 1;
  int pad_top = 0;
  int pad_left = 0;
  // Dense: out.size() x in.size(). Conv: out.channels x (kernel^2 * in.channels),
  // columns ordered (ky, kx, c). Pooling: empty.
  MatrixX<Scalar> weights;

  static BasicLayer dense(Shape in, int units) {
    BasicLayer l;
    l.kind = LayerKind::kDense;
    l.in = in;
    l.out = {1, 1, units};
    l.weights = MatrixX<Scalar>::Zero(units, in.size());
    return l;
  }

  static BasicLayer conv(Shape in, int kernel, int filters, int stride) {
    if (kernel < 1 || stride < 1 || filters < 1) throw ShapeError("bad conv geometry");
    BasicLayer l;
    l.kind = LayerKind::kConv;
    l.in = in;
    l.kernel = kernel;
    l.stride = stride;
    const int out_h = (in.height + stride - 1) / stride;
    const int out_w = (in.width + stride - 1) / stride;
    l.pad_top = std::max((out_h - 1) * stride + kernel - in.height, 0) / 2;
    l.pad_left = std::max((out_w - 1) * stride + kernel - in.width, 0) / 2;
    l.out = {out_h, out_w, filters};
    l.weights = MatrixX<Scalar>::Zero(filters, kernel * kernel * in.channels);
    return l;
  }

  static BasicLayer pool(LayerKind kind, Shape in, int window = 2, int stride = 2) {
    if (kind != LayerKind::kAvgPool && kind != LayerKind::kMaxPool) {
      throw ShapeError("pool() needs a pooling kind");
    }
    if (window < 1 || stride < 1 || in.height < window || in.width < window) {
      throw ShapeError("pooling window larger than input");
    }
    BasicLayer l;
    l.kind = kind;
    l.in = in;
    l.kernel = window;
    l.stride = stride;
    l.out = {(in.height - window) / stride + 1, (in.width - window) / stride + 1,
             in.channels};
    return l;
  }

  bool has_weights() const {
    return kind == LayerKind::kDense || kind == LayerKind::kConv;
  }

  // Checks that shapes and weight dimensions agree; throws ShapeError.
  void validate() const {
    if (in.size() <= 0 || out.size() <= 0) throw ShapeError("empty layer shape");
    switch (kind) {
      case LayerKind::kDense:
        if (out.height != 1 || out.width != 1 || weights.rows() != out.size() ||
            weights.cols() != in.size()) {
          throw ShapeError("dense layer weights do not match its shape");
        }
        break;
      case LayerKind::kConv: {
        const auto expect = conv(in, kernel, out.channels, stride);
        if (expect.out != out || expect.pad_top != pad_top ||
            expect.pad_left != pad_left || weights.rows() != out.channels ||
            weights.cols() != kernel * kernel * in.channels) {
          throw ShapeError("conv layer weights do not match its shape");
        }
        break;
      }
      case LayerKind::kAvgPool:
      case LayerKind::kMaxPool: {
        const auto expect = pool(kind, in, kernel, stride);
        if (expect.out != out || weights.size() != 0) {
          throw ShapeError("pooling layer shape is inconsistent");
        }
        break;
      }
      default:
        throw ShapeError("unknown layer kind");
    }
  }

  template <typename T>
  BasicLayer<T> cast() const {
    BasicLayer<T> l;
    l.kind = kind;
    l.in = in;
    l.out = out;
    l.kernel = kernel;
    l.stride = stride;
    l.pad_top = pad_top;
    l.pad_left = pad_left;
    l.weights = weights.template cast<T>();
    return l;
  }
};

template <typename Scalar>
struct BasicNetwork {
  std::string preset;
  Shape input;
  std::vector<BasicLayer<Scalar>> layers;
  Scalar z_max = Scalar(kDefaultZMax);
  Scalar epsilon_denom = Scalar(kDefaultEpsilonDenom);

  int num_classes() const { return layers.empty() ? 0 : layers.back().out.size(); }
  Shape output_shape() const { return layers.empty() ? input : layers.back().out; }

  std::size_t num_weights() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weights.size());
    return n;
  }

  // Appends a layer fed by the current output shape.
  BasicNetwork& add_dense(int units) {
    layers.push_back(BasicLayer<Scalar>::dense(output_shape(), units));
    return *this;
  }
  BasicNetwork& add_conv(int kernel, int filters, int stride) {
    layers.push_back(BasicLayer<Scalar>::conv(output_shape(), kernel, filters, stride));
    return *this;
  }
  BasicNetwork& add_pool(LayerKind kind, int window = 2, int stride = 2) {
    layers.push_back(BasicLayer<Scalar>::pool(kind, output_shape(), window, stride));
    return *this;
  }

  void validate() const {
    if (layers.empty()) throw ShapeError("network has no layers");
    Shape s = input;
    for (const auto& l : layers) {
      if (l.in != s) throw ShapeError("adjacent layer shapes do not match");
      l.validate();
      s = l.out;
    }
    if (!(z_max > 0) || !(epsilon_denom >= 0)) {
      throw DomainError("network z_max / epsilon_denom out of range");
    }
  }

  template <typename T>
  BasicNetwork<T> cast() const {
    BasicNetwork<T> n;
    n.preset = preset;
    n.input = input;
    n.z_max = T(z_max);
    n.epsilon_denom = T(epsilon_denom);
    for (const auto& l : layers) n.layers.push_back(l.template cast<T>());
    return n;
  }

  friend bool operator==(const BasicNetwork& a, const BasicNetwork& b) {
    if (a.preset != b.preset || a.input != b.input || a.z_max != b.z_max ||
        a.epsilon_denom != b.epsilon_denom || a.layers.size() != b.layers.size()) {
      return false;
    }
    for (std::size_t i = 0; i < a.layers.size(); ++i) {
      const auto& x = a.layers[i];
      const auto& y = b.layers[i];
      if (x.kind != y.kind || x.in != y.in || x.out != y.out || x.kernel != y.kernel ||
          x.stride != y.stride || x.pad_top != y.pad_top ||
          x.pad_left != y.pad_left || x.weights.rows() != y.weights.rows() ||
          x.weights.cols() != y.weights.cols() || x.weights != y.weights) {
        return false;
      }
    }
    return true;
  }
};

using Layer = BasicLayer<double>;
using Network = BasicNetwork<double>;

// What backward() needs from one layer's forward pass.
template <typename Scalar>
struct LayerTrace {
  VectorX<Scalar> z_out;
  // Weighted layers: the present inputs of each receptive field in firing
  // order (one field for dense layers, one per output position for conv).
  // field_col is the weight column; for dense layers it is the input index.
  std::vector<int> field_offset;
  std::vector<Scalar> field_z;
  std::vector<int> field_col;
  std::vector<int> causal_size;     // per output neuron
  VectorX<Scalar> denominator;      // per output neuron
  std::vector<int> winner;          // max pooling: chosen input or -1
};

template <typename Scalar>
struct NetworkTrace {
  std::vector<LayerTrace<Scalar>> layers;

  const VectorX<Scalar>& output() const { return layers.back().z_out; }
};

namespace internal {

template <typename Scalar>
struct ForwardScratch {
  SortedInputs<Scalar> sorted;
  std::vector<ZIndex<Scalar>> order;
};

// Global input index of weight column `col` at conv output position (oy, ox).
template <typename Scalar>
int conv_input_index(const BasicLayer<Scalar>& l, int oy, int ox, int col) {
  const int kc = l.kernel * l.in.channels;
  const int ky = col / kc;
  const int rem = col % kc;
  const int kx = rem / l.in.channels;
  const int c = rem % l.in.channels;
  return l.in.index(oy * l.stride - l.pad_top + ky, ox * l.stride - l.pad_left + kx, c);
}

template <typename Scalar>
void append_field(LayerTrace<Scalar>& trace, const SortedInputs<Scalar>& sorted) {
  trace.field_z.insert(trace.field_z.end(), sorted.z.begin(), sorted.z.end());
  trace.field_col.insert(trace.field_col.end(), sorted.index.begin(), sorted.index.end());
  trace.field_offset.push_back(static_cast<int>(trace.field_z.size()));
}

}  // namespace internal

// Runs one layer. z_in must match layer.in; present values must be >= 1.
// When `trace` is non-null it receives what backward() needs.
template <typename Scalar>
VectorX<Scalar> forward_layer(const BasicLayer<Scalar>& layer,
                              const Eigen::Ref<const VectorX<Scalar>>& z_in,
                              Scalar z_max, Scalar epsilon_denom,
                              LayerTrace<Scalar>* trace = nullptr) {
  if (z_in.size() != layer.in.size()) {
    throw ShapeError("layer input has " + std::to_string(z_in.size()) +
                     " values, expected " + std::to_string(layer.in.size()));
  }
  const int n_out = layer.out.size();
  VectorX<Scalar> z_out = VectorX<Scalar>::Constant(n_out, no_spike<Scalar>());
  LayerTrace<Scalar> local;
  LayerTrace<Scalar>& t = trace ? *trace : local;
  t.field_offset.assign(1, 0);
  t.field_z.clear();
  t.field_col.clear();
  t.winner.clear();
  internal::ForwardScratch<Scalar> scratch;

  switch (layer.kind) {
    case LayerKind::kDense: {
      if (layer.weights.hasNaN()) throw DomainError("NaN weight in dense layer");
      t.causal_size.assign(static_cast<std::size_t>(n_out), 0);
      t.denominator = VectorX<Scalar>::Zero(n_out);
      sort_present<Scalar>(layer.in.size(), [&](int i) { return z_in[i]; },
                           scratch.sorted, scratch.order);
      internal::append_field(t, scratch.sorted);
      for (int j = 0; j < n_out; ++j) {
        const auto row = layer.weights.row(j);
        z_out[j] = scan_causal_set<Scalar>(
            scratch.sorted, [&](int i) { return row[i]; }, epsilon_denom,
            &t.causal_size[static_cast<std::size_t>(j)], &t.denominator[j]);
      }
      break;
    }
    case LayerKind::kConv: {
      if (layer.weights.hasNaN()) throw DomainError("NaN weight in conv layer");
      t.causal_size.assign(static_cast<std::size_t>(n_out), 0);
      t.denominator = VectorX<Scalar>::Zero(n_out);
      // Sort the whole input once and deal it out to the receptive fields.
      // Within a field, weight columns increase with the input index, so
      // every field ends up sorted by (z, column).
      sort_present<Scalar>(layer.in.size(), [&](int i) { return z_in[i]; },
                           scratch.sorted, scratch.order);
      const int k = layer.kernel;
      const int s = layer.stride;
      const int channels = layer.in.channels;
      const int n_fields = layer.out.height * layer.out.width;
      std::vector<SortedInputs<Scalar>> fields(static_cast<std::size_t>(n_fields));
      for (int q = 0; q < scratch.sorted.size(); ++q) {
        const Scalar z = scratch.sorted.z[static_cast<std::size_t>(q)];
        const int i = scratch.sorted.index[static_cast<std::size_t>(q)];
        const int c = i % channels;
        const int iy = i / channels / layer.in.width + layer.pad_top;
        const int ix = i / channels % layer.in.width + layer.pad_left;
        const int oy_lo = iy - k + 1 > 0 ? (iy - k + s) / s : 0;
        const int ox_lo = ix - k + 1 > 0 ? (ix - k + s) / s : 0;
        const int oy_hi = std::min(iy / s, layer.out.height - 1);
        const int ox_hi = std::min(ix / s, layer.out.width - 1);
        for (int oy = oy_lo; oy <= oy_hi; ++oy) {
          for (int ox = ox_lo; ox <= ox_hi; ++ox) {
            auto& f = fields[static_cast<std::size_t>(oy * layer.out.width + ox)];
            f.z.push_back(z);
            f.index.push_back(((iy - oy * s) * k + (ix - ox * s)) * channels + c);
          }
        }
      }
      for (int oy = 0; oy < layer.out.height; ++oy) {
        for (int ox = 0; ox < layer.out.width; ++ox) {
          const auto& sorted = fields[static_cast<std::size_t>(oy * layer.out.width + ox)];
          internal::append_field(t, sorted);
          for (int f = 0; f < layer.out.channels; ++f) {
            const int j = layer.out.index(oy, ox, f);
            const auto row = layer.weights.row(f);
            z_out[j] = scan_causal_set<Scalar>(
                sorted, [&](int col) { return row[col]; }, epsilon_denom,
                &t.causal_size[static_cast<std::size_t>(j)], &t.denominator[j]);
          }
        }
      }
      break;
    }
    case LayerKind::kAvgPool:
    case LayerKind::kMaxPool: {
      const bool avg = layer.kind == LayerKind::kAvgPool;
      const int k = layer.kernel;
      const Scalar area = Scalar(k * k);
      if (!avg) t.winner.assign(static_cast<std::size_t>(n_out), -1);
      for (int oy = 0; oy < layer.out.height; ++oy) {
        for (int ox = 0; ox < layer.out.width; ++ox) {
          for (int c = 0; c < layer.out.channels; ++c) {
            Scalar sum = 0;
            Scalar best = no_spike<Scalar>();
            int best_i = -1;
            int present = 0;
            for (int ky = 0; ky < k; ++ky) {
              for (int kx = 0; kx < k; ++kx) {
                const int i = layer.in.index(oy * layer.stride + ky,
                                             ox * layer.stride + kx, c);
                const Scalar z = z_in[i];
                if (is_spike(z)) {
                  ++present;
                  sum += z;
                  if (z < best) best = z, best_i = i;
                } else {
                  sum += z_max;
                }
              }
            }
            const int j = layer.out.index(oy, ox, c);
            if (present == 0) continue;
            if (avg) {
              z_out[j] = sum / area;
            } else {
              z_out[j] = best;
              t.winner[static_cast<std::size_t>(j)] = best_i;
            }
          }
        }
      }
      break;
    }
  }
  t.z_out = z_out;
  return z_out;
}

// Checks the network input: right length, present values >= 1.
template <typename Scalar>
void check_network_input(const BasicNetwork<Scalar>& net,
                         const Eigen::Ref<const VectorX<Scalar>>& z_in) {
  if (z_in.size() != net.input.size()) {
    throw ShapeError("input has " + std::to_string(z_in.size()) +
                     " values, network expects " + std::to_string(net.input.size()));
  }
  for (Eigen::Index i = 0; i < z_in.size(); ++i) {
    if (isnan(z_in[i]) || z_in[i] < Scalar(1)) {
      throw DomainError("input z below 1 (negative spike time)");
    }
  }
}

template <typename Scalar>
void forward_trace(const BasicNetwork<Scalar>& net,
                   const Eigen::Ref<const VectorX<Scalar>>& z_in,
                   NetworkTrace<Scalar>& trace) {
  check_network_input(net, z_in);
  trace.layers.resize(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    if (l == 0) {
      forward_layer<Scalar>(net.layers[l], z_in, net.z_max, net.epsilon_denom,
                            &trace.layers[l]);
    } else {
      forward_layer<Scalar>(net.layers[l], trace.layers[l - 1].z_out, net.z_max,
                            net.epsilon_denom, &trace.layers[l]);
    }
  }
}

template <typename Scalar>
VectorX<Scalar> forward_network(const BasicNetwork<Scalar>& net,
                                const Eigen::Ref<const VectorX<Scalar>>& z_in) {
  NetworkTrace<Scalar> trace;
  forward_trace(net, z_in, trace);
  return trace.output();
}

// Earliest output spike wins; non-spiking outputs rank as z_max and ties go
// to the lowest index.
template <typename Derived>
int classify(const Eigen::MatrixBase<Derived>& z_out,
             typename Derived::Scalar z_max =
                 typename Derived::Scalar(kDefaultZMax)) {
  using Scalar = typename Derived::Scalar;
  int best = 0;
  Scalar best_z = no_spike<Scalar>();
  for (Eigen::Index i = 0; i < z_out.size(); ++i) {
    const Scalar z = is_spike(z_out(i)) ? Scalar(z_out(i)) : z_max;
    if (z < best_z) {
      best_z = z;
      best = static_cast<int>(i);
    }
  }
  return best;
}

// Weight gradients, one matrix per layer (empty for pooling layers).
template <typename Scalar>
struct Gradients {
  std::vector<MatrixX<Scalar>> weights;
  std::size_t clamped = 0;  // denominators clamped to epsilon_denom

  static Gradients zeros_like(const BasicNetwork<Scalar>& net) {
    Gradients g;
    for (const auto& l : net.layers) {
      g.weights.push_back(MatrixX<Scalar>::Zero(l.weights.rows(), l.weights.cols()));
    }
    return g;
  }

  void set_zero() {
    for (auto& w : weights) w.setZero();
    clamped = 0;
  }
};

// Propagates dL/dz_out through one layer, accumulating weight gradients into
// grad_w and returning dL/dz_in. For a spiking neuron j with causal set C and
// d = sum_C w - 1: dz_j/dz_i = w_i / d and dz_j/dw_i = (z_i - z_j) / d.
// Neurons that do not fire pass no gradient.
template <typename Scalar>
VectorX<Scalar> backward_layer(const BasicLayer<Scalar>& layer,
                               const LayerTrace<Scalar>& trace,
                               const Eigen::Ref<const VectorX<Scalar>>& z_in,
                               const Eigen::Ref<const VectorX<Scalar>>& grad_out,
                               Scalar epsilon_denom, MatrixX<Scalar>& grad_w,
                               std::size_t* clamped) {
  VectorX<Scalar> grad_in = VectorX<Scalar>::Zero(layer.in.size());
  auto denom = [&](int j) {
    Scalar d = trace.denominator[j];
    if (!(abs(d) > epsilon_denom)) {
      if (clamped) ++*clamped;
      d = epsilon_denom;
    }
    return d;
  };

  switch (layer.kind) {
    case LayerKind::kDense: {
      const int begin = trace.field_offset[0];
      for (int j = 0; j < layer.out.size(); ++j) {
        const Scalar g = grad_out[j];
        const Scalar zj = trace.z_out[j];
        if (g == Scalar(0) || !is_spike(zj)) continue;
        const Scalar d = denom(j);
        const int m = trace.causal_size[static_cast<std::size_t>(j)];
        for (int q = 0; q < m; ++q) {
          const auto k = static_cast<std::size_t>(begin + q);
          const int i = trace.field_col[k];
          grad_in[i] += g * layer.weights(j, i) / d;
          grad_w(j, i) += g * (trace.field_z[k] - zj) / d;
        }
      }
      break;
    }
    case LayerKind::kConv: {
      int field = 0;
      for (int oy = 0; oy < layer.out.height; ++oy) {
        for (int ox = 0; ox < layer.out.width; ++ox, ++field) {
          const int begin = trace.field_offset[static_cast<std::size_t>(field)];
          for (int f = 0; f < layer.out.channels; ++f) {
            const int j = layer.out.index(oy, ox, f);
            const Scalar g = grad_out[j];
            const Scalar zj = trace.z_out[j];
            if (g == Scalar(0) || !is_spike(zj)) continue;
            const Scalar d = denom(j);
            const int m = trace.causal_size[static_cast<std::size_t>(j)];
            for (int q = 0; q < m; ++q) {
              const auto k = static_cast<std::size_t>(begin + q);
              const int col = trace.field_col[k];
              const int i = internal::conv_input_index(layer, oy, ox, col);
              grad_in[i] += g * layer.weights(f, col) / d;
              grad_w(f, col) += g * (trace.field_z[k] - zj) / d;
            }
          }
        }
      }
      break;
    }
    case LayerKind::kAvgPool: {
      const int k = layer.kernel;
      const Scalar area = Scalar(k * k);
      for (int oy = 0; oy < layer.out.height; ++oy) {
        for (int ox = 0; ox < layer.out.width; ++ox) {
          for (int c = 0; c < layer.out.channels; ++c) {
            const int j = layer.out.index(oy, ox, c);
            if (grad_out[j] == Scalar(0) || !is_spike(trace.z_out[j])) continue;
            for (int ky = 0; ky < k; ++ky) {
              for (int kx = 0; kx < k; ++kx) {
                const int i = layer.in.index(oy * layer.stride + ky,
                                             ox * layer.stride + kx, c);
                if (is_spike(z_in[i])) grad_in[i] += grad_out[j] / area;
              }
            }
          }
        }
      }
      break;
    }
    case LayerKind::kMaxPool: {
      for (int j = 0; j < layer.out.size(); ++j) {
        const int w = trace.winner[static_cast<std::size_t>(j)];
        if (w >= 0) grad_in[w] += grad_out[j];
      }
      break;
    }
  }
  return grad_in;
}

// Backpropagates dL/dz of the network output through a recorded forward pass.
template <typename Scalar>
void backward_network(const BasicNetwork<Scalar>& net,
                      const Eigen::Ref<const VectorX<Scalar>>& z_in,
                      const NetworkTrace<Scalar>& trace,
                      const Eigen::Ref<const VectorX<Scalar>>& grad_output,
                      Gradients<Scalar>& grads) {
  VectorX<Scalar> g = grad_output;
  for (std::size_t l = net.layers.size(); l-- > 0;) {
    if (l == 0) {
      g = backward_layer<Scalar>(net.layers[l], trace.layers[l], z_in, g,
                                 net.epsilon_denom, grads.weights[l], &grads.clamped);
    } else {
      g = backward_layer<Scalar>(net.layers[l], trace.layers[l], trace.layers[l - 1].z_out,
                                 g, net.epsilon_denom, grads.weights[l], &grads.clamped);
    }
  }
}

}  // namespace tsnn
