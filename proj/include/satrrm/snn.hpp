#pragma once

#include <cstdint>
#include <vector>

#include "satrrm/encoding.hpp"

// Discrete-time spiking network, fully connected layers, trained with
// backpropagation through time using a surrogate spike derivative.
//
// Neuron recursion per layer (state zeroed at t = 0, s_0 = 0):
//   i_t = lambda_syn * i_{t-1} + W * x_t          (x_t: presynaptic spikes)
//   u_t = lambda_mem * u_{t-1} * (1 - s_{t-1}) + i_t   (multiplicative reset)
//   s_t = step(u_t - threshold), step(0) = 1
// with lambda = 1 - 1/tau. The backward pass replaces d(step)/du by the
// exponential surrogate (1/a) exp(-|u - threshold|/a) and differentiates the
// reset path too. Relaxed mode swaps step() for sigmoid((u - threshold)/a) in
// BOTH directions, making the whole computation smooth so the analytic
// gradient can be checked against finite differences.
//
// Seeds: same seed + threads=1 reproduces training bit-exactly. With k > 1
// threads minibatch gradients are accumulated per thread and merged in thread
// order, so results are deterministic per thread count.

namespace satrrm::snn {

struct NeuronParams {
  double tau_syn = 2.0;  // steps
  double tau_mem = 4.0;
  double threshold = 1.0;
  double surrogate_width = 1.0;

  double lambda_syn() const { return 1.0 - 1.0 / tau_syn; }
  double lambda_mem() const { return 1.0 - 1.0 / tau_mem; }
  void validate() const;
};

struct LayeredSnn {
  std::vector<int> sizes;                    // [N_in, hidden..., Z]
  std::vector<std::vector<double>> weights;  // per layer, row-major out x in
  std::vector<NeuronParams> neuron;          // per weight layer

  int n_layers() const { return static_cast<int>(weights.size()); }
  std::size_t param_count() const;
  void validate() const;
};

// Fan-in-scaled uniform init: w ~ U(-1,1)/sqrt(fan_in), layer streams seeded
// independently from `seed`.
LayeredSnn make_network(const std::vector<int>& sizes, const NeuronParams& np,
                        std::uint64_t seed);

struct RunStats {
  // spikes[l][t]: spike count of layer l (0 = input raster) at step t.
  std::vector<std::vector<std::uint64_t>> spikes;
  std::uint64_t synops = 0;         // sum over spikes of the emitting layer's fan-out
  std::uint64_t neuron_updates = 0; // simulated neurons (hidden+output) x steps
  double seconds = 0.0;
};

// Spiking forward pass; optionally records stats and per-layer output rasters
// (layer_rasters[l] = raster of layer l+1's spikes).
encoding::SpikeRaster forward(const LayeredSnn& net, const encoding::SpikeRaster& input,
                              RunStats* stats = nullptr,
                              std::vector<encoding::SpikeRaster>* layer_rasters = nullptr);

// argmax of output spike counts, ties to the lowest index.
int predict(const encoding::SpikeRaster& output);

// L = 1/2 sum_k (rate_k - target_k)^2, rate_k = count_k / T,
// target = rho for the labeled neuron, rho_f for the others.
double spike_rate_loss(const encoding::SpikeRaster& output, int label, double rho,
                       double rho_f);

enum class GradMode { kSpiking, kRelaxed };

using Grads = std::vector<std::vector<double>>;  // same shapes as weights

Grads zero_grads(const LayeredSnn& net);

// Loss of one example; accumulates dL/dW into grads (+=). In relaxed mode the
// returned loss is the smooth surrogate loss that relaxed_loss computes.
double example_grad(const LayeredSnn& net, const encoding::SpikeRaster& input, int label,
                    double rho, double rho_f, GradMode mode, Grads* grads);

// Smooth forward-only loss for finite differencing.
double relaxed_loss(const LayeredSnn& net, const encoding::SpikeRaster& input, int label,
                    double rho, double rho_f);

struct TrainHyper {
  double rho = 0.5;
  double rho_f = 0.01;
  int epochs = 30;
  int batch = 32;
  double lr = 1e-3;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;  // adaptive-moment optimizer
  std::uint64_t seed = 1;
  int threads = 1;
  void validate() const;
};

struct EncodedDataset {
  std::vector<encoding::SpikeRaster> rasters;
  std::vector<int> labels;
  std::vector<std::size_t> train_idx, val_idx;
  int n_classes = 0;
  std::size_t n() const { return labels.size(); }
  void validate() const;
};

struct EpochStats {
  double train_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
};

// Minibatch surrogate-gradient training. Throws std::runtime_error with a
// diagnostic if the loss goes non-finite.
TrainHistory train(LayeredSnn& net, const EncodedDataset& data, const TrainHyper& hyper);

double validation_accuracy(const LayeredSnn& net, const EncodedDataset& data, int threads = 1);

}  // namespace satrrm::snn
