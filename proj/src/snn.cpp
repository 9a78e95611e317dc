#include "satrrm/snn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "satrrm/common.hpp"
#include "satrrm/parallel.hpp"
#include "satrrm/rng.hpp"

namespace satrrm::snn {

namespace {

constexpr std::uint64_t kInitSalt = 0x1a6e57;
constexpr std::uint64_t kShuffleSalt = 0x7d31c2;

void matvec(const double* w, int n_out, int n_in, const double* x, double* out) {
  for (int k = 0; k < n_out; ++k) {
    const double* row = w + static_cast<std::size_t>(k) * n_in;
    double acc = 0.0;
    for (int j = 0; j < n_in; ++j) acc += row[j] * x[j];
    out[k] = acc;
  }
}

void matvec_t(const double* w, int n_out, int n_in, const double* y, double* out) {
  // out = W^T y, accumulated row by row so memory access stays sequential.
  std::fill(out, out + n_in, 0.0);
  for (int k = 0; k < n_out; ++k) {
    const double* row = w + static_cast<std::size_t>(k) * n_in;
    const double yk = y[k];
    if (yk == 0.0) continue;
    for (int j = 0; j < n_in; ++j) out[j] += row[j] * yk;
  }
}

// Per-layer state history, step-major ([t * n + k]).
struct LayerTrace {
  std::vector<double> u, s, dsdu;
};

void layer_forward(const double* w, int n_out, int n_in, const NeuronParams& np,
                   GradMode mode, const double* x, int steps, LayerTrace& tr) {
  const double ls = np.lambda_syn();
  const double lm = np.lambda_mem();
  const double th = np.threshold;
  const double a = np.surrogate_width;
  const std::size_t total = static_cast<std::size_t>(steps) * n_out;
  tr.u.assign(total, 0.0);
  tr.s.assign(total, 0.0);
  tr.dsdu.assign(total, 0.0);

  std::vector<double> cur(n_out, 0.0);
  std::vector<double> drive(n_out, 0.0);
  const double* s_prev = nullptr;
  const double* u_prev = nullptr;
  for (int t = 0; t < steps; ++t) {
    matvec(w, n_out, n_in, x + static_cast<std::size_t>(t) * n_in, drive.data());
    double* u_t = tr.u.data() + static_cast<std::size_t>(t) * n_out;
    double* s_t = tr.s.data() + static_cast<std::size_t>(t) * n_out;
    double* g_t = tr.dsdu.data() + static_cast<std::size_t>(t) * n_out;
    for (int k = 0; k < n_out; ++k) {
      cur[k] = ls * cur[k] + drive[k];
      double u = cur[k];
      if (t > 0) u += lm * u_prev[k] * (1.0 - s_prev[k]);
      u_t[k] = u;
      if (mode == GradMode::kSpiking) {
        s_t[k] = (u - th >= 0.0) ? 1.0 : 0.0;
        g_t[k] = std::exp(-std::abs(u - th) / a) / a;
      } else {
        const double s = 1.0 / (1.0 + std::exp(-(u - th) / a));
        s_t[k] = s;
        g_t[k] = s * (1.0 - s) / a;
      }
    }
    s_prev = s_t;
    u_prev = u_t;
  }
}

// Backward through one layer given dL/ds; accumulates dL/dW and fills dL/dx.
void layer_backward(const double* w, int n_out, int n_in, const NeuronParams& np,
                    const LayerTrace& tr, const double* x, int steps,
                    const std::vector<double>& dlds, double* dw,
                    std::vector<double>* dldx) {
  const double ls = np.lambda_syn();
  const double lm = np.lambda_mem();
  std::vector<double> du_next(n_out, 0.0);
  std::vector<double> di_next(n_out, 0.0);
  std::vector<double> du(n_out, 0.0);
  std::vector<double> di(n_out, 0.0);
  if (dldx) dldx->assign(static_cast<std::size_t>(steps) * n_in, 0.0);

  for (int t = steps - 1; t >= 0; --t) {
    const std::size_t off = static_cast<std::size_t>(t) * n_out;
    const double* u_t = tr.u.data() + off;
    const double* s_t = tr.s.data() + off;
    const double* g_t = tr.dsdu.data() + off;
    for (int k = 0; k < n_out; ++k) {
      // s_t feeds the next reset, u_t decays into u_{t+1} while not reset.
      const double ds_total = dlds[off + k] - lm * u_t[k] * du_next[k];
      du[k] = ds_total * g_t[k] + lm * (1.0 - s_t[k]) * du_next[k];
      di[k] = du[k] + ls * di_next[k];
    }
    const double* x_t = x + static_cast<std::size_t>(t) * n_in;
    for (int k = 0; k < n_out; ++k) {
      const double dik = di[k];
      if (dik == 0.0) continue;
      double* dw_row = dw + static_cast<std::size_t>(k) * n_in;
      for (int j = 0; j < n_in; ++j) dw_row[j] += dik * x_t[j];
    }
    if (dldx) matvec_t(w, n_out, n_in, di.data(), dldx->data() + static_cast<std::size_t>(t) * n_in);
    du_next.swap(du);
    di_next.swap(di);
  }
}

std::vector<double> raster_to_dense(const encoding::SpikeRaster& r) {
  // step-major to match the layer traces
  std::vector<double> x(static_cast<std::size_t>(r.steps) * r.neurons, 0.0);
  for (int n = 0; n < r.neurons; ++n)
    for (int t = 0; t < r.steps; ++t)
      if (r.get(n, t)) x[static_cast<std::size_t>(t) * r.neurons + n] = 1.0;
  return x;
}

struct ForwardResult {
  std::vector<LayerTrace> layers;
  double loss = 0.0;
  std::vector<double> rates;  // output layer
};

double run_trace(const LayeredSnn& net, const encoding::SpikeRaster& input, int label,
                 double rho, double rho_f, GradMode mode, std::vector<LayerTrace>& layers,
                 std::vector<double>* rates_out, const std::vector<double>& x0) {
  const int steps = input.steps;
  const int n_layers = net.n_layers();
  layers.resize(n_layers);
  const double* x = x0.data();
  for (int l = 0; l < n_layers; ++l) {
    layer_forward(net.weights[l].data(), net.sizes[l + 1], net.sizes[l], net.neuron[l],
                  mode, x, steps, layers[l]);
    x = layers[l].s.data();
  }
  const int z = net.sizes.back();
  std::vector<double> rates(z, 0.0);
  const auto& s_out = layers[n_layers - 1].s;
  for (int t = 0; t < steps; ++t)
    for (int k = 0; k < z; ++k) rates[k] += s_out[static_cast<std::size_t>(t) * z + k];
  for (int k = 0; k < z; ++k) rates[k] /= steps;

  double loss = 0.0;
  for (int k = 0; k < z; ++k) {
    const double target = (k == label) ? rho : rho_f;
    const double d = rates[k] - target;
    loss += 0.5 * d * d;
  }
  if (rates_out) *rates_out = rates;
  return loss;
}

}  // namespace

void NeuronParams::validate() const {
  if (!(tau_syn >= 1.0) || !(tau_mem >= 1.0))
    throw ConfigError("neuron time constants must be >= 1 step");
  if (!(threshold > 0.0)) throw ConfigError("neuron threshold must be positive");
  if (!(surrogate_width > 0.0)) throw ConfigError("surrogate width must be positive");
}

std::size_t LayeredSnn::param_count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += w.size();
  return n;
}

void LayeredSnn::validate() const {
  if (sizes.size() < 2) throw ConfigError("network needs at least input and output layers");
  for (int s : sizes)
    if (s <= 0) throw ConfigError("layer sizes must be positive");
  if (weights.size() + 1 != sizes.size() || neuron.size() != weights.size())
    throw ConfigError("weight/neuron layer count does not match sizes");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const std::size_t want =
        static_cast<std::size_t>(sizes[l + 1]) * static_cast<std::size_t>(sizes[l]);
    if (weights[l].size() != want)
      throw ConfigError("weight matrix " + std::to_string(l) + " has wrong shape");
    neuron[l].validate();
  }
}

LayeredSnn make_network(const std::vector<int>& sizes, const NeuronParams& np,
                        std::uint64_t seed) {
  LayeredSnn net;
  net.sizes = sizes;
  net.neuron.assign(sizes.size() - 1, np);
  net.weights.resize(sizes.size() - 1);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int n_in = sizes[l];
    const int n_out = sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(n_in));
    Rng rng(sample_seed(seed, l, kInitSalt));
    auto& w = net.weights[l];
    w.resize(static_cast<std::size_t>(n_out) * n_in);
    for (auto& v : w) v = (2.0 * rng.uniform01() - 1.0) * bound;
  }
  net.validate();
  return net;
}

encoding::SpikeRaster forward(const LayeredSnn& net, const encoding::SpikeRaster& input,
                              RunStats* stats, std::vector<encoding::SpikeRaster>* layer_rasters) {
  net.validate();
  if (input.neurons != net.sizes.front())
    throw std::invalid_argument("input raster size does not match network input layer");
  const auto t0 = std::chrono::steady_clock::now();
  const int steps = input.steps;
  const int n_layers = net.n_layers();

  if (stats) {
    stats->spikes.assign(n_layers + 1, std::vector<std::uint64_t>(steps, 0));
    stats->synops = 0;
    stats->neuron_updates = 0;
    for (int l = 1; l <= n_layers; ++l)
      stats->neuron_updates += static_cast<std::uint64_t>(net.sizes[l]) * steps;
  }
  if (layer_rasters) {
    layer_rasters->assign(n_layers, {});
    for (int l = 0; l < n_layers; ++l) (*layer_rasters)[l].resize(net.sizes[l + 1], steps);
  }

  std::vector<double> x = raster_to_dense(input);
  if (stats) {
    for (int t = 0; t < steps; ++t) {
      std::uint64_t c = 0;
      for (int n = 0; n < input.neurons; ++n)
        c += x[static_cast<std::size_t>(t) * input.neurons + n] != 0.0;
      stats->spikes[0][t] = c;
      stats->synops += c * static_cast<std::uint64_t>(net.sizes[1]);
    }
  }

  encoding::SpikeRaster out;
  LayerTrace tr;
  for (int l = 0; l < n_layers; ++l) {
    const int n_out = net.sizes[l + 1];
    layer_forward(net.weights[l].data(), n_out, net.sizes[l], net.neuron[l],
                  GradMode::kSpiking, x.data(), steps, tr);
    if (stats) {
      for (int t = 0; t < steps; ++t) {
        std::uint64_t c = 0;
        for (int k = 0; k < n_out; ++k)
          c += tr.s[static_cast<std::size_t>(t) * n_out + k] != 0.0;
        stats->spikes[l + 1][t] = c;
        if (l + 1 < n_layers)
          stats->synops += c * static_cast<std::uint64_t>(net.sizes[l + 2]);
      }
    }
    if (layer_rasters || l == n_layers - 1) {
      encoding::SpikeRaster r;
      r.resize(n_out, steps);
      for (int k = 0; k < n_out; ++k)
        for (int t = 0; t < steps; ++t)
          if (tr.s[static_cast<std::size_t>(t) * n_out + k] != 0.0) r.set(k, t);
      if (layer_rasters) (*layer_rasters)[l] = r;
      if (l == n_layers - 1) out = std::move(r);
    }
    x = std::move(tr.s);
  }
  if (stats)
    stats->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

int predict(const encoding::SpikeRaster& output) {
  if (output.neurons <= 0) throw std::invalid_argument("empty output raster");
  int best = 0;
  std::uint64_t best_count = output.row_count(0);
  for (int k = 1; k < output.neurons; ++k) {
    const std::uint64_t c = output.row_count(k);
    if (c > best_count) {
      best = k;
      best_count = c;
    }
  }
  return best;
}

double spike_rate_loss(const encoding::SpikeRaster& output, int label, double rho,
                       double rho_f) {
  if (label < 0 || label >= output.neurons) throw std::invalid_argument("label out of range");
  double loss = 0.0;
  for (int k = 0; k < output.neurons; ++k) {
    const double rate = static_cast<double>(output.row_count(k)) / output.steps;
    const double target = (k == label) ? rho : rho_f;
    loss += 0.5 * (rate - target) * (rate - target);
  }
  return loss;
}

Grads zero_grads(const LayeredSnn& net) {
  Grads g(net.weights.size());
  for (std::size_t l = 0; l < net.weights.size(); ++l)
    g[l].assign(net.weights[l].size(), 0.0);
  return g;
}

double example_grad(const LayeredSnn& net, const encoding::SpikeRaster& input, int label,
                    double rho, double rho_f, GradMode mode, Grads* grads) {
  if (input.neurons != net.sizes.front())
    throw std::invalid_argument("input raster size does not match network input layer");
  if (label < 0 || label >= net.sizes.back())
    throw std::invalid_argument("label out of range");
  const int steps = input.steps;
  const int n_layers = net.n_layers();
  const std::vector<double> x0 = raster_to_dense(input);

  std::vector<LayerTrace> layers;
  std::vector<double> rates;
  const double loss = run_trace(net, input, label, rho, rho_f, mode, layers, &rates, x0);

  const int z = net.sizes.back();
  std::vector<double> dlds(static_cast<std::size_t>(steps) * z);
  for (int k = 0; k < z; ++k) {
    const double target = (k == label) ? rho : rho_f;
    const double g = (rates[k] - target) / steps;
    for (int t = 0; t < steps; ++t) dlds[static_cast<std::size_t>(t) * z + k] = g;
  }

  std::vector<double> dldx;
  for (int l = n_layers - 1; l >= 0; --l) {
    const double* x = (l == 0) ? x0.data() : layers[l - 1].s.data();
    layer_backward(net.weights[l].data(), net.sizes[l + 1], net.sizes[l], net.neuron[l],
                   layers[l], x, steps, dlds, (*grads)[l].data(),
                   l > 0 ? &dldx : nullptr);
    if (l > 0) dlds = std::move(dldx);
  }
  return loss;
}

double relaxed_loss(const LayeredSnn& net, const encoding::SpikeRaster& input, int label,
                    double rho, double rho_f) {
  std::vector<LayerTrace> layers;
  const std::vector<double> x0 = raster_to_dense(input);
  return run_trace(net, input, label, rho, rho_f, GradMode::kRelaxed, layers, nullptr, x0);
}

void TrainHyper::validate() const {
  if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("target rate rho must be in (0, 1]");
  if (!(rho_f >= 0.0 && rho_f < rho))
    throw ConfigError("off-target rate rho_f must be in [0, rho)");
  if (epochs <= 0 || batch <= 0) throw ConfigError("epochs and batch size must be positive");
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0) || !(eps > 0.0))
    throw ConfigError("invalid optimizer moments");
}

void EncodedDataset::validate() const {
  if (rasters.size() != labels.size()) throw ConfigError("raster/label count mismatch");
  if (rasters.empty()) throw ConfigError("empty dataset");
  if (n_classes <= 0) throw ConfigError("dataset class count must be positive");
  const int neurons = rasters.front().neurons;
  const int steps = rasters.front().steps;
  for (const auto& r : rasters)
    if (r.neurons != neurons || r.steps != steps)
      throw ConfigError("all rasters must share one shape");
  for (int y : labels)
    if (y < 0 || y >= n_classes) throw ConfigError("label out of range");
  if (train_idx.empty()) throw ConfigError("empty training split");
  for (std::size_t i : train_idx)
    if (i >= rasters.size()) throw ConfigError("train index out of range");
  for (std::size_t i : val_idx)
    if (i >= rasters.size()) throw ConfigError("validation index out of range");
}

double validation_accuracy(const LayeredSnn& net, const EncodedDataset& data, int threads) {
  if (data.val_idx.empty()) return 0.0;
  const int parts = resolve_threads(threads);
  std::vector<std::uint64_t> correct(parts, 0);
  parallel_chunks(data.val_idx.size(), threads, [&](int part, std::size_t b, std::size_t e) {
    std::uint64_t c = 0;
    for (std::size_t i = b; i < e; ++i) {
      const std::size_t idx = data.val_idx[i];
      const auto out = forward(net, data.rasters[idx]);
      if (predict(out) == data.labels[idx]) ++c;
    }
    correct[part] = c;
  });
  std::uint64_t total = 0;
  for (auto c : correct) total += c;
  return static_cast<double>(total) / data.val_idx.size();
}

TrainHistory train(LayeredSnn& net, const EncodedDataset& data, const TrainHyper& hyper) {
  net.validate();
  data.validate();
  hyper.validate();
  if (data.rasters.front().neurons != net.sizes.front())
    throw ConfigError("dataset raster size does not match network input layer");
  if (data.n_classes != net.sizes.back())
    throw ConfigError("dataset class count does not match network output layer");

  const int n_layers = net.n_layers();
  const int parts = resolve_threads(hyper.threads);
  std::vector<Grads> thread_grads(parts, zero_grads(net));
  Grads grad = zero_grads(net);
  Grads m = zero_grads(net);
  Grads v = zero_grads(net);

  std::vector<std::size_t> order = data.train_idx;
  TrainHistory hist;
  std::uint64_t step = 0;

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    Rng shuffle_rng(sample_seed(hyper.seed, epoch, kShuffleSalt));
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += hyper.batch) {
      const std::size_t end = std::min(order.size(), begin + hyper.batch);
      const std::size_t batch_n = end - begin;
      std::vector<double> part_loss(parts, 0.0);
      parallel_chunks(batch_n, hyper.threads, [&](int part, std::size_t b, std::size_t e) {
        auto& g = thread_grads[part];
        double loss = 0.0;
        for (std::size_t i = b; i < e; ++i) {
          const std::size_t idx = order[begin + i];
          loss += example_grad(net, data.rasters[idx], data.labels[idx], hyper.rho,
                               hyper.rho_f, GradMode::kSpiking, &g);
        }
        part_loss[part] = loss;
      });

      double batch_loss = 0.0;
      for (int p = 0; p < parts; ++p) batch_loss += part_loss[p];
      if (!std::isfinite(batch_loss))
        throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                 std::to_string(epoch));
      epoch_loss += batch_loss;

      const double scale = 1.0 / static_cast<double>(batch_n);
      ++step;
      const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(step));
      for (int l = 0; l < n_layers; ++l) {
        auto& gl = grad[l];
        std::fill(gl.begin(), gl.end(), 0.0);
        for (int p = 0; p < parts; ++p) {
          auto& tg = thread_grads[p][l];
          for (std::size_t i = 0; i < gl.size(); ++i) gl[i] += tg[i];
          std::fill(tg.begin(), tg.end(), 0.0);
        }
        auto& ml = m[l];
        auto& vl = v[l];
        auto& wl = net.weights[l];
        for (std::size_t i = 0; i < gl.size(); ++i) {
          const double g = gl[i] * scale;
          ml[i] = hyper.beta1 * ml[i] + (1.0 - hyper.beta1) * g;
          vl[i] = hyper.beta2 * vl[i] + (1.0 - hyper.beta2) * g * g;
          wl[i] -= hyper.lr * (ml[i] / bc1) / (std::sqrt(vl[i] / bc2) + hyper.eps);
        }
      }
    }

    EpochStats es;
    es.train_loss = epoch_loss / static_cast<double>(order.size());
    es.val_accuracy = validation_accuracy(net, data, hyper.threads);
    hist.epochs.push_back(es);
  }
  return hist;
}

}  // namespace satrrm::snn
