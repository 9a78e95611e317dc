#include "satrrm/cnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

#include "satrrm/common.hpp"
#include "satrrm/parallel.hpp"
#include "satrrm/rng.hpp"

namespace satrrm::cnn {

namespace {

constexpr std::uint64_t kInitSalt = 0x3c91b4;
constexpr std::uint64_t kShuffleSalt = 0x9f02e7;

void softmax(std::vector<double>& v) {
  double mx = v[0];
  for (double x : v) mx = std::max(mx, x);
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : v) x /= sum;
}

// valid 3x3-style convolution, multi-channel in/out, ReLU applied by caller
void conv_forward(const double* in, int in_ch, int in_r, int in_c, const double* w,
                  const double* b, int out_ch, int k, double* out) {
  const int out_r = in_r - k + 1;
  const int out_c = in_c - k + 1;
  for (int o = 0; o < out_ch; ++o) {
    double* dst = out + static_cast<std::size_t>(o) * out_r * out_c;
    for (int i = 0; i < out_r * out_c; ++i) dst[i] = b[o];
    for (int ic = 0; ic < in_ch; ++ic) {
      const double* src = in + static_cast<std::size_t>(ic) * in_r * in_c;
      const double* ker = w + ((static_cast<std::size_t>(o) * in_ch + ic) * k * k);
      for (int r = 0; r < out_r; ++r)
        for (int dr = 0; dr < k; ++dr) {
          const double* row = src + static_cast<std::size_t>(r + dr) * in_c;
          double* orow = dst + static_cast<std::size_t>(r) * out_c;
          for (int dc = 0; dc < k; ++dc) {
            const double kv = ker[dr * k + dc];
            for (int c = 0; c < out_c; ++c) orow[c] += kv * row[c + dc];
          }
        }
    }
  }
}

void relu(double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (v[i] < 0.0) v[i] = 0.0;
}

void pool_forward(const double* in, int ch, int in_r, int in_c, int pool, double* out,
                  int* argmax) {
  const int out_r = in_r / pool;
  const int out_c = in_c / pool;
  for (int o = 0; o < ch; ++o) {
    const double* src = in + static_cast<std::size_t>(o) * in_r * in_c;
    double* dst = out + static_cast<std::size_t>(o) * out_r * out_c;
    int* arg = argmax + static_cast<std::size_t>(o) * out_r * out_c;
    for (int r = 0; r < out_r; ++r)
      for (int c = 0; c < out_c; ++c) {
        double best = src[(r * pool) * in_c + c * pool];
        int best_i = (r * pool) * in_c + c * pool;
        for (int dr = 0; dr < pool; ++dr)
          for (int dc = 0; dc < pool; ++dc) {
            const int i = (r * pool + dr) * in_c + (c * pool + dc);
            if (src[i] > best) {
              best = src[i];
              best_i = i;
            }
          }
        dst[r * out_c + c] = best;
        arg[r * out_c + c] = best_i;
      }
  }
}

void dense_forward(const double* in, int n_in, const double* w, const double* b, int n_out,
                   double* out) {
  for (int k = 0; k < n_out; ++k) {
    const double* row = w + static_cast<std::size_t>(k) * n_in;
    double acc = b[k];
    for (int j = 0; j < n_in; ++j) acc += row[j] * in[j];
    out[k] = acc;
  }
}

struct Acts {
  std::vector<double> in, c1, p1, c2, p2, h1, h2, probs;
  std::vector<int> p1_arg, p2_arg;
};

void forward_acts(const CnnModel& m, const double* input, Acts& a) {
  const CnnSpec& s = m.spec;
  const std::size_t in_n = static_cast<std::size_t>(s.in_rows) * s.in_cols;
  a.in.assign(input, input + in_n);

  a.c1.resize(static_cast<std::size_t>(s.conv1_filters) * s.c1_rows() * s.c1_cols());
  conv_forward(a.in.data(), 1, s.in_rows, s.in_cols, m.conv1_w.data(), m.conv1_b.data(),
               s.conv1_filters, s.kernel, a.c1.data());
  relu(a.c1.data(), a.c1.size());

  a.p1.resize(static_cast<std::size_t>(s.conv1_filters) * s.p1_rows() * s.p1_cols());
  a.p1_arg.resize(a.p1.size());
  pool_forward(a.c1.data(), s.conv1_filters, s.c1_rows(), s.c1_cols(), s.pool, a.p1.data(),
               a.p1_arg.data());

  a.c2.resize(static_cast<std::size_t>(s.conv2_filters) * s.c2_rows() * s.c2_cols());
  conv_forward(a.p1.data(), s.conv1_filters, s.p1_rows(), s.p1_cols(), m.conv2_w.data(),
               m.conv2_b.data(), s.conv2_filters, s.kernel, a.c2.data());
  relu(a.c2.data(), a.c2.size());

  a.p2.resize(static_cast<std::size_t>(s.flat()));
  a.p2_arg.resize(a.p2.size());
  pool_forward(a.c2.data(), s.conv2_filters, s.c2_rows(), s.c2_cols(), s.pool, a.p2.data(),
               a.p2_arg.data());

  a.h1.resize(s.dense1);
  dense_forward(a.p2.data(), s.flat(), m.d1_w.data(), m.d1_b.data(), s.dense1, a.h1.data());
  relu(a.h1.data(), a.h1.size());

  a.h2.resize(s.dense2);
  dense_forward(a.h1.data(), s.dense1, m.d2_w.data(), m.d2_b.data(), s.dense2, a.h2.data());
  relu(a.h2.data(), a.h2.size());

  a.probs.resize(s.n_classes);
  dense_forward(a.h2.data(), s.dense2, m.d3_w.data(), m.d3_b.data(), s.n_classes,
                a.probs.data());
  softmax(a.probs);
}

double loss_value(const std::vector<double>& probs, int label, Loss loss) {
  if (loss == Loss::kCrossEntropy) return -std::log(std::max(probs[label], 1e-300));
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    const double y = (static_cast<int>(k) == label) ? 1.0 : 0.0;
    acc += 0.5 * (probs[k] - y) * (probs[k] - y);
  }
  return acc;
}

// dL/dlogits for either loss, given softmax outputs
void logit_grad(const std::vector<double>& probs, int label, Loss loss,
                std::vector<double>& dlogits) {
  const int z = static_cast<int>(probs.size());
  dlogits.resize(z);
  if (loss == Loss::kCrossEntropy) {
    for (int k = 0; k < z; ++k) dlogits[k] = probs[k] - ((k == label) ? 1.0 : 0.0);
    return;
  }
  // squared error through the softmax jacobian
  double dot = 0.0;
  for (int k = 0; k < z; ++k) {
    const double y = (k == label) ? 1.0 : 0.0;
    dot += (probs[k] - y) * probs[k];
  }
  for (int j = 0; j < z; ++j) {
    const double yj = (j == label) ? 1.0 : 0.0;
    dlogits[j] = probs[j] * ((probs[j] - yj) - dot);
  }
}

void dense_backward(const double* in, int n_in, const double* w, int n_out,
                    const double* dout, double* dw, double* db, double* din) {
  if (din) std::fill(din, din + n_in, 0.0);
  for (int k = 0; k < n_out; ++k) {
    const double dk = dout[k];
    db[k] += dk;
    const double* wrow = w + static_cast<std::size_t>(k) * n_in;
    double* dwrow = dw + static_cast<std::size_t>(k) * n_in;
    for (int j = 0; j < n_in; ++j) {
      dwrow[j] += dk * in[j];
      if (din) din[j] += wrow[j] * dk;
    }
  }
}

void relu_backward(const double* act, double* grad, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (act[i] <= 0.0) grad[i] = 0.0;
}

void pool_backward(const double* dout, const int* argmax, int ch, int out_r, int out_c,
                   int in_r, int in_c, double* din) {
  std::fill(din, din + static_cast<std::size_t>(ch) * in_r * in_c, 0.0);
  for (int o = 0; o < ch; ++o) {
    const double* dsrc = dout + static_cast<std::size_t>(o) * out_r * out_c;
    const int* arg = argmax + static_cast<std::size_t>(o) * out_r * out_c;
    double* ddst = din + static_cast<std::size_t>(o) * in_r * in_c;
    for (int i = 0; i < out_r * out_c; ++i) ddst[arg[i]] += dsrc[i];
  }
}

void conv_backward(const double* in, int in_ch, int in_r, int in_c, const double* w,
                   int out_ch, int k, const double* dout, double* dw, double* db,
                   double* din) {
  const int out_r = in_r - k + 1;
  const int out_c = in_c - k + 1;
  if (din) std::fill(din, din + static_cast<std::size_t>(in_ch) * in_r * in_c, 0.0);
  for (int o = 0; o < out_ch; ++o) {
    const double* dsrc = dout + static_cast<std::size_t>(o) * out_r * out_c;
    double acc = 0.0;
    for (int i = 0; i < out_r * out_c; ++i) acc += dsrc[i];
    db[o] += acc;
    for (int ic = 0; ic < in_ch; ++ic) {
      const double* src = in + static_cast<std::size_t>(ic) * in_r * in_c;
      const double* ker = w + ((static_cast<std::size_t>(o) * in_ch + ic) * k * k);
      double* dker = dw + ((static_cast<std::size_t>(o) * in_ch + ic) * k * k);
      double* dsrc_in = din ? din + static_cast<std::size_t>(ic) * in_r * in_c : nullptr;
      for (int r = 0; r < out_r; ++r)
        for (int dr = 0; dr < k; ++dr) {
          const double* row = src + static_cast<std::size_t>(r + dr) * in_c;
          const double* drow = dsrc + static_cast<std::size_t>(r) * out_c;
          double* dinrow = dsrc_in ? dsrc_in + static_cast<std::size_t>(r + dr) * in_c : nullptr;
          for (int dc = 0; dc < k; ++dc) {
            double g = 0.0;
            const double kv = ker[dr * k + dc];
            for (int c = 0; c < out_c; ++c) {
              g += drow[c] * row[c + dc];
              if (dinrow) dinrow[c + dc] += kv * drow[c];
            }
            dker[dr * k + dc] += g;
          }
        }
    }
  }
}

void fill_uniform(std::vector<double>& w, std::size_t n, double bound, Rng& rng) {
  w.resize(n);
  for (auto& v : w) v = (2.0 * rng.uniform01() - 1.0) * bound;
}

template <typename F>
void for_each_tensor(CnnModel& m, CnnGrads& g, CnnGrads& v, F f) {
  f(m.conv1_w, g.conv1_w, v.conv1_w);
  f(m.conv1_b, g.conv1_b, v.conv1_b);
  f(m.conv2_w, g.conv2_w, v.conv2_w);
  f(m.conv2_b, g.conv2_b, v.conv2_b);
  f(m.d1_w, g.d1_w, v.d1_w);
  f(m.d1_b, g.d1_b, v.d1_b);
  f(m.d2_w, g.d2_w, v.d2_w);
  f(m.d2_b, g.d2_b, v.d2_b);
  f(m.d3_w, g.d3_w, v.d3_w);
  f(m.d3_b, g.d3_b, v.d3_b);
}

template <typename F>
void for_each_grad(CnnGrads& a, CnnGrads& b, F f) {
  f(a.conv1_w, b.conv1_w);
  f(a.conv1_b, b.conv1_b);
  f(a.conv2_w, b.conv2_w);
  f(a.conv2_b, b.conv2_b);
  f(a.d1_w, b.d1_w);
  f(a.d1_b, b.d1_b);
  f(a.d2_w, b.d2_w);
  f(a.d2_b, b.d2_b);
  f(a.d3_w, b.d3_w);
  f(a.d3_b, b.d3_b);
}

}  // namespace

void CnnSpec::validate() const {
  if (in_rows <= 0 || in_cols <= 0) throw ConfigError("input image must be non-empty");
  if (kernel <= 0 || pool <= 0) throw ConfigError("kernel and pool sizes must be positive");
  if (conv1_filters <= 0 || conv2_filters <= 0 || dense1 <= 0 || dense2 <= 0)
    throw ConfigError("layer widths must be positive");
  if (n_classes <= 0) throw ConfigError("class count must be positive");
  if (c1_rows() < 1 || c1_cols() < 1 || p1_rows() < 1 || p1_cols() < 1 || c2_rows() < 1 ||
      c2_cols() < 1 || p2_rows() < 1 || p2_cols() < 1)
    throw ConfigError("input too small for the conv/pool chain");
}

std::uint64_t param_count(const CnnSpec& s) {
  std::uint64_t n = 0;
  n += static_cast<std::uint64_t>(s.conv1_filters) * (1 * s.kernel * s.kernel + 1);
  n += static_cast<std::uint64_t>(s.conv2_filters) *
       (s.conv1_filters * s.kernel * s.kernel + 1);
  n += static_cast<std::uint64_t>(s.flat()) * s.dense1 + s.dense1;
  n += static_cast<std::uint64_t>(s.dense1) * s.dense2 + s.dense2;
  n += static_cast<std::uint64_t>(s.dense2) * s.n_classes + s.n_classes;
  return n;
}

std::uint64_t mac_count(const CnnSpec& s) {
  std::uint64_t n = 0;
  n += static_cast<std::uint64_t>(s.c1_rows()) * s.c1_cols() * s.conv1_filters *
       (1 * s.kernel * s.kernel);
  n += static_cast<std::uint64_t>(s.c2_rows()) * s.c2_cols() * s.conv2_filters *
       (s.conv1_filters * s.kernel * s.kernel);
  n += static_cast<std::uint64_t>(s.flat()) * s.dense1;
  n += static_cast<std::uint64_t>(s.dense1) * s.dense2;
  n += static_cast<std::uint64_t>(s.dense2) * s.n_classes;
  return n;
}

void CnnModel::validate() const {
  spec.validate();
  const auto k2 = static_cast<std::size_t>(spec.kernel) * spec.kernel;
  auto check = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("bad tensor shape: ") + what);
  };
  check(conv1_w.size() == spec.conv1_filters * k2, "conv1_w");
  check(conv1_b.size() == static_cast<std::size_t>(spec.conv1_filters), "conv1_b");
  check(conv2_w.size() == static_cast<std::size_t>(spec.conv2_filters) * spec.conv1_filters * k2,
        "conv2_w");
  check(conv2_b.size() == static_cast<std::size_t>(spec.conv2_filters), "conv2_b");
  check(d1_w.size() == static_cast<std::size_t>(spec.dense1) * spec.flat(), "d1_w");
  check(d1_b.size() == static_cast<std::size_t>(spec.dense1), "d1_b");
  check(d2_w.size() == static_cast<std::size_t>(spec.dense2) * spec.dense1, "d2_w");
  check(d2_b.size() == static_cast<std::size_t>(spec.dense2), "d2_b");
  check(d3_w.size() == static_cast<std::size_t>(spec.n_classes) * spec.dense2, "d3_w");
  check(d3_b.size() == static_cast<std::size_t>(spec.n_classes), "d3_b");
}

CnnModel make_model(const CnnSpec& spec, std::uint64_t seed) {
  spec.validate();
  CnnModel m;
  m.spec = spec;
  const int k2 = spec.kernel * spec.kernel;
  int tensor = 0;
  auto init = [&](std::vector<double>& w, std::size_t n, int fan_in) {
    Rng rng(sample_seed(seed, tensor++, kInitSalt));
    fill_uniform(w, n, 1.0 / std::sqrt(static_cast<double>(fan_in)), rng);
  };
  init(m.conv1_w, static_cast<std::size_t>(spec.conv1_filters) * k2, k2);
  m.conv1_b.assign(spec.conv1_filters, 0.0);
  init(m.conv2_w, static_cast<std::size_t>(spec.conv2_filters) * spec.conv1_filters * k2,
       spec.conv1_filters * k2);
  m.conv2_b.assign(spec.conv2_filters, 0.0);
  init(m.d1_w, static_cast<std::size_t>(spec.dense1) * spec.flat(), spec.flat());
  m.d1_b.assign(spec.dense1, 0.0);
  init(m.d2_w, static_cast<std::size_t>(spec.dense2) * spec.dense1, spec.dense1);
  m.d2_b.assign(spec.dense2, 0.0);
  init(m.d3_w, static_cast<std::size_t>(spec.n_classes) * spec.dense2, spec.dense2);
  m.d3_b.assign(spec.n_classes, 0.0);
  m.validate();
  return m;
}

std::vector<double> forward(const CnnModel& model, const float* input) {
  const CnnSpec& s = model.spec;
  const std::size_t n = static_cast<std::size_t>(s.in_rows) * s.in_cols;
  std::vector<double> x(input, input + n);
  Acts a;
  forward_acts(model, x.data(), a);
  return a.probs;
}

std::vector<double> forward(const CnnModel& model, const std::vector<double>& input) {
  const CnnSpec& s = model.spec;
  if (input.size() != static_cast<std::size_t>(s.in_rows) * s.in_cols)
    throw std::invalid_argument("input size does not match model spec");
  Acts a;
  forward_acts(model, input.data(), a);
  return a.probs;
}

int predict(const std::vector<double>& probs) {
  if (probs.empty()) throw std::invalid_argument("empty probability vector");
  int best = 0;
  for (std::size_t k = 1; k < probs.size(); ++k)
    if (probs[k] > probs[best]) best = static_cast<int>(k);
  return best;
}

CnnGrads zero_grads(const CnnSpec& s) {
  const std::size_t k2 = static_cast<std::size_t>(s.kernel) * s.kernel;
  CnnGrads g;
  g.conv1_w.assign(s.conv1_filters * k2, 0.0);
  g.conv1_b.assign(s.conv1_filters, 0.0);
  g.conv2_w.assign(static_cast<std::size_t>(s.conv2_filters) * s.conv1_filters * k2, 0.0);
  g.conv2_b.assign(s.conv2_filters, 0.0);
  g.d1_w.assign(static_cast<std::size_t>(s.dense1) * s.flat(), 0.0);
  g.d1_b.assign(s.dense1, 0.0);
  g.d2_w.assign(static_cast<std::size_t>(s.dense2) * s.dense1, 0.0);
  g.d2_b.assign(s.dense2, 0.0);
  g.d3_w.assign(static_cast<std::size_t>(s.n_classes) * s.dense2, 0.0);
  g.d3_b.assign(s.n_classes, 0.0);
  return g;
}

double example_grad(const CnnModel& m, const double* input, int label, Loss loss,
                    CnnGrads* grads) {
  const CnnSpec& s = m.spec;
  if (label < 0 || label >= s.n_classes) throw std::invalid_argument("label out of range");
  Acts a;
  forward_acts(m, input, a);
  const double loss_val = loss_value(a.probs, label, loss);

  std::vector<double> dlogits;
  logit_grad(a.probs, label, loss, dlogits);

  std::vector<double> dh2(s.dense2);
  dense_backward(a.h2.data(), s.dense2, m.d3_w.data(), s.n_classes, dlogits.data(),
                 grads->d3_w.data(), grads->d3_b.data(), dh2.data());
  relu_backward(a.h2.data(), dh2.data(), dh2.size());

  std::vector<double> dh1(s.dense1);
  dense_backward(a.h1.data(), s.dense1, m.d2_w.data(), s.dense2, dh2.data(),
                 grads->d2_w.data(), grads->d2_b.data(), dh1.data());
  relu_backward(a.h1.data(), dh1.data(), dh1.size());

  std::vector<double> dp2(s.flat());
  dense_backward(a.p2.data(), s.flat(), m.d1_w.data(), s.dense1, dh1.data(),
                 grads->d1_w.data(), grads->d1_b.data(), dp2.data());

  std::vector<double> dc2(a.c2.size());
  pool_backward(dp2.data(), a.p2_arg.data(), s.conv2_filters, s.p2_rows(), s.p2_cols(),
                s.c2_rows(), s.c2_cols(), dc2.data());
  relu_backward(a.c2.data(), dc2.data(), dc2.size());

  std::vector<double> dp1(a.p1.size());
  conv_backward(a.p1.data(), s.conv1_filters, s.p1_rows(), s.p1_cols(), m.conv2_w.data(),
                s.conv2_filters, s.kernel, dc2.data(), grads->conv2_w.data(),
                grads->conv2_b.data(), dp1.data());

  std::vector<double> dc1(a.c1.size());
  pool_backward(dp1.data(), a.p1_arg.data(), s.conv1_filters, s.p1_rows(), s.p1_cols(),
                s.c1_rows(), s.c1_cols(), dc1.data());
  relu_backward(a.c1.data(), dc1.data(), dc1.size());

  conv_backward(a.in.data(), 1, s.in_rows, s.in_cols, m.conv1_w.data(), s.conv1_filters,
                s.kernel, dc1.data(), grads->conv1_w.data(), grads->conv1_b.data(), nullptr);
  return loss_val;
}

double example_loss(const CnnModel& m, const double* input, int label, Loss loss) {
  Acts a;
  forward_acts(m, input, a);
  return loss_value(a.probs, label, loss);
}

void SgdHyper::validate() const {
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must be in [0, 1)");
  if (epochs <= 0 || batch <= 0) throw ConfigError("epochs and batch size must be positive");
  if (patience < 0) throw ConfigError("patience must be non-negative");
}

void FeatureDataset::validate() const {
  if (rows <= 0 || cols <= 0) throw ConfigError("feature grid must be non-empty");
  if (labels.empty()) throw ConfigError("empty dataset");
  if (features.size() != labels.size() * static_cast<std::size_t>(rows) * cols)
    throw ConfigError("feature buffer size does not match sample count");
  if (n_classes <= 0) throw ConfigError("dataset class count must be positive");
  for (int y : labels)
    if (y < 0 || y >= n_classes) throw ConfigError("label out of range");
  if (train_idx.empty()) throw ConfigError("empty training split");
  for (std::size_t i : train_idx)
    if (i >= labels.size()) throw ConfigError("train index out of range");
  for (std::size_t i : val_idx)
    if (i >= labels.size()) throw ConfigError("validation index out of range");
}

double validation_accuracy(const CnnModel& model, const FeatureDataset& data, int threads) {
  if (data.val_idx.empty()) return 0.0;
  const int parts = resolve_threads(threads);
  std::vector<std::uint64_t> correct(parts, 0);
  parallel_chunks(data.val_idx.size(), threads, [&](int part, std::size_t b, std::size_t e) {
    std::uint64_t c = 0;
    for (std::size_t i = b; i < e; ++i) {
      const std::size_t idx = data.val_idx[i];
      if (predict(forward(model, data.sample(idx))) == data.labels[idx]) ++c;
    }
    correct[part] = c;
  });
  std::uint64_t total = 0;
  for (auto c : correct) total += c;
  return static_cast<double>(total) / data.val_idx.size();
}

TrainHistory train(CnnModel& model, const FeatureDataset& data, const SgdHyper& hyper) {
  model.validate();
  data.validate();
  hyper.validate();
  if (data.rows != model.spec.in_rows || data.cols != model.spec.in_cols)
    throw ConfigError("dataset shape does not match model spec");
  if (data.n_classes != model.spec.n_classes)
    throw ConfigError("dataset class count does not match model");

  const int parts = resolve_threads(hyper.threads);
  std::vector<CnnGrads> thread_grads(parts, zero_grads(model.spec));
  CnnGrads grad = zero_grads(model.spec);
  CnnGrads vel = zero_grads(model.spec);

  std::vector<std::size_t> order = data.train_idx;
  TrainHistory hist;
  CnnModel best = model;
  double best_val = std::numeric_limits<double>::infinity();
  int stale = 0;

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
        std::vector<double> x(static_cast<std::size_t>(data.rows) * data.cols);
        double loss = 0.0;
        for (std::size_t i = b; i < e; ++i) {
          const std::size_t idx = order[begin + i];
          const float* src = data.sample(idx);
          for (std::size_t j = 0; j < x.size(); ++j) x[j] = src[j];
          loss += example_grad(model, x.data(), data.labels[idx], hyper.loss, &g);
        }
        part_loss[part] = loss;
      });

      double batch_loss = 0.0;
      for (int p = 0; p < parts; ++p) batch_loss += part_loss[p];
      if (!std::isfinite(batch_loss))
        throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                 std::to_string(epoch));
      epoch_loss += batch_loss;

      for (int p = 0; p < parts; ++p)
        for_each_grad(grad, thread_grads[p], [](std::vector<double>& a, std::vector<double>& b) {
          for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
          std::fill(b.begin(), b.end(), 0.0);
        });

      const double scale = 1.0 / static_cast<double>(batch_n);
      for_each_tensor(model, grad, vel,
                      [&](std::vector<double>& w, std::vector<double>& g, std::vector<double>& v) {
                        for (std::size_t i = 0; i < w.size(); ++i) {
                          const double gi = g[i] * scale;
                          v[i] = hyper.momentum * v[i] + gi;
                          const double step =
                              hyper.nesterov ? gi + hyper.momentum * v[i] : v[i];
                          w[i] -= hyper.lr * step;
                          g[i] = 0.0;
                        }
                      });
    }

    // validation loss drives early stopping
    std::vector<double> part_vloss(parts, 0.0);
    std::vector<std::uint64_t> part_correct(parts, 0);
    if (!data.val_idx.empty()) {
      parallel_chunks(data.val_idx.size(), hyper.threads,
                      [&](int part, std::size_t b, std::size_t e) {
                        std::vector<double> x(static_cast<std::size_t>(data.rows) * data.cols);
                        double loss = 0.0;
                        std::uint64_t c = 0;
                        for (std::size_t i = b; i < e; ++i) {
                          const std::size_t idx = data.val_idx[i];
                          const float* src = data.sample(idx);
                          for (std::size_t j = 0; j < x.size(); ++j) x[j] = src[j];
                          Acts a;
                          forward_acts(model, x.data(), a);
                          loss += loss_value(a.probs, data.labels[idx], hyper.loss);
                          if (predict(a.probs) == data.labels[idx]) ++c;
                        }
                        part_vloss[part] = loss;
                        part_correct[part] = c;
                      });
    }
    double val_loss = 0.0;
    std::uint64_t val_correct = 0;
    for (int p = 0; p < parts; ++p) {
      val_loss += part_vloss[p];
      val_correct += part_correct[p];
    }

    EpochStats es;
    es.train_loss = epoch_loss / static_cast<double>(order.size());
    es.val_loss = data.val_idx.empty() ? 0.0 : val_loss / data.val_idx.size();
    es.val_accuracy =
        data.val_idx.empty() ? 0.0 : static_cast<double>(val_correct) / data.val_idx.size();
    hist.epochs.push_back(es);

    if (data.val_idx.empty() || es.val_loss < best_val) {
      best_val = es.val_loss;
      best = model;
      hist.best_epoch = epoch;
      stale = 0;
    } else if (++stale > hyper.patience) {
      break;
    }
  }
  model = best;
  return hist;
}

}  // namespace satrrm::cnn
