#pragma once

#include <cstdint>
#include <vector>

// Small dense convolutional classifier used as the non-spiking baseline:
//   conv(3x3, valid) + ReLU -> 2x2 max pool -> conv(3x3, valid) + ReLU
//   -> 2x2 max pool -> dense + ReLU -> dense + ReLU -> dense -> softmax
// trained with Nesterov-momentum SGD and early stopping on validation loss.
// All math in double; single input channel; pooling floors odd dimensions.

namespace satrrm::cnn {

struct CnnSpec {
  int in_rows = 0, in_cols = 0;
  int conv1_filters = 8;
  int conv2_filters = 4;
  int kernel = 3;
  int pool = 2;
  int dense1 = 512;
  int dense2 = 256;
  int n_classes = 0;

  int c1_rows() const { return in_rows - kernel + 1; }
  int c1_cols() const { return in_cols - kernel + 1; }
  int p1_rows() const { return c1_rows() / pool; }
  int p1_cols() const { return c1_cols() / pool; }
  int c2_rows() const { return p1_rows() - kernel + 1; }
  int c2_cols() const { return p1_cols() - kernel + 1; }
  int p2_rows() const { return c2_rows() / pool; }
  int p2_cols() const { return c2_cols() / pool; }
  int flat() const { return conv2_filters * p2_rows() * p2_cols(); }

  void validate() const;  // every stage must keep at least one pixel
};

std::uint64_t param_count(const CnnSpec& spec);
// multiply-accumulates of one forward pass; bias additions not counted.
std::uint64_t mac_count(const CnnSpec& spec);

struct CnnModel {
  CnnSpec spec;
  // conv weights [out_ch][in_ch][k][k], dense weights [out][in], plus biases
  std::vector<double> conv1_w, conv1_b;
  std::vector<double> conv2_w, conv2_b;
  std::vector<double> d1_w, d1_b;
  std::vector<double> d2_w, d2_b;
  std::vector<double> d3_w, d3_b;
  void validate() const;
};

CnnModel make_model(const CnnSpec& spec, std::uint64_t seed);

// softmax class probabilities for one input image (row-major, in_rows x in_cols)
std::vector<double> forward(const CnnModel& model, const float* input);
std::vector<double> forward(const CnnModel& model, const std::vector<double>& input);

int predict(const std::vector<double>& probs);

enum class Loss { kCrossEntropy, kSquaredError };

struct CnnGrads {
  std::vector<double> conv1_w, conv1_b;
  std::vector<double> conv2_w, conv2_b;
  std::vector<double> d1_w, d1_b;
  std::vector<double> d2_w, d2_b;
  std::vector<double> d3_w, d3_b;
};

CnnGrads zero_grads(const CnnSpec& spec);

// Loss of one example; accumulates parameter gradients (+=).
double example_grad(const CnnModel& model, const double* input, int label, Loss loss,
                    CnnGrads* grads);
double example_loss(const CnnModel& model, const double* input, int label, Loss loss);

struct SgdHyper {
  // small batches keep the update count high on few-thousand-sample sets;
  // the gentler rate stops the big dense layer from oscillating
  double lr = 0.005;
  double momentum = 0.9;
  bool nesterov = true;
  int epochs = 40;
  int batch = 32;
  int patience = 10;  // epochs without val-loss improvement before stopping
  Loss loss = Loss::kCrossEntropy;
  std::uint64_t seed = 1;
  int threads = 1;
  void validate() const;
};

struct FeatureDataset {
  int rows = 0, cols = 0;
  std::vector<float> features;  // n * rows * cols, sample-major
  std::vector<int> labels;
  std::vector<std::size_t> train_idx, val_idx;
  int n_classes = 0;
  std::size_t n() const { return labels.size(); }
  const float* sample(std::size_t i) const {
    return features.data() + i * static_cast<std::size_t>(rows) * cols;
  }
  void validate() const;
};

struct EpochStats {
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  int best_epoch = -1;  // epoch whose weights the model ends up with
};

// Throws std::runtime_error if the loss goes non-finite.
TrainHistory train(CnnModel& model, const FeatureDataset& data, const SgdHyper& hyper);

double validation_accuracy(const CnnModel& model, const FeatureDataset& data, int threads = 1);

}  // namespace satrrm::cnn
