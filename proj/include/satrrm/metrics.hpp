#pragma once

#include <cstdint>
#include <vector>

#include "satrrm/configspace.hpp"

// Classifier evaluation: confusion matrix, per-class precision/recall/F1,
// one-vs-rest ROC curves, and the per-beam capacity gap of predicted
// allocations. AUC is computed by trapezoid integration over tie-grouped
// thresholds, which equals the Mann-Whitney pair statistic (ties at 1/2).

namespace satrrm::metrics {

struct Confusion {
  int n_classes = 0;
  std::vector<std::uint64_t> counts;  // [truth * n_classes + pred]

  std::uint64_t at(int truth, int pred) const {
    return counts[static_cast<std::size_t>(truth) * n_classes + pred];
  }
  std::uint64_t total() const;
  std::uint64_t trace() const;
  double accuracy() const;  // trace / total, exactly
};

Confusion confusion_matrix(const std::vector<int>& truth, const std::vector<int>& pred,
                           int n_classes);

struct ClassStats {
  double precision = 0.0;  // 0 when the class is never predicted
  double recall = 0.0;     // 0 when the class never occurs
  double f1 = 0.0;
  std::uint64_t support = 0;
};

std::vector<ClassStats> per_class_stats(const Confusion& cm);
double macro_f1(const Confusion& cm);

struct RocPoint {
  double fpr = 0.0, tpr = 0.0;
  double threshold = 0.0;  // score at which this point is reached
};

struct RocCurve {
  std::vector<RocPoint> points;  // starts at (0,0), ends at (1,1)
  double auc = 0.0;              // NaN when the class has no positives or no negatives
};

// scores[i][k]: score of class k for sample i (spike rates or probabilities)
RocCurve roc_one_vs_rest(const std::vector<std::vector<double>>& scores,
                         const std::vector<int>& truth, int k);

// Direct pair-counting AUC; identical quantity for cross-checking the curve.
double auc_pairwise(const std::vector<std::vector<double>>& scores,
                    const std::vector<int>& truth, int k);

// Mean over classes with defined AUC.
double macro_auc(const std::vector<std::vector<double>>& scores,
                 const std::vector<int>& truth, int n_classes);

// Mean absolute difference, over samples and beams, between the capacity of
// the predicted class and the sample's per-beam demand (bps).
double capacity_gap_bps(const std::vector<int>& pred,
                        const std::vector<std::vector<double>>& demand_bps,
                        const configspace::ClassCatalog& catalog);

}  // namespace satrrm::metrics
