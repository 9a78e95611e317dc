#include "satrrm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace satrrm::metrics {

std::uint64_t Confusion::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::uint64_t Confusion::trace() const {
  std::uint64_t t = 0;
  for (int k = 0; k < n_classes; ++k) t += at(k, k);
  return t;
}

double Confusion::accuracy() const {
  const std::uint64_t n = total();
  return n == 0 ? 0.0 : static_cast<double>(trace()) / static_cast<double>(n);
}

Confusion confusion_matrix(const std::vector<int>& truth, const std::vector<int>& pred,
                           int n_classes) {
  if (truth.size() != pred.size()) throw std::invalid_argument("truth/pred size mismatch");
  if (n_classes <= 0) throw std::invalid_argument("class count must be positive");
  Confusion cm;
  cm.n_classes = n_classes;
  cm.counts.assign(static_cast<std::size_t>(n_classes) * n_classes, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= n_classes || pred[i] < 0 || pred[i] >= n_classes)
      throw std::invalid_argument("label out of range");
    ++cm.counts[static_cast<std::size_t>(truth[i]) * n_classes + pred[i]];
  }
  return cm;
}

std::vector<ClassStats> per_class_stats(const Confusion& cm) {
  std::vector<ClassStats> out(cm.n_classes);
  for (int k = 0; k < cm.n_classes; ++k) {
    std::uint64_t tp = cm.at(k, k), row = 0, col = 0;
    for (int j = 0; j < cm.n_classes; ++j) {
      row += cm.at(k, j);
      col += cm.at(j, k);
    }
    auto& s = out[k];
    s.support = row;
    s.precision = col == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(col);
    s.recall = row == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(row);
    s.f1 = (s.precision + s.recall) == 0.0
               ? 0.0
               : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return out;
}

double macro_f1(const Confusion& cm) {
  const auto stats = per_class_stats(cm);
  double sum = 0.0;
  for (const auto& s : stats) sum += s.f1;
  return stats.empty() ? 0.0 : sum / static_cast<double>(stats.size());
}

RocCurve roc_one_vs_rest(const std::vector<std::vector<double>>& scores,
                         const std::vector<int>& truth, int k) {
  if (scores.size() != truth.size()) throw std::invalid_argument("scores/truth size mismatch");
  const std::size_t n = truth.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a][k] > scores[b][k];
  });

  std::uint64_t pos = 0;
  for (int t : truth) pos += (t == k);
  const std::uint64_t neg = n - pos;

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  if (pos == 0 || neg == 0) {
    curve.auc = std::numeric_limits<double>::quiet_NaN();
    return curve;
  }

  std::uint64_t tp = 0, fp = 0;
  double auc = 0.0;
  std::size_t i = 0;
  while (i < n) {
    // consume the whole tie group at this score before emitting a point
    const double score = scores[order[i]][k];
    std::size_t j = i;
    while (j < n && scores[order[j]][k] == score) {
      if (truth[order[j]] == k)
        ++tp;
      else
        ++fp;
      ++j;
    }
    const auto& prev = curve.points.back();
    const double fpr = static_cast<double>(fp) / static_cast<double>(neg);
    const double tpr = static_cast<double>(tp) / static_cast<double>(pos);
    auc += (fpr - prev.fpr) * (tpr + prev.tpr) * 0.5;
    curve.points.push_back({fpr, tpr, score});
    i = j;
  }
  curve.auc = auc;
  return curve;
}

double auc_pairwise(const std::vector<std::vector<double>>& scores,
                    const std::vector<int>& truth, int k) {
  if (scores.size() != truth.size()) throw std::invalid_argument("scores/truth size mismatch");
  std::uint64_t pos = 0;
  for (int t : truth) pos += (t == k);
  const std::uint64_t neg = truth.size() - pos;
  if (pos == 0 || neg == 0) return std::numeric_limits<double>::quiet_NaN();

  // sort-based pair counting; O(n log n) instead of all pairs
  std::vector<std::size_t> order(truth.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a][k] < scores[b][k];
  });
  double wins = 0.0;  // positives ranked above negatives, ties at 1/2
  std::uint64_t neg_below = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double score = scores[order[i]][k];
    std::size_t j = i;
    std::uint64_t tie_pos = 0, tie_neg = 0;
    while (j < order.size() && scores[order[j]][k] == score) {
      if (truth[order[j]] == k)
        ++tie_pos;
      else
        ++tie_neg;
      ++j;
    }
    wins += static_cast<double>(tie_pos) *
            (static_cast<double>(neg_below) + 0.5 * static_cast<double>(tie_neg));
    neg_below += tie_neg;
    i = j;
  }
  return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

double macro_auc(const std::vector<std::vector<double>>& scores,
                 const std::vector<int>& truth, int n_classes) {
  double sum = 0.0;
  int defined = 0;
  for (int k = 0; k < n_classes; ++k) {
    const double a = roc_one_vs_rest(scores, truth, k).auc;
    if (!std::isnan(a)) {
      sum += a;
      ++defined;
    }
  }
  return defined == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / defined;
}

double capacity_gap_bps(const std::vector<int>& pred,
                        const std::vector<std::vector<double>>& demand_bps,
                        const configspace::ClassCatalog& catalog) {
  if (pred.size() != demand_bps.size())
    throw std::invalid_argument("pred/demand size mismatch");
  if (pred.empty() || catalog.classes.empty())
    throw std::invalid_argument("empty evaluation set or catalog");
  const std::size_t n_beams = catalog.classes.front().beams.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] < 0 || static_cast<std::size_t>(pred[i]) >= catalog.classes.size())
      throw std::invalid_argument("predicted class out of range");
    const auto& cfg = catalog.classes[pred[i]];
    if (demand_bps[i].size() != n_beams)
      throw std::invalid_argument("demand vector has wrong beam count");
    for (std::size_t b = 0; b < n_beams; ++b)
      sum += std::abs(cfg.beams[b].capacity_bps - demand_bps[i][b]);
  }
  return sum / (static_cast<double>(pred.size()) * static_cast<double>(n_beams));
}

}  // namespace satrrm::metrics
