#include "rejectkit/score_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace rejectkit {

ScoreSet::ScoreSet(std::size_t class_count, std::vector<Example> examples)
    : class_count_(class_count), examples_(std::move(examples)) {
  if (class_count_ == 0) {
    throw std::invalid_argument("class_count must be positive");
  }
  has_coords_ = !examples_.empty() && examples_.front().coord.has_value();
  std::unordered_set<std::string> ids;
  ids.reserve(examples_.size());
  for (const Example& ex : examples_) {
    if (ex.logits.size() != class_count_) {
      throw std::invalid_argument("example '" + ex.id + "' has " +
                                  std::to_string(ex.logits.size()) +
                                  " logits, expected " +
                                  std::to_string(class_count_));
    }
    if (ex.label < 0 || static_cast<std::size_t>(ex.label) >= class_count_) {
      throw std::invalid_argument("example '" + ex.id + "' has label " +
                                  std::to_string(ex.label) +
                                  " outside [0, " +
                                  std::to_string(class_count_) + ")");
    }
    for (double v : ex.logits) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("example '" + ex.id +
                                    "' has a non-finite logit");
      }
    }
    if (ex.coord.has_value() != has_coords_) {
      throw std::invalid_argument("example '" + ex.id +
                                  "': coordinates must be present on all "
                                  "examples or none");
    }
    if (ex.coord && !(std::isfinite(ex.coord->x) && std::isfinite(ex.coord->y))) {
      throw std::invalid_argument("example '" + ex.id +
                                  "' has a non-finite coordinate");
    }
    if (!ids.insert(ex.id).second) {
      throw std::invalid_argument("duplicate example id '" + ex.id + "'");
    }
  }
}

void ThresholdVector::validate() const {
  if (thresholds.empty()) {
    throw std::invalid_argument("threshold vector is empty");
  }
  if (temperatures.size() != thresholds.size()) {
    throw std::invalid_argument(
        "threshold vector has " + std::to_string(thresholds.size()) +
        " thresholds but " + std::to_string(temperatures.size()) +
        " temperatures");
  }
  for (double t : thresholds) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw std::invalid_argument("thresholds must lie in [0, 1]");
    }
  }
  for (double t : temperatures) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw std::invalid_argument("temperatures must be positive and finite");
    }
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
}

ThresholdVector base_thresholds(std::size_t class_count) {
  return ThresholdVector{std::vector<double>(class_count, 0.0), 0.05,
                         ViabilityMethod::kBinomialCdf,
                         std::vector<double>(class_count, 1.0)};
}

std::vector<double> softmax(std::span<const double> logits,
                            double temperature) {
  if (logits.empty()) throw std::domain_error("softmax of an empty vector");
  if (!(temperature > 0.0)) {
    throw std::domain_error("softmax temperature must be positive");
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp((logits[i] - top) / temperature);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

int argmax(std::span<const double> values) {
  if (values.empty()) throw std::domain_error("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return static_cast<int>(best);
}

Decision decide(std::span<const double> logits, const ThresholdVector& tv) {
  if (logits.size() != tv.thresholds.size() ||
      logits.size() != tv.temperatures.size()) {
    throw std::domain_error("logit length " + std::to_string(logits.size()) +
                            " does not match threshold vector length " +
                            std::to_string(tv.thresholds.size()));
  }
  Decision d;
  d.predicted = argmax(logits);
  const auto probs = softmax(logits, tv.temperatures[d.predicted]);
  d.confidence = probs[d.predicted];
  d.rejected = d.confidence <= tv.thresholds[d.predicted];
  return d;
}

}  // namespace rejectkit
