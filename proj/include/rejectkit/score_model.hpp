#pragma once

// Core domain types: labelled logit vectors, learned per-class thresholds and
// the reject/select decision for a single example.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rejectkit/randomness.hpp"

namespace rejectkit {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct Example {
  std::string id;
  int label = 0;
  std::vector<double> logits;
  std::optional<Point2> coord;

  friend bool operator==(const Example&, const Example&) = default;
};

// A labelled collection of logit vectors over `class_count` classes.
// Validated on construction and immutable afterwards. Either every example
// carries a 2-D coordinate or none does.
class ScoreSet {
 public:
  // Throws std::invalid_argument when an invariant is violated.
  ScoreSet(std::size_t class_count, std::vector<Example> examples);

  std::size_t class_count() const { return class_count_; }
  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  bool has_coords() const { return has_coords_; }
  const std::vector<Example>& examples() const { return examples_; }
  const Example& operator[](std::size_t i) const { return examples_[i]; }

  friend bool operator==(const ScoreSet&, const ScoreSet&) = default;

 private:
  std::size_t class_count_;
  std::vector<Example> examples_;
  bool has_coords_ = false;
};

struct ThresholdVector {
  std::vector<double> thresholds;    // tau_j in [0, 1]; 0 rejects nothing
  double delta = 0.05;               // significance level in (0, 1)
  ViabilityMethod method = ViabilityMethod::kBinomialCdf;
  std::vector<double> temperatures;  // per-class, applied before thresholding

  std::size_t class_count() const { return thresholds.size(); }

  // Throws std::invalid_argument on inconsistent lengths or out-of-range
  // values.
  void validate() const;

  friend bool operator==(const ThresholdVector&,
                         const ThresholdVector&) = default;
};

// All-zero thresholds with unit temperatures.
ThresholdVector base_thresholds(std::size_t class_count);

struct Decision {
  int predicted = 0;
  double confidence = 0.0;
  bool rejected = false;
};

// Numerically stable softmax of logits / temperature.
// Throws std::domain_error for empty input or temperature <= 0.
std::vector<double> softmax(std::span<const double> logits,
                            double temperature = 1.0);

// Index of the largest value; ties go to the lowest index.
int argmax(std::span<const double> values);

// Predicted class is the raw-logit argmax; its temperature scales the softmax
// and the example is rejected when confidence <= tau_predicted.
Decision decide(std::span<const double> logits, const ThresholdVector& tv);

}  // namespace rejectkit
