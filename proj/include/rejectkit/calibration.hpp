#pragma once

// Per-class temperature scaling. Examples are grouped by their predicted
// (raw argmax) class and each group gets the temperature minimizing its mean
// negative log-likelihood.

#include <cstddef>
#include <string>
#include <vector>

#include "rejectkit/score_model.hpp"

namespace rejectkit {

struct ClassFitStats {
  std::size_t count = 0;
  double nll_before = 0.0;  // at T = 1
  double nll_after = 0.0;   // at the fitted temperature
};

struct CalibrationMap {
  std::vector<double> temperatures;
  std::vector<ClassFitStats> fit_stats;

  std::size_t class_count() const { return temperatures.size(); }
};

CalibrationMap identity_calibration(std::size_t class_count);

// Search range and coarse grid of the temperature fit.
inline constexpr double kMinTemperature = 0.05;
inline constexpr double kMaxTemperature = 10.0;
inline constexpr int kTemperatureGridPoints = 61;

// Mean of -log softmax(logits / T)[label] over `members` (indices into set).
double mean_nll(const ScoreSet& set, const std::vector<std::size_t>& members,
                double temperature);

// Throws std::domain_error on an empty set.
CalibrationMap fit_per_class_temperature(const ScoreSet& set);

struct CalibratedScore {
  int predicted = 0;
  double confidence = 0.0;  // max softmax at the predicted class's temperature
  bool correct = false;
};

// Throws std::domain_error when the map and set disagree on class count.
std::vector<CalibratedScore> apply_calibration(const ScoreSet& set,
                                               const CalibrationMap& cal);
std::vector<CalibratedScore> apply_calibration(
    const ScoreSet& set, const std::vector<double>& temperatures);

std::string calibration_to_json(const CalibrationMap& cal);
CalibrationMap calibration_from_json(const std::string& text);

}  // namespace rejectkit
