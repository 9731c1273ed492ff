#pragma once

// Grid of (delta, method) threshold learners plus the Base and Naive
// baselines, each learned on validation data and scored on validation and
// test data.

#include <optional>
#include <string>
#include <vector>

#include "rejectkit/calibration.hpp"
#include "rejectkit/metrics.hpp"
#include "rejectkit/randomness.hpp"
#include "rejectkit/score_model.hpp"

namespace rejectkit {

struct SweepRow {
  std::string name;  // "Base", "Naive-NoCal", "Naive-Cal", "B-CDF_0.05", ...
  std::optional<double> delta;
  std::optional<ViabilityMethod> method;
  ThresholdVector thresholds;
  EvalReport val;
  EvalReport test;
  // For CI methods: whether thresholds equal the bcdf row at the same delta
  // (absent when no such row exists or the row is not a CI method).
  std::optional<bool> matches_bcdf;
};

struct SweepInputs {
  const ScoreSet* val = nullptr;
  const ScoreSet* test = nullptr;
  const std::vector<bool>* val_mask = nullptr;
  const std::vector<bool>* test_mask = nullptr;
};

struct SweepResult {
  CalibrationMap calibration;
  std::vector<SweepRow> rows;
  std::vector<std::string> diagnostics;  // threshold mismatches, trend breaks
};

// Learner cells run concurrently; row order is Base, Naive-NoCal, Naive-Cal,
// then deltas in the given order with methods nested inside.
// Throws std::invalid_argument for an empty delta or method list.
SweepResult run_sweep(const SweepInputs& inputs, const std::vector<double>& deltas,
                      const std::vector<ViabilityMethod>& methods);

std::string sweep_row_name(double delta, ViabilityMethod method);

std::string sweep_to_csv(const SweepResult& result);
std::string sweep_to_json(const SweepResult& result,
                          const std::string& timestamp = "");

}  // namespace rejectkit
