#pragma once

// Per-class rejection threshold search.
//
// For every predicted class the candidate thresholds are 0 (reject nothing)
// and the calibrated confidences of that class's incorrect predictions. A
// candidate's reject region is every member with confidence <= threshold; the
// learner keeps the viable candidate with the highest select accuracy,
// preferring the smallest threshold on exact ties.

#include <cstddef>
#include <span>
#include <vector>

#include "rejectkit/calibration.hpp"
#include "rejectkit/randomness.hpp"
#include "rejectkit/score_model.hpp"

namespace rejectkit {

struct SliceMember {
  double confidence = 0.0;
  bool correct = false;
};

// Members predicted as one class, sorted ascending by confidence.
class ClassSlice {
 public:
  ClassSlice() = default;
  ClassSlice(int class_index, std::vector<SliceMember> members);

  int class_index() const { return class_index_; }
  const std::vector<SliceMember>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  std::size_t correct_count() const { return correct_total_; }

  // Tally of the reject region {confidence <= threshold}.
  RegionTally tally_at(double threshold) const;

 private:
  int class_index_ = 0;
  std::vector<SliceMember> members_;
  std::vector<std::size_t> correct_prefix_;  // correct_prefix_[i]: correct in [0, i)
  std::size_t correct_total_ = 0;
};

// One slice per class, built from calibrated scores.
std::vector<ClassSlice> partition_by_prediction(
    std::span<const CalibratedScore> scores, std::size_t class_count);

struct CandidateEval {
  double threshold = 0.0;
  RegionTally tally;
  bool viable = false;
  bool selectable = false;       // false when the region swallows the slice
  std::size_t selected = 0;
  std::size_t selected_correct = 0;
  double select_accuracy = 0.0;  // selected_correct / selected; 0 if !selectable
  double coverage = 0.0;         // selected / slice size
};

std::vector<double> candidate_thresholds(const ClassSlice& slice);

// Throws std::domain_error if threshold is outside [0, 1].
CandidateEval evaluate_candidate(const ClassSlice& slice, double threshold,
                                 double delta, ViabilityMethod method);

// Chosen candidate; threshold 0 for an empty slice.
CandidateEval best_candidate(const ClassSlice& slice, double delta,
                             ViabilityMethod method);

double learn_class_threshold(const ClassSlice& slice, double delta,
                             ViabilityMethod method);

struct LearnResult {
  ThresholdVector thresholds;
  std::vector<CandidateEval> per_class;  // the chosen candidate of each class
};

LearnResult learn_thresholds_detailed(const ScoreSet& val,
                                      const CalibrationMap& cal, double delta,
                                      ViabilityMethod method);

ThresholdVector learn_thresholds(const ScoreSet& val, const CalibrationMap& cal,
                                 double delta, ViabilityMethod method);

}  // namespace rejectkit
