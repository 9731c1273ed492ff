#include "rejectkit/learner.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace rejectkit {
namespace {

// a_num / a_den > b_num / b_den on exact integer counts.
bool strictly_better(std::size_t a_num, std::size_t a_den, std::size_t b_num,
                     std::size_t b_den) {
  return a_num * b_den > b_num * a_den;
}

}  // namespace

ClassSlice::ClassSlice(int class_index, std::vector<SliceMember> members)
    : class_index_(class_index), members_(std::move(members)) {
  for (const SliceMember& m : members_) {
    if (!(m.confidence >= 0.0 && m.confidence <= 1.0)) {
      throw std::invalid_argument("slice confidences must lie in [0, 1]");
    }
  }
  std::stable_sort(members_.begin(), members_.end(),
                   [](const SliceMember& a, const SliceMember& b) {
                     return a.confidence < b.confidence;
                   });
  correct_prefix_.assign(members_.size() + 1, 0);
  for (std::size_t i = 0; i < members_.size(); ++i) {
    correct_prefix_[i + 1] = correct_prefix_[i] + (members_[i].correct ? 1 : 0);
  }
  correct_total_ = correct_prefix_.back();
}

RegionTally ClassSlice::tally_at(double threshold) const {
  const auto end = std::upper_bound(
      members_.begin(), members_.end(), threshold,
      [](double t, const SliceMember& m) { return t < m.confidence; });
  const auto n = static_cast<std::size_t>(end - members_.begin());
  return RegionTally{static_cast<std::int64_t>(n),
                     static_cast<std::int64_t>(correct_prefix_[n])};
}

std::vector<ClassSlice> partition_by_prediction(
    std::span<const CalibratedScore> scores, std::size_t class_count) {
  std::vector<std::vector<SliceMember>> groups(class_count);
  for (const CalibratedScore& s : scores) {
    if (s.predicted < 0 || static_cast<std::size_t>(s.predicted) >= class_count) {
      throw std::domain_error("predicted class out of range");
    }
    groups[s.predicted].push_back({s.confidence, s.correct});
  }
  std::vector<ClassSlice> slices;
  slices.reserve(class_count);
  for (std::size_t j = 0; j < class_count; ++j) {
    slices.emplace_back(static_cast<int>(j), std::move(groups[j]));
  }
  return slices;
}

std::vector<double> candidate_thresholds(const ClassSlice& slice) {
  std::vector<double> out{0.0};
  for (const SliceMember& m : slice.members()) {
    if (!m.correct && m.confidence != out.back()) out.push_back(m.confidence);
  }
  return out;
}

CandidateEval evaluate_candidate(const ClassSlice& slice, double threshold,
                                 double delta, ViabilityMethod method) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw std::domain_error("threshold must lie in [0, 1]");
  }
  CandidateEval e;
  e.threshold = threshold;
  e.tally = slice.tally_at(threshold);
  e.viable = region_viable(e.tally, delta, method);
  e.selected = slice.size() - static_cast<std::size_t>(e.tally.n);
  e.selected_correct = slice.correct_count() - static_cast<std::size_t>(e.tally.k);
  e.selectable = e.selected > 0;
  if (e.selectable) {
    e.select_accuracy = static_cast<double>(e.selected_correct) /
                        static_cast<double>(e.selected);
  }
  e.coverage = slice.empty() ? 1.0
                             : static_cast<double>(e.selected) /
                                   static_cast<double>(slice.size());
  return e;
}

CandidateEval best_candidate(const ClassSlice& slice, double delta,
                             ViabilityMethod method) {
  CandidateEval best = evaluate_candidate(slice, 0.0, delta, method);
  if (slice.empty()) return best;
  for (double t : candidate_thresholds(slice)) {
    if (t == 0.0) continue;
    const CandidateEval e = evaluate_candidate(slice, t, delta, method);
    if (!e.viable || !e.selectable) continue;
    if (strictly_better(e.selected_correct, e.selected, best.selected_correct,
                        best.selected)) {
      best = e;
    }
  }
  return best;
}

double learn_class_threshold(const ClassSlice& slice, double delta,
                             ViabilityMethod method) {
  return best_candidate(slice, delta, method).threshold;
}

LearnResult learn_thresholds_detailed(const ScoreSet& val,
                                      const CalibrationMap& cal, double delta,
                                      ViabilityMethod method) {
  if (val.empty()) {
    throw std::domain_error("cannot learn thresholds from an empty score set");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error("delta must lie in (0, 1)");
  }
  const auto scores = apply_calibration(val, cal);
  const auto slices = partition_by_prediction(scores, val.class_count());

  LearnResult result;
  result.thresholds.delta = delta;
  result.thresholds.method = method;
  result.thresholds.temperatures = cal.temperatures;
  result.thresholds.thresholds.reserve(slices.size());
  result.per_class.reserve(slices.size());
  for (const ClassSlice& slice : slices) {
    CandidateEval chosen = best_candidate(slice, delta, method);
    result.thresholds.thresholds.push_back(chosen.threshold);
    result.per_class.push_back(chosen);
  }
  return result;
}

ThresholdVector learn_thresholds(const ScoreSet& val, const CalibrationMap& cal,
                                 double delta, ViabilityMethod method) {
  return learn_thresholds_detailed(val, cal, delta, method).thresholds;
}

}  // namespace rejectkit
