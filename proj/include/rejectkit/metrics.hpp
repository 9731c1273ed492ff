#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rejectkit/randomness.hpp"
#include "rejectkit/score_model.hpp"

namespace rejectkit {

// Fraction of examples whose raw argmax equals the label.
// Throws std::domain_error on an empty set.
double accuracy(const ScoreSet& set);

struct ClassReport {
  std::size_t count = 0;     // examples predicted as this class
  std::size_t selected = 0;
  std::size_t selected_correct = 0;
  RegionTally reject;        // rejected examples and how many were correct
  double coverage = 0.0;     // selected / count (1 when count = 0)
  std::optional<double> select_accuracy;
  bool viable = true;        // reject tally passes the threshold's own test
};

struct EvalReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t selected = 0;
  std::size_t selected_correct = 0;
  std::size_t rejected = 0;
  std::size_t rejected_correct = 0;
  double accuracy = 0.0;
  double coverage = 0.0;
  std::optional<double> select_accuracy;  // absent when nothing is selected
  std::optional<double> reject_accuracy;  // absent when nothing is rejected
  std::optional<double> ida;              // present when an ideal mask is given
  bool pooled_viable = true;  // pooled reject region under tv.delta / tv.method
  std::vector<ClassReport> per_class;
};

// Throws std::domain_error on length mismatches or an empty set.
EvalReport evaluate(const ScoreSet& set, const ThresholdVector& tv,
                    const std::vector<bool>* ideal_mask = nullptr);

// Rejection bits (true = rejected) for every example.
std::vector<bool> rejection_bits(const ScoreSet& set, const ThresholdVector& tv);

// Fractions rounded to 1e-6; absent values serialize as null.
std::string report_to_json(const EvalReport& report,
                           const std::string& timestamp = "");
// One row per predicted class.
std::string report_class_csv(const EvalReport& report);

// "--" for absent values, otherwise a one-decimal percentage.
std::string percent_or_dash(const std::optional<double>& fraction);

struct TTestResult {
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 0.5;  // one-sided, H1: mean(a) < mean(b)
};

// Welch's t-test. Throws std::domain_error when either series has fewer
// than two values.
TTestResult compare_runs(std::span<const double> a, std::span<const double> b);

// P(T <= t) for Student's t with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

double mean(std::span<const double> values);
double sample_stddev(std::span<const double> values);

}  // namespace rejectkit
