#include "rejectkit/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace rejectkit {
namespace {

double log_softmax_at(const std::vector<double>& logits, std::size_t index,
                      double temperature) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double z : logits) total += std::exp((z - top) / temperature);
  return (logits[index] - top) / temperature - std::log(total);
}

struct Candidate {
  double temperature;
  double nll;
};

// exp() of a grid point can land one ulp outside the search range.
double temperature_at(double log_t) {
  return std::clamp(std::exp(log_t), kMinTemperature, kMaxTemperature);
}

// Golden-section search for the NLL minimum over log T in [lo, hi].
Candidate golden_section(const ScoreSet& set,
                         const std::vector<std::size_t>& members, double lo,
                         double hi) {
  constexpr double kInvPhi = 0.6180339887498949;
  constexpr int kIterations = 60;
  auto f = [&](double log_t) { return mean_nll(set, members, temperature_at(log_t)); };
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < kIterations && (b - a) > 1e-9; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? Candidate{temperature_at(c), fc} : Candidate{temperature_at(d), fd};
}

void check_class_count(const ScoreSet& set, std::size_t count) {
  if (count != set.class_count()) {
    throw std::domain_error("calibration has " + std::to_string(count) +
                            " temperatures but the score set has " +
                            std::to_string(set.class_count()) + " classes");
  }
}

}  // namespace

CalibrationMap identity_calibration(std::size_t class_count) {
  return CalibrationMap{std::vector<double>(class_count, 1.0),
                        std::vector<ClassFitStats>(class_count)};
}

double mean_nll(const ScoreSet& set, const std::vector<std::size_t>& members,
                double temperature) {
  if (members.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i : members) {
    const Example& ex = set[i];
    total -= log_softmax_at(ex.logits, static_cast<std::size_t>(ex.label),
                            temperature);
  }
  return total / static_cast<double>(members.size());
}

CalibrationMap fit_per_class_temperature(const ScoreSet& set) {
  if (set.empty()) {
    throw std::domain_error("cannot fit temperatures on an empty score set");
  }
  const std::size_t c = set.class_count();
  std::vector<std::vector<std::size_t>> groups(c);
  for (std::size_t i = 0; i < set.size(); ++i) {
    groups[argmax(set[i].logits)].push_back(i);
  }

  const double log_lo = std::log(kMinTemperature);
  const double log_hi = std::log(kMaxTemperature);
  const double step = (log_hi - log_lo) / (kTemperatureGridPoints - 1);

  CalibrationMap cal = identity_calibration(c);
  for (std::size_t j = 0; j < c; ++j) {
    const auto& members = groups[j];
    ClassFitStats& stats = cal.fit_stats[j];
    stats.count = members.size();
    if (members.empty()) continue;

    stats.nll_before = mean_nll(set, members, 1.0);
    Candidate best{1.0, stats.nll_before};
    int best_index = -1;
    for (int g = 0; g < kTemperatureGridPoints; ++g) {
      const double t = temperature_at(log_lo + step * g);
      const double nll = mean_nll(set, members, t);
      if (nll < best.nll) {
        best = {t, nll};
        best_index = g;
      }
    }

    double bracket_lo;
    double bracket_hi;
    if (best_index >= 0) {
      bracket_lo = log_lo + step * std::max(0, best_index - 1);
      bracket_hi = log_lo + step * std::min(kTemperatureGridPoints - 1,
                                            best_index + 1);
    } else {
      const double g = std::floor((0.0 - log_lo) / step);
      bracket_lo = log_lo + step * g;
      bracket_hi = bracket_lo + step;
    }
    const Candidate refined = golden_section(set, members, bracket_lo, bracket_hi);
    if (refined.nll < best.nll) best = refined;

    cal.temperatures[j] = best.temperature;
    stats.nll_after = best.nll;
  }
  return cal;
}

std::vector<CalibratedScore> apply_calibration(
    const ScoreSet& set, const std::vector<double>& temperatures) {
  check_class_count(set, temperatures.size());
  std::vector<CalibratedScore> out;
  out.reserve(set.size());
  for (const Example& ex : set.examples()) {
    CalibratedScore s;
    s.predicted = argmax(ex.logits);
    s.confidence = softmax(ex.logits, temperatures[s.predicted])[s.predicted];
    s.correct = s.predicted == ex.label;
    out.push_back(s);
  }
  return out;
}

std::vector<CalibratedScore> apply_calibration(const ScoreSet& set,
                                               const CalibrationMap& cal) {
  return apply_calibration(set, cal.temperatures);
}

std::string calibration_to_json(const CalibrationMap& cal) {
  nlohmann::json j;
  j["temperatures"] = cal.temperatures;
  return j.dump(2) + "\n";
}

CalibrationMap calibration_from_json(const std::string& text) {
  CalibrationMap cal;
  try {
    const auto j = nlohmann::json::parse(text);
    cal.temperatures = j.at("temperatures").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad calibration JSON: ") + e.what());
  }
  for (double t : cal.temperatures) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw std::invalid_argument("temperatures must be positive and finite");
    }
  }
  cal.fit_stats.resize(cal.temperatures.size());
  return cal;
}

}  // namespace rejectkit
