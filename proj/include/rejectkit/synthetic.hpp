#pragma once

// Seeded 2-D datasets with known class densities, scored by the analytic
// Bayes posterior of the generating distribution.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rejectkit/score_model.hpp"

namespace rejectkit {

struct UniformRect {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;

  double area() const { return (xmax - xmin) * (ymax - ymin); }
  bool contains(const Point2& p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
};

struct IsotropicGaussian {
  Point2 mean;
  double sigma = 1.0;
};

using ClassShape = std::variant<UniformRect, IsotropicGaussian>;

struct SyntheticClass {
  ClassShape shape;
  double weight = 1.0;  // density-ratio weight; also scales the sample count
};

struct PartitionCounts {
  std::size_t train = 1000;
  std::size_t val = 1000;
  std::size_t test = 4000;
};

struct SyntheticSpec {
  std::vector<SyntheticClass> classes;
  PartitionCounts per_class_counts;  // counts for the lightest class
  std::uint64_t seed = 0;

  // Throws std::invalid_argument when the spec is malformed.
  void validate() const;

  // Every class is a rectangle with the same weight / area.
  bool equal_density_uniform() const;

  // Examples of class j in a partition of base size `base`:
  // round(base * weight_j / min weight).
  std::size_t class_count_for(std::size_t class_index, std::size_t base) const;
};

inline constexpr double kLogDensityFloor = -1e9;

// log(weight_j * density_j(point)), floored at kLogDensityFloor.
std::vector<double> bayes_logits(const Point2& point, const SyntheticSpec& spec);

// True where two or more classes share the maximal posterior.
bool ideal_reject(const Point2& point, const SyntheticSpec& spec);

struct SyntheticData {
  ScoreSet train;
  ScoreSet val;
  ScoreSet test;
  // Present only for equal-density uniform specs.
  std::optional<std::vector<bool>> train_mask;
  std::optional<std::vector<bool>> val_mask;
  std::optional<std::vector<bool>> test_mask;
};

// Deterministic in spec (including seed). Each (partition, class) pair draws
// from its own mt19937_64 stream seeded through splitmix64, and uniform and
// normal variates are derived from raw 64-bit outputs, so datasets are
// identical across platforms up to libm rounding.
SyntheticData generate(const SyntheticSpec& spec);

std::uint64_t splitmix64(std::uint64_t x);

// Built-in presets "synthetic1" .. "synthetic8". Shapes and offsets are
// hand-picked to give the intended overlap and density ratios.
std::vector<std::string> preset_names();
// Throws std::invalid_argument naming the available presets.
SyntheticSpec preset(const std::string& name);

SyntheticSpec spec_from_json(const std::string& text);
std::string spec_to_json(const SyntheticSpec& spec);

}  // namespace rejectkit
