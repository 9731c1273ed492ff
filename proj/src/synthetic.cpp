#include "rejectkit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace rejectkit {
namespace {

using nlohmann::json;

enum class Partition : std::uint64_t { kTrain = 0, kVal = 1, kTest = 2 };

const char* partition_name(Partition p) {
  switch (p) {
    case Partition::kTrain:
      return "train";
    case Partition::kVal:
      return "val";
    case Partition::kTest:
      return "test";
  }
  return "?";
}

std::mt19937_64 stream_for(std::uint64_t seed, Partition partition,
                           std::size_t class_index) {
  const std::uint64_t stream =
      (static_cast<std::uint64_t>(partition) << 32) | class_index;
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 1)));
}

// [0, 1) with 53 random bits.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Point2 draw(const ClassShape& shape, std::mt19937_64& rng) {
  if (const auto* rect = std::get_if<UniformRect>(&shape)) {
    const double u = unit_uniform(rng);
    const double v = unit_uniform(rng);
    return {rect->xmin + u * (rect->xmax - rect->xmin),
            rect->ymin + v * (rect->ymax - rect->ymin)};
  }
  const auto& g = std::get<IsotropicGaussian>(shape);
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u = 1.0 - unit_uniform(rng);
  const double v = unit_uniform(rng);
  const double r = std::sqrt(-2.0 * std::log(u));
  const double theta = 2.0 * std::numbers::pi * v;
  return {g.mean.x + g.sigma * r * std::cos(theta),
          g.mean.y + g.sigma * r * std::sin(theta)};
}

double log_density(const ClassShape& shape, const Point2& p) {
  if (const auto* rect = std::get_if<UniformRect>(&shape)) {
    return rect->contains(p) ? -std::log(rect->area()) : kLogDensityFloor;
  }
  const auto& g = std::get<IsotropicGaussian>(shape);
  const double dx = p.x - g.mean.x;
  const double dy = p.y - g.mean.y;
  const double s2 = g.sigma * g.sigma;
  return -(dx * dx + dy * dy) / (2.0 * s2) -
         std::log(2.0 * std::numbers::pi * s2);
}

struct Partitioned {
  ScoreSet set;
  std::optional<std::vector<bool>> mask;
};

Partitioned make_partition(const SyntheticSpec& spec, Partition partition,
                           std::size_t base) {
  const bool with_mask = spec.equal_density_uniform();
  std::vector<Example> examples;
  std::vector<bool> mask;
  std::size_t index = 0;
  char id[48];
  for (std::size_t j = 0; j < spec.classes.size(); ++j) {
    auto rng = stream_for(spec.seed, partition, j);
    const std::size_t count = spec.class_count_for(j, base);
    for (std::size_t i = 0; i < count; ++i) {
      Example ex;
      std::snprintf(id, sizeof(id), "%s-%06zu", partition_name(partition),
                    index++);
      ex.id = id;
      ex.label = static_cast<int>(j);
      const Point2 p = draw(spec.classes[j].shape, rng);
      ex.logits = bayes_logits(p, spec);
      ex.coord = p;
      if (with_mask) mask.push_back(ideal_reject(p, spec));
      examples.push_back(std::move(ex));
    }
  }
  Partitioned out{ScoreSet(spec.classes.size(), std::move(examples)),
                  std::nullopt};
  if (with_mask) out.mask = std::move(mask);
  return out;
}

SyntheticClass rect(double xmin, double ymin, double side, double weight = 1.0) {
  return {UniformRect{xmin, xmin + side, ymin, ymin + side}, weight};
}

SyntheticClass gauss(double x, double y, double weight, double sigma = 1.0) {
  return {IsotropicGaussian{{x, y}, sigma}, weight};
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void SyntheticSpec::validate() const {
  if (classes.size() < 2) {
    throw std::invalid_argument("a synthetic spec needs at least two classes");
  }
  for (const SyntheticClass& c : classes) {
    if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
      throw std::invalid_argument("class weights must be positive");
    }
    if (const auto* r = std::get_if<UniformRect>(&c.shape)) {
      if (!(r->xmin < r->xmax && r->ymin < r->ymax) ||
          !std::isfinite(r->area())) {
        throw std::invalid_argument("rectangle bounds must be ordered and finite");
      }
    } else {
      const auto& g = std::get<IsotropicGaussian>(c.shape);
      if (!(g.sigma > 0.0) || !std::isfinite(g.sigma) ||
          !std::isfinite(g.mean.x) || !std::isfinite(g.mean.y)) {
        throw std::invalid_argument("gaussian needs a finite mean and sigma > 0");
      }
    }
  }
  if (per_class_counts.train == 0 || per_class_counts.val == 0 ||
      per_class_counts.test == 0) {
    throw std::invalid_argument("per-class counts must be positive");
  }
}

bool SyntheticSpec::equal_density_uniform() const {
  double reference = 0.0;
  for (std::size_t j = 0; j < classes.size(); ++j) {
    const auto* r = std::get_if<UniformRect>(&classes[j].shape);
    if (!r) return false;
    const double density = classes[j].weight / r->area();
    if (j == 0) {
      reference = density;
    } else if (std::fabs(density - reference) > 1e-12 * reference) {
      return false;
    }
  }
  return true;
}

std::size_t SyntheticSpec::class_count_for(std::size_t class_index,
                                           std::size_t base) const {
  double lightest = classes.front().weight;
  for (const SyntheticClass& c : classes) lightest = std::min(lightest, c.weight);
  return static_cast<std::size_t>(std::llround(
      static_cast<double>(base) * classes[class_index].weight / lightest));
}

std::vector<double> bayes_logits(const Point2& point, const SyntheticSpec& spec) {
  std::vector<double> logits;
  logits.reserve(spec.classes.size());
  for (const SyntheticClass& c : spec.classes) {
    const double ld = log_density(c.shape, point);
    logits.push_back(ld <= kLogDensityFloor
                         ? kLogDensityFloor
                         : std::max(kLogDensityFloor, std::log(c.weight) + ld));
  }
  return logits;
}

bool ideal_reject(const Point2& point, const SyntheticSpec& spec) {
  auto probs = softmax(bayes_logits(point, spec));
  std::sort(probs.begin(), probs.end(), std::greater<>());
  return probs[0] - probs[1] <= 1e-9;
}

SyntheticData generate(const SyntheticSpec& spec) {
  spec.validate();
  auto train = make_partition(spec, Partition::kTrain, spec.per_class_counts.train);
  auto val = make_partition(spec, Partition::kVal, spec.per_class_counts.val);
  auto test = make_partition(spec, Partition::kTest, spec.per_class_counts.test);
  return SyntheticData{std::move(train.set), std::move(val.set),
                       std::move(test.set), std::move(train.mask),
                       std::move(val.mask), std::move(test.mask)};
}

std::vector<std::string> preset_names() {
  return {"synthetic1", "synthetic2", "synthetic3", "synthetic4",
          "synthetic5", "synthetic6", "synthetic7", "synthetic8"};
}

SyntheticSpec preset(const std::string& name) {
  SyntheticSpec spec;
  if (name == "synthetic1") {
    // Two unit squares sharing a vertical strip a quarter wide.
    spec.classes = {rect(0.0, 0.0, 1.0), rect(0.744, 0.0, 1.0)};
  } else if (name == "synthetic2") {
    // Two coincident squares: the whole support is ambiguous.
    spec.classes = {rect(0.0, 0.0, 1.0), rect(0.0, 0.0, 1.0)};
  } else if (name == "synthetic3") {
    spec.classes = {rect(0.0, 0.0, 1.0), rect(0.713, 0.0, 1.0),
                    rect(0.0, 0.713, 1.0)};
  } else if (name == "synthetic4") {
    // Four squares offset by 0.75: 2-, 3- and 4-way overlaps.
    spec.classes = {rect(0.0, 0.0, 1.0), rect(0.75, 0.0, 1.0),
                    rect(0.0, 0.75, 1.0), rect(0.75, 0.75, 1.0)};
  } else if (name == "synthetic5") {
    spec.classes = {gauss(0.0, 0.0, 2.0), gauss(2.3, 0.0, 1.0)};
  } else if (name == "synthetic6") {
    spec.classes = {gauss(0.0, 0.0, 2.0), gauss(0.3, 0.0, 1.0)};
  } else if (name == "synthetic7") {
    spec.classes = {gauss(0.0, 0.0, 4.0), gauss(2.35, 0.0, 2.0),
                    gauss(1.175, 2.035, 1.0)};
  } else if (name == "synthetic8") {
    spec.classes = {gauss(0.0, 0.0, 6.0), gauss(1.9, 0.0, 5.0),
                    gauss(0.0, 1.9, 4.0), gauss(1.9, 1.9, 3.0)};
  } else {
    std::string names;
    for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown preset '" + name +
                                "' (available: " + names + ")");
  }
  return spec;
}

SyntheticSpec spec_from_json(const std::string& text) {
  SyntheticSpec spec;
  try {
    const json j = json::parse(text);
    for (const json& c : j.at("classes")) {
      SyntheticClass cls;
      cls.weight = c.value("weight", 1.0);
      const std::string shape = c.at("shape").get<std::string>();
      if (shape == "rect") {
        cls.shape = UniformRect{c.at("xmin").get<double>(), c.at("xmax").get<double>(),
                                c.at("ymin").get<double>(), c.at("ymax").get<double>()};
      } else if (shape == "gaussian") {
        const auto m = c.at("mean").get<std::vector<double>>();
        if (m.size() != 2) throw std::invalid_argument("gaussian mean must have 2 entries");
        cls.shape = IsotropicGaussian{{m[0], m[1]}, c.at("sigma").get<double>()};
      } else {
        throw std::invalid_argument("unknown shape '" + shape +
                                    "' (expected rect or gaussian)");
      }
      spec.classes.push_back(cls);
    }
    if (j.contains("counts")) {
      const json& n = j.at("counts");
      spec.per_class_counts = {n.at("train").get<std::size_t>(),
                               n.at("val").get<std::size_t>(),
                               n.at("test").get<std::size_t>()};
    }
    spec.seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad synthetic spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::string spec_to_json(const SyntheticSpec& spec) {
  json classes = json::array();
  for (const SyntheticClass& c : spec.classes) {
    if (const auto* r = std::get_if<UniformRect>(&c.shape)) {
      classes.push_back({{"shape", "rect"}, {"xmin", r->xmin}, {"xmax", r->xmax},
                         {"ymin", r->ymin}, {"ymax", r->ymax}, {"weight", c.weight}});
    } else {
      const auto& g = std::get<IsotropicGaussian>(c.shape);
      classes.push_back({{"shape", "gaussian"},
                         {"mean", {g.mean.x, g.mean.y}},
                         {"sigma", g.sigma},
                         {"weight", c.weight}});
    }
  }
  json j;
  j["classes"] = std::move(classes);
  j["counts"] = {{"train", spec.per_class_counts.train},
                 {"val", spec.per_class_counts.val},
                 {"test", spec.per_class_counts.test}};
  j["seed"] = spec.seed;
  return j.dump(2) + "\n";
}

}  // namespace rejectkit
