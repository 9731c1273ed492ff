#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "rejectkit/score_io.hpp"

namespace rejectkit {
namespace {

namespace fs = std::filesystem;

const fs::path kData = REJECTKIT_TEST_DATA;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rejectkit_score_io_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string write_to_string(const ScoreSet& set) {
  std::ostringstream out;
  write_scoreset(set, out);
  return out.str();
}

TEST(ScoreCsv, GoldenRoundTripIsByteIdentical) {
  const std::string golden = read_file(kData / "golden_scores.csv");
  const ScoreSet set = read_scoreset(kData / "golden_scores.csv");
  ASSERT_EQ(set.size(), 10u);
  EXPECT_EQ(set.class_count(), 3u);
  EXPECT_TRUE(set.has_coords());
  EXPECT_EQ(set[3].logits[0], 1e-5);
  EXPECT_EQ(set[4].logits[0], -1e9);
  EXPECT_EQ(set[2].coord->y, 3.0);
  EXPECT_EQ(write_to_string(set), golden);
}

TEST(ScoreCsv, MinimalFileWithoutCoords) {
  const ScoreSet set = read_scoreset(kData / "minimal.csv");
  ASSERT_EQ(set.size(), 1u);
  EXPECT_FALSE(set.has_coords());
  EXPECT_EQ(set[0].id, "only");
  EXPECT_EQ(set[0].label, 1);
}

TEST(ScoreCsv, LabelOutOfRangeNamesTheRow) {
  try {
    read_scoreset(kData / "bad_label.csv");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
    EXPECT_EQ(e.column(), 2u);
    EXPECT_NE(std::string(e.what()).find("bad_label.csv:3:2"), std::string::npos)
        << e.what();
  }
}

TEST(ScoreCsv, MalformedInputs) {
  const auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_scoreset(in, "t");
  };
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("id,label\n"), ParseError);
  EXPECT_THROW(parse("id,label,logit_1\n"), ParseError);
  EXPECT_THROW(parse("id,label,logit_0,logit_1\na,0,1\n"), ParseError);
  EXPECT_THROW(parse("id,label,logit_0,logit_1\na,0,1,zz\n"), ParseError);
  EXPECT_THROW(parse("id,label,logit_0,logit_1\na,0,1,nan\n"), ParseError);
  EXPECT_THROW(parse("id,label,logit_0,logit_1\na,0,1,2\na,1,1,2\n"), ParseError);
  EXPECT_THROW(parse("id,label,logit_0,logit_1\n,0,1,2\n"), ParseError);
  EXPECT_THROW(parse("id,label,logit_0,logit_1\na,-1,1,2\n"), ParseError);
  // Windows line endings and blank lines are tolerated.
  const ScoreSet set = parse("id,label,logit_0,logit_1\r\na,0,1,2\r\n\r\nb,1,3,4\r\n");
  EXPECT_EQ(set.size(), 2u);
}

TEST(ThresholdJson, GoldenRoundTrip) {
  const std::string golden = read_file(kData / "golden_thresholds.json");
  const ThresholdVector tv = read_thresholds(kData / "golden_thresholds.json");
  EXPECT_EQ(tv.method, ViabilityMethod::kWilsonCC);
  EXPECT_EQ(tv.delta, 0.05);
  EXPECT_EQ(tv.thresholds, (std::vector<double>{0.0, 0.6123, 0.875}));
  EXPECT_EQ(tv.temperatures, (std::vector<double>{1.0, 1.375, 0.5}));
  EXPECT_EQ(thresholds_to_json(tv), golden);
}

TEST(ThresholdJson, RejectsInconsistentDocuments) {
  EXPECT_THROW(thresholds_from_json("{"), std::invalid_argument);
  EXPECT_THROW(thresholds_from_json(R"({"class_count":2,"delta":0.05,"method":"bcdf",
      "temperatures":[1,1],"thresholds":[0]})"),
               std::invalid_argument);
  EXPECT_THROW(thresholds_from_json(R"({"class_count":1,"delta":0.05,"method":"nope",
      "temperatures":[1],"thresholds":[0]})"),
               std::invalid_argument);
  EXPECT_THROW(thresholds_from_json(R"({"class_count":1,"delta":0.05,"method":"bcdf",
      "temperatures":[1],"thresholds":[1.5]})"),
               std::invalid_argument);
}

TEST(Mask, RoundTripFollowsSetOrder) {
  const ScoreSet set = read_scoreset(kData / "golden_scores.csv");
  std::vector<bool> mask(set.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = i % 3 == 0;
  const fs::path path = scratch("mask.csv");
  write_mask(set, mask, path);
  EXPECT_EQ(read_mask(path, set), mask);
}

TEST(FormatReal, ShortestRoundTrip) {
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(2.0), "2");
  EXPECT_EQ(std::stod(format_real(1.0 / 3.0)), 1.0 / 3.0);
}

// Property: read(write(S)) == S for random sets, including extreme reals.
TEST(ScoreCsvProperty, ReadInvertsWrite) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> bits_gen(0, 1);
  std::uniform_int_distribution<std::uint64_t> raw;
  const auto random_real = [&]() {
    for (;;) {
      double v;
      const std::uint64_t b = raw(rng);
      std::memcpy(&v, &b, sizeof v);
      if (std::isfinite(v)) return v;
    }
  };
  std::normal_distribution<double> normal(0.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t c = 1 + trial % 7;
    const bool coords = bits_gen(rng);
    const std::size_t n = trial % 25;
    std::vector<Example> ex;
    for (std::size_t i = 0; i < n; ++i) {
      Example e;
      e.id = "e" + std::to_string(trial) + "_" + std::to_string(i);
      e.label = static_cast<int>(raw(rng) % c);
      for (std::size_t j = 0; j < c; ++j) {
        e.logits.push_back(bits_gen(rng) ? random_real() : normal(rng));
      }
      if (coords) e.coord = Point2{normal(rng), random_real()};
      ex.push_back(std::move(e));
    }
    const ScoreSet set(c, std::move(ex));
    const std::string text = write_to_string(set);
    std::istringstream in(text);
    EXPECT_EQ(read_scoreset(in), set) << text;
  }
}

// Property: thresholds_from_json inverts thresholds_to_json.
TEST(ThresholdJsonProperty, ReadInvertsWrite) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> temp(0.05, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    ThresholdVector tv = base_thresholds(1 + trial % 9);
    for (double& t : tv.thresholds) t = unit(rng);
    for (double& t : tv.temperatures) t = temp(rng);
    tv.delta = std::nextafter(unit(rng), 0.5);
    tv.method = kAllViabilityMethods[trial % std::size(kAllViabilityMethods)];
    EXPECT_EQ(thresholds_from_json(thresholds_to_json(tv)), tv);
  }
}

}  // namespace
}  // namespace rejectkit
