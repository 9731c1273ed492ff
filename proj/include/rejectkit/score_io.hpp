#pragma once

// Interchange formats.
//
//   ScoreSet CSV    id,label,logit_0,...,logit_{c-1}[,x,y]
//   Mask CSV        id,ideal_reject            (0/1 per example)
//   Thresholds JSON {"class_count":c,"delta":d,"method":"bcdf",
//                    "temperatures":[...],"thresholds":[...]}
//
// Reals are written in shortest round-trip form, so write -> read reproduces
// every value bit for bit.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rejectkit/score_model.hpp"

namespace rejectkit {

class ParseError : public std::runtime_error {
 public:
  // row is 1-based including the header line; column is the 1-based field
  // index, or 0 when the whole row is at fault.
  ParseError(std::string source, std::size_t row, std::size_t column,
             const std::string& what);

  const std::string& source() const { return source_; }
  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::string source_;
  std::size_t row_;
  std::size_t column_;
};

ScoreSet read_scoreset(std::istream& in, const std::string& source = "<stream>");
ScoreSet read_scoreset(const std::filesystem::path& path);
void write_scoreset(const ScoreSet& set, std::ostream& out);
void write_scoreset(const ScoreSet& set, const std::filesystem::path& path);

std::vector<bool> read_mask(const std::filesystem::path& path,
                            const ScoreSet& set);
void write_mask(const ScoreSet& set, const std::vector<bool>& mask,
                const std::filesystem::path& path);

std::string thresholds_to_json(const ThresholdVector& tv);
ThresholdVector thresholds_from_json(const std::string& text);
ThresholdVector read_thresholds(const std::filesystem::path& path);
void write_thresholds(const ThresholdVector& tv,
                      const std::filesystem::path& path);

// Shortest decimal string that parses back to exactly `value`.
std::string format_real(double value);

// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace rejectkit
