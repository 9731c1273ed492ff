#include "rejectkit/score_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace rejectkit {
namespace {

using nlohmann::json;

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

template <typename T>
bool parse_whole(std::string_view text, T& out) {
  if (text.empty()) return false;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

struct Header {
  std::size_t class_count = 0;
  bool has_coords = false;
};

Header parse_header(std::string_view line, const std::string& source) {
  const auto fields = split_fields(line);
  if (fields.size() < 3 || fields[0] != "id" || fields[1] != "label") {
    throw ParseError(source, 1, 0,
                     "header must start with id,label,logit_0");
  }
  Header h;
  std::size_t i = 2;
  for (; i < fields.size(); ++i) {
    if (fields[i] != "logit_" + std::to_string(h.class_count)) break;
    ++h.class_count;
  }
  if (h.class_count == 0) {
    throw ParseError(source, 1, 3, "expected column logit_0");
  }
  if (i == fields.size()) return h;
  if (fields.size() - i == 2 && fields[i] == "x" && fields[i + 1] == "y") {
    h.has_coords = true;
    return h;
  }
  throw ParseError(source, 1, i + 1,
                   "unexpected header column '" + std::string(fields[i]) +
                       "' (expected logit_" + std::to_string(h.class_count) +
                       " or trailing x,y)");
}

double parse_real(std::string_view field, const std::string& source,
                  std::size_t row, std::size_t column) {
  double v = 0.0;
  if (!parse_whole(field, v)) {
    throw ParseError(source, row, column,
                     "'" + std::string(field) + "' is not a decimal number");
  }
  if (!std::isfinite(v)) {
    throw ParseError(source, row, column, "non-finite value");
  }
  return v;
}

void check_id(const std::string& id) {
  if (id.empty() || id.find_first_of(",\r\n") != std::string::npos) {
    throw std::invalid_argument("example id '" + id +
                                "' cannot be written to CSV");
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "'");
  return out;
}

}  // namespace

ParseError::ParseError(std::string source, std::size_t row, std::size_t column,
                       const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(row) +
                         (column ? ":" + std::to_string(column) : "") + ": " +
                         what),
      source_(std::move(source)),
      row_(row),
      column_(column) {}

std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("cannot format value");
  return std::string(buf, ptr);
}

ScoreSet read_scoreset(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(source, 1, 0, "missing header");
  }
  const Header header = parse_header(strip_cr(line), source);
  const std::size_t width =
      2 + header.class_count + (header.has_coords ? 2 : 0);

  std::vector<Example> examples;
  std::unordered_set<std::string> seen;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    const std::string_view text = strip_cr(line);
    if (text.empty()) continue;
    const auto fields = split_fields(text);
    if (fields.size() != width) {
      throw ParseError(source, row, 0,
                       "expected " + std::to_string(width) + " fields, found " +
                           std::to_string(fields.size()));
    }
    Example ex;
    ex.id = std::string(fields[0]);
    if (ex.id.empty()) throw ParseError(source, row, 1, "empty id");
    if (!seen.insert(ex.id).second) {
      throw ParseError(source, row, 1, "duplicate id '" + ex.id + "'");
    }
    if (!parse_whole(fields[1], ex.label)) {
      throw ParseError(source, row, 2,
                       "label '" + std::string(fields[1]) +
                           "' is not an integer");
    }
    if (ex.label < 0 ||
        static_cast<std::size_t>(ex.label) >= header.class_count) {
      throw ParseError(source, row, 2,
                       "label " + std::to_string(ex.label) + " outside [0, " +
                           std::to_string(header.class_count) + ")");
    }
    ex.logits.reserve(header.class_count);
    for (std::size_t j = 0; j < header.class_count; ++j) {
      ex.logits.push_back(parse_real(fields[2 + j], source, row, 3 + j));
    }
    if (header.has_coords) {
      const std::size_t xi = 2 + header.class_count;
      ex.coord = Point2{parse_real(fields[xi], source, row, xi + 1),
                        parse_real(fields[xi + 1], source, row, xi + 2)};
    }
    examples.push_back(std::move(ex));
  }
  return ScoreSet(header.class_count, std::move(examples));
}

ScoreSet read_scoreset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return read_scoreset(in, path.string());
}

void write_scoreset(const ScoreSet& set, std::ostream& out) {
  out << "id,label";
  for (std::size_t j = 0; j < set.class_count(); ++j) out << ",logit_" << j;
  if (set.has_coords()) out << ",x,y";
  out << '\n';
  for (const Example& ex : set.examples()) {
    check_id(ex.id);
    out << ex.id << ',' << ex.label;
    for (double v : ex.logits) out << ',' << format_real(v);
    if (ex.coord) {
      out << ',' << format_real(ex.coord->x) << ',' << format_real(ex.coord->y);
    }
    out << '\n';
  }
}

void write_scoreset(const ScoreSet& set, const std::filesystem::path& path) {
  std::ostringstream buf;
  write_scoreset(set, buf);
  write_file_atomic(path, buf.str());
}

std::vector<bool> read_mask(const std::filesystem::path& path,
                            const ScoreSet& set) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  const std::string source = path.string();
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "id,ideal_reject") {
    throw ParseError(source, 1, 0, "header must be id,ideal_reject");
  }
  std::unordered_map<std::string, bool> bits;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    const std::string_view text = strip_cr(line);
    if (text.empty()) continue;
    const auto fields = split_fields(text);
    if (fields.size() != 2) {
      throw ParseError(source, row, 0, "expected 2 fields");
    }
    if (fields[1] != "0" && fields[1] != "1") {
      throw ParseError(source, row, 2, "ideal_reject must be 0 or 1");
    }
    if (!bits.emplace(std::string(fields[0]), fields[1] == "1").second) {
      throw ParseError(source, row, 1, "duplicate id");
    }
  }
  std::vector<bool> mask;
  mask.reserve(set.size());
  for (const Example& ex : set.examples()) {
    const auto it = bits.find(ex.id);
    if (it == bits.end()) {
      throw ParseError(source, 0, 0, "no mask entry for id '" + ex.id + "'");
    }
    mask.push_back(it->second);
  }
  return mask;
}

void write_mask(const ScoreSet& set, const std::vector<bool>& mask,
                const std::filesystem::path& path) {
  if (mask.size() != set.size()) {
    throw std::invalid_argument("mask length does not match score set");
  }
  std::ostringstream out;
  out << "id,ideal_reject\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    out << set[i].id << ',' << (mask[i] ? '1' : '0') << '\n';
  }
  write_file_atomic(path, out.str());
}

std::string thresholds_to_json(const ThresholdVector& tv) {
  tv.validate();
  json j;
  j["class_count"] = tv.class_count();
  j["delta"] = tv.delta;
  j["method"] = std::string(to_string(tv.method));
  j["temperatures"] = tv.temperatures;
  j["thresholds"] = tv.thresholds;
  return j.dump(2) + "\n";
}

ThresholdVector thresholds_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("threshold file must hold a JSON object");
  }
  for (const char* key :
       {"class_count", "delta", "method", "temperatures", "thresholds"}) {
    if (!j.contains(key)) {
      throw std::invalid_argument(std::string("missing field '") + key + "'");
    }
  }
  ThresholdVector tv;
  try {
    tv.delta = j.at("delta").get<double>();
    tv.method = parse_viability_method(j.at("method").get<std::string>());
    tv.temperatures = j.at("temperatures").get<std::vector<double>>();
    tv.thresholds = j.at("thresholds").get<std::vector<double>>();
    const auto count = j.at("class_count").get<std::size_t>();
    if (count != tv.thresholds.size()) {
      throw std::invalid_argument("class_count " + std::to_string(count) +
                                  " does not match " +
                                  std::to_string(tv.thresholds.size()) +
                                  " thresholds");
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad field type: ") + e.what());
  }
  tv.validate();
  return tv;
}

ThresholdVector read_thresholds(const std::filesystem::path& path) {
  try {
    return thresholds_from_json(read_file(path));
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.string(), 0, 0, e.what());
  }
}

void write_thresholds(const ThresholdVector& tv,
                      const std::filesystem::path& path) {
  write_file_atomic(path, thresholds_to_json(tv));
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out = open_output(tmp);
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace rejectkit
