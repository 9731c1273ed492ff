#include "rejectkit/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rejectkit/learner.hpp"
#include "rejectkit/score_io.hpp"

namespace rejectkit {
namespace {

using nlohmann::json;

SweepRow score_row(const SweepInputs& in, std::string name, ThresholdVector tv) {
  SweepRow row;
  row.name = std::move(name);
  row.val = evaluate(*in.val, tv, in.val_mask);
  row.test = evaluate(*in.test, tv, in.test_mask);
  row.thresholds = std::move(tv);
  return row;
}

std::string opt_real(const std::optional<double>& v) {
  return v ? format_real(std::round(*v * 1e6) / 1e6) : "";
}

json opt_json(const std::optional<double>& v) {
  return v ? json(std::round(*v * 1e6) / 1e6) : json(nullptr);
}

json split_json(const EvalReport& r) {
  return {{"select_accuracy", opt_json(r.select_accuracy)},
          {"reject_accuracy", opt_json(r.reject_accuracy)},
          {"coverage", opt_json(r.coverage)},
          {"ida", opt_json(r.ida)},
          {"selected", r.selected},
          {"rejected", r.rejected}};
}

void check_trend(const std::vector<const SweepRow*>& rows, bool on_test,
                 std::vector<std::string>& diagnostics) {
  const char* split = on_test ? "test" : "val";
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const SweepRow& lo = *rows[i - 1];
    const SweepRow& hi = *rows[i];
    const EvalReport& a = on_test ? lo.test : lo.val;
    const EvalReport& b = on_test ? hi.test : hi.val;
    if (a.select_accuracy && b.select_accuracy &&
        *b.select_accuracy > *a.select_accuracy) {
      diagnostics.push_back("trend: " + hi.name + " " + split +
                            " select accuracy " +
                            format_real(*b.select_accuracy) + " exceeds " +
                            lo.name + " " + format_real(*a.select_accuracy));
    }
    if (b.coverage < a.coverage) {
      diagnostics.push_back("trend: " + hi.name + " " + split + " coverage " +
                            format_real(b.coverage) + " below " + lo.name + " " +
                            format_real(a.coverage));
    }
  }
}

}  // namespace

std::string sweep_row_name(double delta, ViabilityMethod method) {
  const std::string prefix = method == ViabilityMethod::kBinomialCdf
                                 ? "B-CDF"
                                 : std::string(to_string(method));
  return prefix + "_" + format_real(delta);
}

SweepResult run_sweep(const SweepInputs& in, const std::vector<double>& deltas,
                      const std::vector<ViabilityMethod>& methods) {
  if (deltas.empty()) throw std::invalid_argument("sweep needs at least one delta");
  if (methods.empty()) throw std::invalid_argument("sweep needs at least one method");
  if (!in.val || !in.test) throw std::invalid_argument("sweep needs val and test sets");
  if (in.val->class_count() != in.test->class_count()) {
    throw std::domain_error("validation and test sets disagree on class count");
  }
  for (double d : deltas) {
    if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  }

  SweepResult result;
  const std::size_t c = in.val->class_count();
  result.calibration = fit_per_class_temperature(*in.val);

  result.rows.push_back(score_row(in, "Base", base_thresholds(c)));
  ThresholdVector naive = base_thresholds(c);
  std::fill(naive.thresholds.begin(), naive.thresholds.end(), 0.5);
  result.rows.push_back(score_row(in, "Naive-NoCal", naive));
  naive.temperatures = result.calibration.temperatures;
  result.rows.push_back(score_row(in, "Naive-Cal", naive));

  const CalibrationMap& cal = result.calibration;
  std::vector<std::future<SweepRow>> cells;
  for (double delta : deltas) {
    for (ViabilityMethod method : methods) {
      cells.push_back(std::async(std::launch::async, [&in, &cal, delta, method] {
        SweepRow row = score_row(
            in, sweep_row_name(delta, method),
            learn_thresholds(*in.val, cal, delta, method));
        row.delta = delta;
        row.method = method;
        return row;
      }));
    }
  }
  const std::size_t first_learned = result.rows.size();
  for (auto& cell : cells) result.rows.push_back(cell.get());

  for (std::size_t i = first_learned; i < result.rows.size(); ++i) {
    SweepRow& row = result.rows[i];
    if (*row.method == ViabilityMethod::kBinomialCdf) continue;
    const auto ref = std::find_if(
        result.rows.begin() + first_learned, result.rows.end(), [&](const SweepRow& r) {
          return r.delta == row.delta && r.method == ViabilityMethod::kBinomialCdf;
        });
    if (ref == result.rows.end()) continue;
    row.matches_bcdf = row.thresholds.thresholds == ref->thresholds.thresholds;
    for (std::size_t j = 0; j < c; ++j) {
      if (row.thresholds.thresholds[j] != ref->thresholds.thresholds[j]) {
        result.diagnostics.push_back(
            "mismatch: " + row.name + " class " + std::to_string(j) +
            " threshold " + format_real(row.thresholds.thresholds[j]) + " vs " +
            ref->name + " " + format_real(ref->thresholds.thresholds[j]));
      }
    }
  }

  for (ViabilityMethod method : methods) {
    std::vector<const SweepRow*> series;
    for (std::size_t i = first_learned; i < result.rows.size(); ++i) {
      if (*result.rows[i].method == method) series.push_back(&result.rows[i]);
    }
    std::stable_sort(series.begin(), series.end(),
                     [](const SweepRow* a, const SweepRow* b) { return *a->delta < *b->delta; });
    check_trend(series, false, result.diagnostics);
    check_trend(series, true, result.diagnostics);
  }
  return result;
}

std::string sweep_to_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "name,delta,method,val_sa,val_ra,val_coverage,val_ida,test_sa,test_ra,"
         "test_coverage,test_ida,matches_bcdf,thresholds\n";
  for (const SweepRow& row : result.rows) {
    out << row.name << ',' << (row.delta ? format_real(*row.delta) : "") << ','
        << (row.method ? std::string(to_string(*row.method)) : "") << ','
        << opt_real(row.val.select_accuracy) << ','
        << opt_real(row.val.reject_accuracy) << ',' << opt_real(row.val.coverage)
        << ',' << opt_real(row.val.ida) << ',' << opt_real(row.test.select_accuracy)
        << ',' << opt_real(row.test.reject_accuracy) << ','
        << opt_real(row.test.coverage) << ',' << opt_real(row.test.ida) << ','
        << (row.matches_bcdf ? (*row.matches_bcdf ? "yes" : "no") : "") << ',';
    for (std::size_t j = 0; j < row.thresholds.thresholds.size(); ++j) {
      out << (j ? ";" : "") << format_real(row.thresholds.thresholds[j]);
    }
    out << '\n';
  }
  return out.str();
}

std::string sweep_to_json(const SweepResult& result, const std::string& timestamp) {
  json rows = json::array();
  for (const SweepRow& row : result.rows) {
    rows.push_back(
        {{"name", row.name},
         {"delta", row.delta ? json(*row.delta) : json(nullptr)},
         {"method", row.method ? json(std::string(to_string(*row.method))) : json(nullptr)},
         {"thresholds", row.thresholds.thresholds},
         {"temperatures", row.thresholds.temperatures},
         {"matches_bcdf", row.matches_bcdf ? json(*row.matches_bcdf) : json(nullptr)},
         {"val", split_json(row.val)},
         {"test", split_json(row.test)}});
  }
  json j;
  j["rows"] = std::move(rows);
  j["diagnostics"] = result.diagnostics;
  j["calibration"] = result.calibration.temperatures;
  if (!timestamp.empty()) j["generated_at"] = timestamp;
  return j.dump(2) + "\n";
}

}  // namespace rejectkit
