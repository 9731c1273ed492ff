#include "rejectkit/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rejectkit/score_io.hpp"

namespace rejectkit {
namespace {

using nlohmann::json;

double ratio(std::size_t num, std::size_t den) {
  return static_cast<double>(num) / static_cast<double>(den);
}

double round6(double v) { return std::round(v * 1e6) / 1e6; }

json fraction_or_null(const std::optional<double>& v) {
  return v ? json(round6(*v)) : json(nullptr);
}

}  // namespace

double accuracy(const ScoreSet& set) {
  if (set.empty()) throw std::domain_error("accuracy of an empty score set");
  std::size_t correct = 0;
  for (const Example& ex : set.examples()) {
    if (argmax(ex.logits) == ex.label) ++correct;
  }
  return ratio(correct, set.size());
}

std::vector<bool> rejection_bits(const ScoreSet& set, const ThresholdVector& tv) {
  if (tv.class_count() != set.class_count()) {
    throw std::domain_error("threshold vector has " +
                            std::to_string(tv.class_count()) +
                            " classes but the score set has " +
                            std::to_string(set.class_count()));
  }
  std::vector<bool> bits;
  bits.reserve(set.size());
  for (const Example& ex : set.examples()) {
    bits.push_back(decide(ex.logits, tv).rejected);
  }
  return bits;
}

EvalReport evaluate(const ScoreSet& set, const ThresholdVector& tv,
                    const std::vector<bool>* ideal_mask) {
  if (set.empty()) throw std::domain_error("cannot evaluate an empty score set");
  if (tv.class_count() != set.class_count()) {
    throw std::domain_error("threshold vector has " +
                            std::to_string(tv.class_count()) +
                            " classes but the score set has " +
                            std::to_string(set.class_count()));
  }
  if (ideal_mask && ideal_mask->size() != set.size()) {
    throw std::domain_error("ideal mask length does not match score set");
  }

  EvalReport r;
  r.total = set.size();
  r.per_class.resize(set.class_count());
  std::size_t agree = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Example& ex = set[i];
    const Decision d = decide(ex.logits, tv);
    const bool correct = d.predicted == ex.label;
    ClassReport& cls = r.per_class[d.predicted];
    ++cls.count;
    if (correct) ++r.correct;
    if (d.rejected) {
      ++r.rejected;
      ++cls.reject.n;
      if (correct) {
        ++r.rejected_correct;
        ++cls.reject.k;
      }
    } else {
      ++r.selected;
      ++cls.selected;
      if (correct) {
        ++r.selected_correct;
        ++cls.selected_correct;
      }
    }
    if (ideal_mask && (*ideal_mask)[i] == d.rejected) ++agree;
  }

  r.accuracy = ratio(r.correct, r.total);
  r.coverage = ratio(r.selected, r.total);
  if (r.selected > 0) r.select_accuracy = ratio(r.selected_correct, r.selected);
  if (r.rejected > 0) r.reject_accuracy = ratio(r.rejected_correct, r.rejected);
  if (ideal_mask) r.ida = ratio(agree, r.total);
  r.pooled_viable =
      region_viable(RegionTally{static_cast<std::int64_t>(r.rejected),
                                static_cast<std::int64_t>(r.rejected_correct)},
                    tv.delta, tv.method);
  for (ClassReport& cls : r.per_class) {
    cls.coverage = cls.count ? ratio(cls.selected, cls.count) : 1.0;
    if (cls.selected > 0) {
      cls.select_accuracy = ratio(cls.selected_correct, cls.selected);
    }
    cls.viable = region_viable(cls.reject, tv.delta, tv.method);
  }
  return r;
}

std::string report_to_json(const EvalReport& r, const std::string& timestamp) {
  json j;
  j["counts"] = {{"total", r.total},
                 {"correct", r.correct},
                 {"selected", r.selected},
                 {"selected_correct", r.selected_correct},
                 {"rejected", r.rejected},
                 {"rejected_correct", r.rejected_correct}};
  j["accuracy"] = round6(r.accuracy);
  j["coverage"] = round6(r.coverage);
  j["select_accuracy"] = fraction_or_null(r.select_accuracy);
  j["reject_accuracy"] = fraction_or_null(r.reject_accuracy);
  j["ida"] = fraction_or_null(r.ida);
  j["pooled_reject"] = {{"n", r.rejected},
                        {"k", r.rejected_correct},
                        {"viable", r.pooled_viable}};
  json classes = json::array();
  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    const ClassReport& cls = r.per_class[c];
    classes.push_back({{"class", c},
                       {"count", cls.count},
                       {"selected", cls.selected},
                       {"coverage", round6(cls.coverage)},
                       {"select_accuracy", fraction_or_null(cls.select_accuracy)},
                       {"reject_n", cls.reject.n},
                       {"reject_k", cls.reject.k},
                       {"viable", cls.viable}});
  }
  j["per_class"] = std::move(classes);
  if (!timestamp.empty()) j["generated_at"] = timestamp;
  return j.dump(2) + "\n";
}

std::string report_class_csv(const EvalReport& r) {
  std::ostringstream out;
  out << "class,count,selected,coverage,select_accuracy,reject_n,reject_k,"
         "viable\n";
  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    const ClassReport& cls = r.per_class[c];
    out << c << ',' << cls.count << ',' << cls.selected << ','
        << format_real(round6(cls.coverage)) << ','
        << (cls.select_accuracy ? format_real(round6(*cls.select_accuracy)) : "")
        << ',' << cls.reject.n << ',' << cls.reject.k << ','
        << (cls.viable ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string percent_or_dash(const std::optional<double>& fraction) {
  if (!fraction) return "--";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", *fraction * 100.0);
  return buf;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw std::domain_error("mean of an empty series");
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double student_t_cdf(double t, double dof) {
  if (!(dof > 0.0)) throw std::domain_error("degrees of freedom must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = dof / (dof + t * t);
  const double tail = 0.5 * regularized_incomplete_beta(dof / 2.0, 0.5, x);
  return t > 0 ? 1.0 - tail : tail;
}

TTestResult compare_runs(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw std::domain_error("each run series needs at least two values");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double sa = sample_stddev(a);
  const double sb = sample_stddev(b);
  const double va = sa * sa / na;
  const double vb = sb * sb / nb;
  const double diff = mean(a) - mean(b);

  TTestResult r;
  const double se = std::sqrt(va + vb);
  if (se == 0.0) {
    r.degrees_of_freedom = na + nb - 2.0;
    if (diff == 0.0) return r;
    r.t_statistic = diff < 0 ? -std::numeric_limits<double>::infinity()
                             : std::numeric_limits<double>::infinity();
    r.p_value = diff < 0 ? 0.0 : 1.0;
    return r;
  }
  r.t_statistic = diff / se;
  r.degrees_of_freedom =
      (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p_value = student_t_cdf(r.t_statistic, r.degrees_of_freedom);
  return r;
}

}  // namespace rejectkit
