#include "rejectkit/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "rejectkit/calibration.hpp"
#include "rejectkit/learner.hpp"
#include "rejectkit/metrics.hpp"
#include "rejectkit/score_io.hpp"
#include "rejectkit/sweep.hpp"

namespace rejectkit::cli {
namespace {

namespace fs = std::filesystem;

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Runs `body`, mapping exceptions onto exit codes.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

SyntheticSpec resolve_spec(const SynthOptions& opts) {
  if (opts.preset.has_value() == opts.spec_path.has_value()) {
    throw UsageError("give exactly one of --preset or --spec");
  }
  if (opts.spec_path) return spec_from_json(read_file(*opts.spec_path));

  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), *opts.preset) != names.end()) {
    return preset(*opts.preset);
  }
  if (const char* dir = std::getenv(kPresetDirEnv)) {
    const fs::path candidate = fs::path(dir) / (*opts.preset + ".json");
    if (fs::exists(candidate)) return spec_from_json(read_file(candidate));
  }
  try {
    return preset(*opts.preset);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void write_table_row(std::ostream& out, std::size_t cls, const CandidateEval& e) {
  out << std::left << std::setw(7) << cls << std::setw(22)
      << format_real(e.threshold) << std::setw(8) << e.tally.n << std::setw(8)
      << e.tally.k << (e.viable ? "yes" : "no") << '\n';
}

const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#e6b800",
                          "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

int cmd_synth(const SynthOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    SyntheticSpec spec = resolve_spec(opts);
    if (opts.seed) spec.seed = *opts.seed;
    if (opts.counts) spec.per_class_counts = *opts.counts;
    try {
      spec.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    fs::create_directories(opts.out_dir);
    const SyntheticData data = generate(spec);
    write_scoreset(data.train, opts.out_dir / "train.csv");
    write_scoreset(data.val, opts.out_dir / "val.csv");
    write_scoreset(data.test, opts.out_dir / "test.csv");
    if (data.val_mask) write_mask(data.val, *data.val_mask, opts.out_dir / "val.mask.csv");
    if (data.test_mask) {
      write_mask(data.test, *data.test_mask, opts.out_dir / "test.mask.csv");
    }
    out << "wrote " << data.train.size() << " train, " << data.val.size()
        << " val, " << data.test.size() << " test examples to "
        << opts.out_dir.string() << (data.val_mask ? " (with ideal masks)" : "")
        << '\n';
    return kExitOk;
  });
}

int cmd_learn(const LearnOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!(opts.delta > 0.0 && opts.delta < 1.0)) {
      throw UsageError("--delta must lie in (0, 1)");
    }
    const ScoreSet val = read_scoreset(opts.val);
    const CalibrationMap cal = opts.calibrate ? fit_per_class_temperature(val)
                                              : identity_calibration(val.class_count());
    const LearnResult result =
        learn_thresholds_detailed(val, cal, opts.delta, opts.method);
    write_thresholds(result.thresholds, opts.out);

    out << "method " << to_string(opts.method) << ", delta "
        << format_real(opts.delta) << '\n';
    out << std::left << std::setw(7) << "class" << std::setw(22) << "tau"
        << std::setw(8) << "n" << std::setw(8) << "k" << "viable\n";
    for (std::size_t j = 0; j < result.per_class.size(); ++j) {
      write_table_row(out, j, result.per_class[j]);
    }
    return kExitOk;
  });
}

int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ScoreSet test = read_scoreset(opts.test);
    const ThresholdVector tv = read_thresholds(opts.thresholds);
    if (tv.class_count() != test.class_count()) {
      throw std::domain_error("thresholds cover " + std::to_string(tv.class_count()) +
                              " classes but " + opts.test.string() + " has " +
                              std::to_string(test.class_count()));
    }
    if (opts.svg && !test.has_coords()) {
      throw std::domain_error("--svg needs x,y columns, which " +
                              opts.test.string() + " lacks");
    }
    std::optional<std::vector<bool>> mask;
    if (opts.mask) mask = read_mask(*opts.mask, test);

    const EvalReport report = evaluate(test, tv, mask ? &*mask : nullptr);
    write_file_atomic(opts.report,
                      report_to_json(report, opts.timestamp ? utc_timestamp() : ""));
    if (opts.class_csv) write_file_atomic(*opts.class_csv, report_class_csv(report));
    if (opts.svg) write_file_atomic(*opts.svg, render_svg(test, rejection_bits(test, tv)));

    out << "SA " << percent_or_dash(report.select_accuracy) << "  RA "
        << percent_or_dash(report.reject_accuracy) << "  coverage "
        << percent_or_dash(report.coverage);
    if (report.ida) out << "  IDA " << percent_or_dash(report.ida);
    out << '\n';
    return kExitOk;
  });
}

int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.deltas.empty()) throw UsageError("--deltas needs at least one value");
    if (opts.methods.empty()) throw UsageError("--methods needs at least one value");
    for (double d : opts.deltas) {
      if (!(d > 0.0 && d < 1.0)) throw UsageError("every delta must lie in (0, 1)");
    }
    const ScoreSet val = read_scoreset(opts.val);
    const ScoreSet test = read_scoreset(opts.test);
    std::optional<std::vector<bool>> val_mask;
    std::optional<std::vector<bool>> test_mask;
    if (opts.val_mask) val_mask = read_mask(*opts.val_mask, val);
    if (opts.test_mask) test_mask = read_mask(*opts.test_mask, test);

    const SweepResult result =
        run_sweep(SweepInputs{&val, &test, val_mask ? &*val_mask : nullptr,
                              test_mask ? &*test_mask : nullptr},
                  opts.deltas, opts.methods);
    fs::create_directories(opts.out_dir);
    write_file_atomic(opts.out_dir / "sweep.csv", sweep_to_csv(result));
    write_file_atomic(opts.out_dir / "sweep.json",
                      sweep_to_json(result, opts.timestamp ? utc_timestamp() : ""));

    out << std::left << std::setw(24) << "method" << std::setw(8) << "SA"
        << std::setw(8) << "RA" << std::setw(8) << "cov" << std::setw(8) << "SA"
        << std::setw(8) << "RA" << "cov   (val | test)\n";
    for (const SweepRow& row : result.rows) {
      out << std::setw(24) << row.name << std::setw(8)
          << percent_or_dash(row.val.select_accuracy) << std::setw(8)
          << percent_or_dash(row.val.reject_accuracy) << std::setw(8)
          << percent_or_dash(row.val.coverage) << std::setw(8)
          << percent_or_dash(row.test.select_accuracy) << std::setw(8)
          << percent_or_dash(row.test.reject_accuracy)
          << percent_or_dash(row.test.coverage) << '\n';
    }
    for (const std::string& d : result.diagnostics) err << d << '\n';
    return kExitOk;
  });
}

std::string render_svg(const ScoreSet& set, const std::vector<bool>& rejected) {
  if (!set.has_coords()) throw std::domain_error("score set has no coordinates");
  if (rejected.size() != set.size()) {
    throw std::domain_error("rejection bits do not match score set");
  }
  constexpr double kSize = 600.0;
  constexpr double kMargin = 10.0;
  double xmin = std::numeric_limits<double>::infinity();
  double ymin = xmin;
  double xmax = -xmin;
  double ymax = -xmin;
  for (const Example& ex : set.examples()) {
    xmin = std::min(xmin, ex.coord->x);
    xmax = std::max(xmax, ex.coord->x);
    ymin = std::min(ymin, ex.coord->y);
    ymax = std::max(ymax, ex.coord->y);
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
  const double scale = (kSize - 2 * kMargin) / span;

  std::ostringstream svg;
  svg << std::fixed << std::setprecision(2);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize
      << "\" height=\"" << kSize << "\" viewBox=\"0 0 " << kSize << ' ' << kSize
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // Selected points first so rejected ones stay visible on top.
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (rejected[i] != (pass == 1)) continue;
      const Example& ex = set[i];
      const double cx = kMargin + (ex.coord->x - xmin) * scale;
      const double cy = kSize - kMargin - (ex.coord->y - ymin) * scale;
      const char* fill = rejected[i] ? "#000000" : kPalette[ex.label % 8];
      svg << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"1.5\" fill=\""
          << fill << "\"/>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learn per-class rejection thresholds for classifier scores"};
  app.require_subcommand(1, 1);

  const auto open_unit = CLI::Validator(
      [](std::string& v) -> std::string {
        double d = 0.0;
        try {
          std::size_t used = 0;
          d = std::stod(v, &used);
          if (used != v.size()) return "not a number: " + v;
        } catch (const std::exception&) {
          return "not a number: " + v;
        }
        return (d > 0.0 && d < 1.0) ? "" : "value must lie in (0, 1): " + v;
      },
      "(0,1)");
  const auto method_check = CLI::Validator(
      [](std::string& v) -> std::string {
        try {
          parse_viability_method(v);
          return "";
        } catch (const std::invalid_argument& e) {
          return e.what();
        }
      },
      "METHOD");

  SynthOptions synth;
  std::string synth_preset;
  std::string synth_spec;
  std::uint64_t synth_seed = 0;
  std::vector<std::size_t> synth_counts;
  auto* s = app.add_subcommand("synth", "Generate a synthetic 2-D dataset");
  auto* preset_opt = s->add_option("--preset", synth_preset, "Preset name");
  auto* spec_opt = s->add_option("--spec", synth_spec, "Spec JSON file")->check(CLI::ExistingFile);
  auto* seed_opt = s->add_option("--seed", synth_seed, "Random seed");
  auto* counts_opt = s->add_option("--counts", synth_counts,
                                   "Per-class train,val,test counts")
                         ->delimiter(',')
                         ->expected(3);
  s->add_option("--out", synth.out_dir, "Output directory")->required();
  preset_opt->excludes(spec_opt);

  LearnOptions learn;
  std::string learn_method = "bcdf";
  auto* l = app.add_subcommand("learn", "Learn thresholds on validation scores");
  l->add_option("--val", learn.val, "Validation ScoreSet CSV")->required()->check(CLI::ExistingFile);
  l->add_option("--delta", learn.delta, "Significance level")->check(open_unit);
  l->add_option("--method", learn_method, "Viability method")->check(method_check);
  l->add_flag("!--no-calibration", learn.calibrate, "Skip temperature scaling");
  l->add_option("--out", learn.out, "Threshold JSON output")->required();

  EvalOptions eval;
  std::string eval_mask;
  std::string eval_svg;
  std::string eval_csv;
  auto* e = app.add_subcommand("eval", "Apply thresholds and report metrics");
  e->add_option("--test", eval.test, "ScoreSet CSV")->required()->check(CLI::ExistingFile);
  e->add_option("--thresholds", eval.thresholds, "Threshold JSON")->required()->check(CLI::ExistingFile);
  auto* mask_opt = e->add_option("--mask", eval_mask, "Ideal reject mask CSV")->check(CLI::ExistingFile);
  e->add_option("--report", eval.report, "EvalReport JSON output")->required();
  auto* svg_opt = e->add_option("--svg", eval_svg, "Scatter plot output");
  auto* csv_opt = e->add_option("--class-csv", eval_csv, "Per-class CSV output");
  e->add_flag("!--no-timestamp", eval.timestamp, "Omit the generated_at field");

  SweepOptions sweep;
  std::string sweep_val_mask;
  std::string sweep_test_mask;
  std::vector<std::string> sweep_methods;
  auto* w = app.add_subcommand("sweep", "Grid over deltas and methods with baselines");
  w->add_option("--val", sweep.val, "Validation ScoreSet CSV")->required()->check(CLI::ExistingFile);
  w->add_option("--test", sweep.test, "Test ScoreSet CSV")->required()->check(CLI::ExistingFile);
  w->add_option("--deltas", sweep.deltas, "Comma-separated deltas")
      ->delimiter(',')
      ->check(open_unit);
  w->add_option("--methods", sweep_methods, "Comma-separated methods")
      ->delimiter(',')
      ->check(method_check);
  auto* vm_opt = w->add_option("--val-mask", sweep_val_mask, "Validation mask CSV")->check(CLI::ExistingFile);
  auto* tm_opt = w->add_option("--test-mask", sweep_test_mask, "Test mask CSV")->check(CLI::ExistingFile);
  w->add_option("--out", sweep.out_dir, "Output directory")->required();
  w->add_flag("!--no-timestamp", sweep.timestamp, "Omit the generated_at field");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    if (ex.get_exit_code() == 0) {
      app.exit(ex, out, err);
      return kExitOk;
    }
    app.exit(ex, out, err);
    return kExitUsage;
  }

  if (s->parsed()) {
    if (*preset_opt) synth.preset = synth_preset;
    if (*spec_opt) synth.spec_path = synth_spec;
    if (*seed_opt) synth.seed = synth_seed;
    if (*counts_opt) {
      synth.counts = PartitionCounts{synth_counts[0], synth_counts[1], synth_counts[2]};
    }
    return cmd_synth(synth, out, err);
  }
  if (l->parsed()) {
    learn.method = parse_viability_method(learn_method);
    return cmd_learn(learn, out, err);
  }
  if (e->parsed()) {
    if (*mask_opt) eval.mask = eval_mask;
    if (*svg_opt) eval.svg = eval_svg;
    if (*csv_opt) eval.class_csv = eval_csv;
    return cmd_eval(eval, out, err);
  }
  if (sweep_methods.empty()) sweep_methods = {"bcdf"};
  if (!*w->get_option("--deltas")) sweep.deltas = {0.05, 0.1, 0.5, 0.75, 0.95};
  for (const std::string& m : sweep_methods) sweep.methods.push_back(parse_viability_method(m));
  if (*vm_opt) sweep.val_mask = sweep_val_mask;
  if (*tm_opt) sweep.test_mask = sweep_test_mask;
  return cmd_sweep(sweep, out, err);
}

}  // namespace rejectkit::cli
