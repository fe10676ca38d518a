// srmks: simulate training data, fit and select kernel smoothers by
// guaranteed risk, run the Monte-Carlo study and draw its charts.
//
// Exit codes: 0 success, 2 usage error, 3 I/O or parse error, 4 numeric failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srmks/srmks.hpp"

namespace fs = std::filesystem;
using srmks::io::Json;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kIo = 3, kNumeric = 4 };

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw srmks::IoError("cannot create output directory '" + dir.string() + "'");
}

void write_provenance(const fs::path& dir, const std::string& subcommand, Json flags, Json extra = nullptr) {
  Json j = {{"subcommand", subcommand}, {"flags", std::move(flags)}};
  if (!extra.is_null()) j["experiment"] = std::move(extra);
  srmks::io::write_text_file(dir / "config.json", srmks::io::dump(j));
}

/// Accepts a bare experiment config or a provenance file wrapping one.
srmks::ExperimentConfig load_experiment_config(const fs::path& path) {
  const Json j = srmks::io::read_json_file(path);
  if (j.is_object() && j.contains("subcommand")) {
    if (!j.contains("experiment")) throw srmks::ParseError(path.string() + ": provenance file holds no experiment config");
    return srmks::io::experiment_config_from_json(j["experiment"]);
  }
  return srmks::io::experiment_config_from_json(j);
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  double m = 1.0, c = 20.0, k = 1.0e6;
  srmks::SamplingPlan plan;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  const srmks::OscillatorParams params(a.m, a.c, a.k);
  const srmks::TrainingSet data = srmks::generate_training_set(params, a.plan);
  const fs::path dir(a.out);
  ensure_directory(dir);
  srmks::io::write_text_file(dir / "training_set.csv", srmks::io::training_set_csv(data));
  srmks::io::write_text_file(dir / "training_set.json", srmks::io::dump(srmks::io::to_json(data)));
  write_provenance(dir, "simulate", {{"params", srmks::io::to_json(params)}, {"plan", srmks::io::to_json(a.plan)},
                                     {"out", a.out}});
  std::cout << "n=" << data.size() << " sigma_n=" << srmks::io::format_double(data.sigma_n) << "\n";
  return kOk;
}

struct FitArgs {
  std::string data;
  std::string kernel;
  std::optional<double> sigma_n;
  std::size_t points = 1001;
  std::string out;
};

int run_fit(const FitArgs& a) {
  const srmks::TrainingSet data = srmks::io::training_set_from_json(srmks::io::read_json_file(a.data));
  srmks::KernelSpec spec = [&] {
    try {
      return srmks::io::kernel_from_json(srmks::io::read_json_file(a.kernel));
    } catch (const srmks::InvalidInput& e) {
      throw srmks::ParseError(a.kernel + ": " + e.what());
    }
  }();
  const double sigma_n = a.sigma_n.value_or(data.sigma_n);
  const srmks::FittedSmoother model = srmks::fit(spec, data, sigma_n);
  const double mse = srmks::empirical_risk(
      data.y, std::span<const double>(model.fitted.data(), static_cast<std::size_t>(model.fitted.size())));
  const srmks::RiskReport report = srmks::vc_bound_reduced(mse, model.edf, data.size());

  const fs::path dir(a.out);
  ensure_directory(dir);
  Json weights = Json::array();
  for (double w : model.weights) weights.push_back(srmks::io::number(w));
  const Json result = {{"kernel", srmks::io::to_json(spec)}, {"sigma_n", srmks::io::number(sigma_n)},
                       {"edf", srmks::io::number(model.edf)}, {"jitter", srmks::io::number(model.jitter)},
                       {"report", srmks::io::to_json(report)}, {"weights", std::move(weights)}};
  srmks::io::write_text_file(dir / "fit.json", srmks::io::dump(result));

  std::string csv = "t,prediction\n";
  const double t0 = data.t.front();
  const double t1 = data.t.back();
  for (std::size_t i = 0; i < a.points; ++i) {
    const double t = a.points == 1 ? t0 : (i + 1 == a.points ? t1 : t0 + (t1 - t0) * i / (a.points - 1.0));
    csv += srmks::io::format_double(t) + ',' + srmks::io::format_double(srmks::predict(model, t)) + '\n';
  }
  srmks::io::write_text_file(dir / "predictions.csv", csv);
  write_provenance(dir, "fit", {{"data", a.data}, {"kernel", srmks::io::to_json(spec)},
                                {"sigma_n", srmks::io::number(sigma_n)}, {"points", a.points}, {"out", a.out}});
  std::cout << "edf=" << srmks::io::format_double(model.edf) << " emp_risk=" << srmks::io::format_double(mse)
            << " bound=" << srmks::io::format_double(report.bound) << "\n";
  return kOk;
}

struct SelectArgs {
  std::string data;
  srmks::GridSettings grids;
  std::string out;
};

int run_select(const SelectArgs& a) {
  const srmks::TrainingSet data = srmks::io::training_set_from_json(srmks::io::read_json_file(a.data));
  std::vector<srmks::SelectionResult> results;
  for (srmks::KernelFamily family : srmks::kFamilies) {
    results.push_back(srmks::srm_select(srmks::default_grid(family, data, a.grids), data));
  }
  const srmks::SelectionResult winner = srmks::compare_structures(results);

  const fs::path dir(a.out);
  ensure_directory(dir);
  for (const auto& r : results) {
    srmks::io::write_text_file(dir / ("selection_" + std::string(srmks::to_string(r.family)) + ".json"),
                               srmks::io::dump(srmks::io::to_json(r)));
  }
  srmks::io::write_text_file(dir / "trace.csv", srmks::io::trace_csv(results));
  const Json comparison = {{"winner", srmks::to_string(winner.family)},
                           {"best_spec", srmks::io::to_json(winner.best_spec)},
                           {"best_report", srmks::io::to_json(winner.best_report)}};
  srmks::io::write_text_file(dir / "comparison.json", srmks::io::dump(comparison));
  write_provenance(dir, "select", {{"data", a.data}, {"grids", srmks::io::to_json(a.grids)}, {"out", a.out}});
  for (const auto& r : results) {
    std::cout << srmks::to_string(r.family) << ": bound=" << srmks::io::format_double(r.best_report.bound)
              << " h=" << srmks::io::format_double(r.best_report.h) << "\n";
  }
  std::cout << "winner=" << srmks::to_string(winner.family) << "\n";
  return kOk;
}

struct ExperimentArgs {
  std::string config;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string out;
};

int run_experiment_cmd(const ExperimentArgs& a) {
  srmks::ExperimentConfig cfg;
  if (!a.config.empty()) cfg = load_experiment_config(a.config);
  if (a.reps) cfg.repetitions = *a.reps;
  if (a.seed) cfg.base_seed = *a.seed;
  cfg.validate();

  const fs::path dir(a.out);
  ensure_directory(dir);
  const auto records = srmks::run_experiment(cfg, a.threads.value_or(0));
  const auto summary = srmks::summarize(records);

  Json stability = Json::array();
  for (srmks::KernelFamily family : srmks::kFamilies) {
    if (cfg.plans.size() >= 2) stability.push_back(srmks::io::to_json(srmks::capacity_spread(records, family)));
  }
  Json summary_json = srmks::io::to_json(summary);
  summary_json["capacity_spread"] = std::move(stability);

  srmks::io::write_text_file(dir / "records.csv", srmks::io::records_csv(records));
  srmks::io::write_text_file(dir / "summary.json", srmks::io::dump(summary_json));
  write_provenance(dir, "experiment", {{"config", a.config}, {"out", a.out}}, srmks::io::to_json(cfg));

  std::printf("%6s %6s %14s %14s %10s %6s\n", "n", "family", "median_bound", "median_mse", "median_h", "inf");
  for (std::size_t n : summary.sample_sizes()) {
    for (srmks::KernelFamily f : srmks::kFamilies) {
      if (!summary.find(n, f, srmks::Metric::BOUND)) continue;
      const auto& b = summary.at(n, f, srmks::Metric::BOUND);
      std::printf("%6zu %6s %14.4e %14.4e %10.3f %6zu\n", n, std::string(srmks::to_string(f)).c_str(), b.median,
                  summary.at(n, f, srmks::Metric::TRUE_MSE).median, summary.at(n, f, srmks::Metric::H).median,
                  b.infinite_count);
    }
  }
  return kOk;
}

struct PlotArgs {
  std::string records;
  std::string kind;
  std::string config;
  std::size_t iteration = 0;
  std::string out;
};

int run_plot(const PlotArgs& a) {
  const auto records = srmks::io::parse_records_csv(srmks::io::read_text_file(a.records));
  const fs::path dir(a.out);
  std::string svg;
  Json extra = nullptr;
  if (a.kind == "boxplot") {
    svg = srmks::svg::boxplot(records);
  } else if (a.kind == "complexity") {
    svg = srmks::svg::complexity(records);
  } else {
    const fs::path cfg_path = a.config.empty() ? fs::path(a.records).parent_path() / "config.json" : fs::path(a.config);
    const srmks::ExperimentConfig cfg = load_experiment_config(cfg_path);
    svg = srmks::svg::predictions(srmks::svg::prediction_panels(records, cfg, a.iteration));
    extra = srmks::io::to_json(cfg);
  }
  ensure_directory(dir);
  srmks::io::write_text_file(dir / (a.kind + ".svg"), svg);
  write_provenance(dir, "plot",
                   {{"records", a.records}, {"kind", a.kind}, {"iteration", a.iteration}, {"out", a.out}},
                   std::move(extra));
  std::cout << (dir / (a.kind + ".svg")).string() << " (" << records.size() << " records)\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structural risk minimisation for kernel smoothers of an SDOF impulse response"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a noisy, decimated impulse-response training set");
  simulate->add_option("--m", sim.m, "Mass (kg)")->capture_default_str();
  simulate->add_option("--c", sim.c, "Damping (N s/m)")->capture_default_str();
  simulate->add_option("--k", sim.k, "Stiffness (N/m)")->capture_default_str();
  simulate->add_option("--t-start", sim.plan.t_start, "Start of the base grid (s)")->capture_default_str();
  simulate->add_option("--t-end", sim.plan.t_end, "End of the base grid (s)")->capture_default_str();
  simulate->add_option("--base-points", sim.plan.base_points, "Points on the base grid")->capture_default_str();
  simulate->add_option("--decimation", sim.plan.decimation, "Keep every d-th base point")->capture_default_str();
  simulate->add_option("--snr", sim.plan.snr, "Signal-to-noise power ratio")->capture_default_str();
  sim.plan.seed = srmks::kReferenceSeed;
  simulate->add_option("--seed", sim.plan.seed, "Noise seed")->capture_default_str();
  simulate->add_option("--out", sim.out, "Output directory")->required();

  FitArgs fa;
  auto* fitcmd = app.add_subcommand("fit", "Fit one kernel smoother and report its guaranteed risk");
  fitcmd->add_option("--data", fa.data, "training_set.json from simulate")->required();
  fitcmd->add_option("--kernel", fa.kernel, "Kernel JSON file")->required();
  fitcmd->add_option("--sigma-n", fa.sigma_n, "Model noise std (default: the data's)");
  fitcmd->add_option("--points", fa.points, "Prediction grid size over the training span")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  fitcmd->add_option("--out", fa.out, "Output directory")->required();

  SelectArgs sa;
  auto* select = app.add_subcommand("select", "Run SRM selection in the SE and SDOF structures");
  select->add_option("--data", sa.data, "training_set.json from simulate")->required();
  select->add_option("--se-n-sigma", sa.grids.se.n_sigma, "SE sigma_f grid size")->capture_default_str();
  select->add_option("--se-n-l", sa.grids.se.n_l, "SE length-scale grid size")->capture_default_str();
  select->add_option("--sdof-n-sigma", sa.grids.sdof.n_sigma, "SDOF sigma_f grid size")->capture_default_str();
  select->add_option("--out", sa.out, "Output directory")->required();

  ExperimentArgs ea;
  auto* experiment = app.add_subcommand("experiment", "Run the Monte-Carlo study");
  experiment->add_option("--config", ea.config, "Experiment config JSON (default: reference configuration)");
  experiment->add_option("--reps", ea.reps, "Repetitions per sample size")->check(CLI::PositiveNumber);
  experiment->add_option("--seed", ea.seed, "Base seed");
  experiment->add_option("--threads", ea.threads, "Worker threads (default: SRMKS_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  experiment->add_option("--out", ea.out, "Output directory")->required();

  PlotArgs pa;
  auto* plot = app.add_subcommand("plot", "Draw SVG charts from records.csv");
  plot->add_option("--records", pa.records, "records.csv from experiment")->required();
  plot->add_option("--kind", pa.kind, "Chart kind")
      ->required()
      ->check(CLI::IsMember({"boxplot", "predictions", "complexity"}));
  plot->add_option("--config", pa.config, "Experiment config for predictions (default: config.json next to records)");
  plot->add_option("--iteration", pa.iteration, "Iteration shown by predictions")->capture_default_str();
  plot->add_option("--out", pa.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*fitcmd) return run_fit(fa);
    if (*select) return run_select(sa);
    if (*experiment) return run_experiment_cmd(ea);
    if (*plot) return run_plot(pa);
  } catch (const srmks::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const srmks::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const srmks::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}
