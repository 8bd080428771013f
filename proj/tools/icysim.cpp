// icysim: generate synthetic stereo datasets, run matchers, score them.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "icy/config.hpp"
#include "icy/csv.hpp"
#include "icy/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

struct Args {
  // generate
  fs::path config;
  std::optional<fs::path> out;
  std::optional<std::uint64_t> seed_override;
  int threads = 0;

  // estimate / evaluate
  fs::path dataset;
  std::string matcher = "block";
  icy::EstimateOptions estimate;

  // evaluate
  std::size_t dod_pairs = 100000;
  bool dod_all = false;
  std::uint64_t dod_seed = 0;
  double tau = 0.01;
  double l1_threshold = 0.10;

  // sweep-report
  fs::path metrics;
  std::string axis;
};

int run_generate(const Args& a) {
  icy::SceneConfig config = icy::load_config(a.config);
  const std::optional<fs::path> out = a.out ? a.out : config.output;
  if (!out) throw icy::ConfigError("output", "not set; pass --out or set output in the config");
  icy::GenerateOptions options;
  options.threads = a.threads;
  options.seed_override = a.seed_override;
  const icy::GenerateResult r = icy::generate_dataset(config, *out, options);
  std::cout << "generated " << r.scenes.size() << " scenes in " << r.dataset.string() << "\n";
  return 0;
}

int run_estimate(Args a) {
  a.estimate.matcher = icy::parse_matcher(a.matcher);
  a.estimate.pyramid.base = a.estimate.block;
  a.estimate.threads = a.threads;
  std::cout << icy::describe_matcher(a.estimate) << "\n";
  const icy::EstimateResult r = icy::estimate_dataset(a.dataset, a.estimate);
  for (const std::string& s : r.skipped) std::cerr << "skipped " << s << "\n";
  std::cout << "estimated " << r.processed << " scenes, skipped " << r.skipped.size() << "\n";
  return 0;
}

int run_evaluate(const Args& a) {
  icy::MetricsOptions options;
  options.l1_threshold = a.l1_threshold;
  options.tau = a.tau;
  options.dod_seed = a.dod_seed;
  if (a.dod_all) {
    options.dod_pairs.reset();
  } else {
    options.dod_pairs = a.dod_pairs;
  }
  const icy::CsvTable table = icy::evaluate_dataset(a.dataset, options);
  std::size_t errors = 0;
  for (const auto& row : table.rows) {
    if (row[2] != "ok") {
      ++errors;
      std::cerr << row[0] << " [" << row[1] << "] " << row[2] << "\n";
    }
  }
  std::cout << "wrote " << table.rows.size() << " rows (" << errors << " errors) to "
            << (a.dataset / "metrics.csv").string() << "\n";
  return 0;
}

int run_sweep_report(const Args& a) {
  const icy::CsvTable report = icy::sweep_report(icy::read_csv(a.metrics), a.axis);
  if (a.out) {
    icy::write_csv(*a.out, report);
  } else {
    std::cout << icy::format_csv(report);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic icy-surface stereo datasets and stereo matcher evaluation"};
  app.require_subcommand(1);
  Args a;

  auto* gen = app.add_subcommand("generate", "Render every sweep point of a config");
  gen->add_option("--config", a.config, "Scene config (YAML)")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", a.out, "Dataset directory (overrides the config's output)");
  gen->add_option("--threads", a.threads, "Worker threads, 0 = all cores");
  gen->add_option("--seed-override", a.seed_override, "Derive every seed from this value");

  auto* est = app.add_subcommand("estimate", "Run a stereo matcher over a dataset");
  est->add_option("--dataset", a.dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  est->add_option("--matcher", a.matcher, "block or pyramid")->check(CLI::IsMember({"block", "pyramid"}));
  est->add_option("--threads", a.threads, "Worker threads, 0 = all cores");
  est->add_option("--num-disparities", a.estimate.block.num_disparities, "Disparity search range");
  est->add_option("--window", a.estimate.block.window, "Odd SAD window side");
  est->add_option("--min-disparity", a.estimate.block.min_disparity, "Smallest disparity searched");
  est->add_option("--uniqueness", a.estimate.block.uniqueness_ratio, "Uniqueness ratio");
  est->add_option("--lr-check", a.estimate.block.lr_consistency_px,
                  "Left-right consistency tolerance in px");
  est->add_flag("--subpixel", a.estimate.block.subpixel, "Parabolic subpixel refinement");
  est->add_option("--levels", a.estimate.pyramid.levels, "Pyramid levels (pyramid matcher)");
  est->add_option("--log-sigma", a.estimate.pyramid.log_kernel_sigma, "LoG Gaussian sigma");

  auto* eva = app.add_subcommand("evaluate", "Score estimated depth against ground truth");
  eva->add_option("--dataset", a.dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  eva->add_option("--dod-pairs", a.dod_pairs, "Sampled pixel pairs for DOD");
  eva->add_flag("--dod-all", a.dod_all, "Use every pixel pair for DOD (quadratic)");
  eva->add_option("--dod-seed", a.dod_seed, "Seed for DOD pair sampling");
  eva->add_option("--tau", a.tau, "Depth-order ratio tolerance");
  eva->add_option("--l1-threshold", a.l1_threshold, "Threshold in meters for l1_rate_10");

  auto* rep = app.add_subcommand("sweep-report", "Aggregate metrics.csv by one parameter");
  rep->add_option("--metrics", a.metrics, "metrics.csv from evaluate")->required()->check(CLI::ExistingFile);
  rep->add_option("--axis", a.axis, "Column to group by, e.g. albedo")->required();
  rep->add_option("--out", a.out, "Output CSV (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_generate(a);
    if (est->parsed()) return run_estimate(a);
    if (eva->parsed()) return run_evaluate(a);
    if (rep->parsed()) return run_sweep_report(a);
  } catch (const std::exception& e) {
    std::cerr << "icysim: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
