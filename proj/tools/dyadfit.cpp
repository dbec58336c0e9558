#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "dyad/checks.hpp"
#include "dyad/io.hpp"

namespace fs = std::filesystem;
using namespace dyad;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSampler = 3;

SimDesign design_for(const std::string& variant, int n_dyads, int replicates,
                     std::uint64_t seed) {
  SimDesign d =
      variant == "B" ? SimDesign::variant_b() : SimDesign::variant_a();
  if (variant != "A" && variant != "B")
    throw std::invalid_argument("variant must be A or B");
  d.n_dyads = n_dyads;
  d.replicates = replicates;
  d.seed = seed;
  return d;
}

int cmd_simulate(const std::string& variant, int n_dyads, int replicates,
                 std::uint64_t seed, const fs::path& out_dir) {
  const SimDesign design = design_for(variant, n_dyads, replicates, seed);
  fs::create_directories(out_dir);
  for (int r = 0; r < replicates; ++r) {
    const DyadPanel panel =
        generate_dataset(design, derive_seed(design.seed, r));
    char name[32];
    std::snprintf(name, sizeof(name), "panel_r%03d.csv", r);
    write_panel_file(panel, out_dir / name);
  }
  std::cout << "wrote " << replicates << " panel(s) to " << out_dir.string()
            << "\n";
  return 0;
}

int cmd_fit(const fs::path& panel_path, const fs::path& config_path,
            const std::string& method, const fs::path& out_dir,
            std::optional<std::uint64_t> seed) {
  const DyadPanel panel = parse_panel_file(panel_path);
  RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::from_file(config_path);
  if (seed) cfg.sampler.seed = *seed;
  const ModelSpec spec = cfg.model_spec(panel);

  ChainOutput chain;
  if (method == "proposed")
    chain = fit_proposed(panel, spec, cfg.sampler);
  else if (method == "complete-case")
    chain = fit_complete_case(panel, spec, cfg.sampler);
  else if (method == "available-case")
    chain = fit_available_case(panel, spec, cfg.sampler);
  else
    throw std::invalid_argument(
        "method must be proposed, complete-case or available-case");

  fs::create_directories(out_dir);
  write_draws_csv(chain, out_dir / "draws.csv");
  write_loglik_csv(chain, out_dir / "loglik_trace.csv");
  std::map<std::string, std::string> meta{
      {"method", method},
      {"panel", panel_path.filename().string()},
      {"n_dyads", std::to_string(panel.n_dyads)},
      {"n_times", std::to_string(panel.n_times)},
      {"seed", std::to_string(cfg.sampler.seed)}};
  write_summary_json(chain, meta, out_dir / "summary.json");
  std::cout << "fit complete: " << chain.n_retained << " retained draws\n";
  return 0;
}

int cmd_replicate(const std::string& variant, int n_dyads, int R,
                  std::uint64_t seed, const std::string& methods_csv,
                  const fs::path& config_path, const fs::path& out_dir,
                  int threads) {
  const SimDesign design = design_for(variant, n_dyads, R, seed);
  std::vector<FitMethod> methods;
  std::stringstream ss(methods_csv);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) methods.push_back(parse_method(tok));
  SamplerConfig scfg;
  if (!config_path.empty()) scfg = RunConfig::from_file(config_path).sampler;

  const ReplicateReport report =
      run_replicates(design, methods, scfg, threads);
  fs::create_directories(out_dir);
  write_report_csv(report, out_dir / "report.csv");
  write_report_json(report, out_dir / "report.json");
  std::cout << "replicates: " << report.n_replicates
            << " (failed: " << report.n_failed << ")\n";
  for (const auto& [wave, frac] : report.dyad_dropout_by_wave)
    std::cout << "dyad dropout wave " << wave << ": " << frac << "\n";
  return 0;
}

int cmd_sensitivity(const fs::path& panel_path, const fs::path& config_path,
                    const std::string& phi_means, double phi_variance,
                    const std::string& ig_values, const fs::path& out_dir,
                    int threads) {
  const DyadPanel panel = parse_panel_file(panel_path);
  RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::from_file(config_path);
  const ModelSpec spec = cfg.model_spec(panel);

  SensitivityGrid grid = SensitivityGrid::defaults();
  grid.phi_prior_variance = phi_variance;
  if (!phi_means.empty()) {
    grid.phi_means.clear();
    std::stringstream ss(phi_means);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) grid.phi_means.push_back(std::stod(tok));
  }
  if (!ig_values.empty()) {
    grid.ig_settings.clear();
    std::stringstream ss(ig_values);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) {
        const double v = std::stod(tok);
        grid.ig_settings.emplace_back(v, v);
      }
  }

  fs::create_directories(out_dir);
  const auto sweep = sensitivity_sweep(panel, spec, grid, cfg.sampler, threads);
  write_sweep_csv(sweep, out_dir / "phi_sweep.csv");
  const auto ig = ig_prior_sensitivity(panel, spec, grid, cfg.sampler, threads);
  write_ig_csv(ig, out_dir / "ig_sensitivity.csv");
  std::cout << "sensitivity tables written to " << out_dir.string() << "\n";
  return 0;
}

int cmd_check(int samples, int gir_samples, std::uint64_t seed, int threads) {
  CheckOptions opts;
  opts.ks_draws = samples;
  opts.gir_samples = gir_samples;
  opts.seed = seed;
  opts.n_threads = threads;
  const CheckReport report = run_sampler_checks(opts);
  for (const auto& line : report.lines)
    std::cout << (line.pass ? "PASS" : "FAIL") << "  " << line.name << "  ["
              << line.detail << "]\n";
  return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian selection-model fits for longitudinal dyadic panels "
               "with nonignorable dropout"};
  app.require_subcommand(1);

  // simulate
  std::string variant = "A";
  int n_dyads = 200, replicates = 1, threads = 0;
  std::uint64_t seed = 20260101;
  fs::path out_dir = "out", panel_path, config_path;

  auto* sim = app.add_subcommand("simulate", "generate synthetic panels");
  sim->add_option("--variant", variant, "A or B");
  sim->add_option("--n-dyads", n_dyads);
  sim->add_option("--R", replicates, "number of panels");
  sim->add_option("--seed", seed);
  sim->add_option("--out-dir", out_dir)->required();

  // fit
  std::string method = "proposed";
  std::optional<std::uint64_t> fit_seed;
  auto* fit = app.add_subcommand("fit", "fit one panel");
  fit->add_option("--panel", panel_path)->required();
  fit->add_option("--config", config_path);
  fit->add_option("--method", method,
                  "proposed | complete-case | available-case");
  fit->add_option("--seed", fit_seed, "overrides the config seed");
  fit->add_option("--out-dir", out_dir)->required();

  // replicate
  std::string methods_csv = "complete-case,available-case,proposed";
  auto* rep = app.add_subcommand("replicate", "replicate study with scoring");
  rep->add_option("--variant", variant, "A or B");
  rep->add_option("--n-dyads", n_dyads);
  rep->add_option("--R", replicates)->required();
  rep->add_option("--seed", seed);
  rep->add_option("--methods", methods_csv, "comma-separated method list");
  rep->add_option("--config", config_path, "sampler settings for the fits");
  rep->add_option("--threads", threads);
  rep->add_option("--out-dir", out_dir)->required();

  // sensitivity
  std::string phi_means, ig_values;
  double phi_variance = 0.01;
  auto* sens = app.add_subcommand("sensitivity", "prior sensitivity sweeps");
  sens->add_option("--panel", panel_path)->required();
  sens->add_option("--config", config_path);
  sens->add_option("--phi-means", phi_means,
                   "comma-separated prior means (default -3..3 step 0.5)");
  sens->add_option("--phi-variance", phi_variance);
  sens->add_option("--ig", ig_values,
                   "comma-separated a=b values (default 0.01,1,5)");
  sens->add_option("--threads", threads);
  sens->add_option("--out-dir", out_dir)->required();

  // check
  int samples = 100000, gir_samples = 10000;
  auto* chk = app.add_subcommand("check", "sampler correctness suite");
  chk->add_option("--samples", samples, "draws per kernel check");
  chk->add_option("--gir-samples", gir_samples);
  chk->add_option("--seed", seed);
  chk->add_option("--threads", threads);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return cmd_simulate(variant, n_dyads, replicates, seed, out_dir);
    if (fit->parsed())
      return cmd_fit(panel_path, config_path, method, out_dir, fit_seed);
    if (rep->parsed())
      return cmd_replicate(variant, n_dyads, replicates, seed, methods_csv,
                           config_path, out_dir, threads);
    if (sens->parsed())
      return cmd_sensitivity(panel_path, config_path, phi_means, phi_variance,
                             ig_values, out_dir, threads);
    if (chk->parsed()) return cmd_check(samples, gir_samples, seed, threads);
  } catch (const SamplerAbort& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSampler;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
