#include "dyad/replicate.hpp"

#include <cmath>
#include <stdexcept>

#include "dyad/util.hpp"

namespace dyad {

std::string method_name(FitMethod m) {
  switch (m) {
    case FitMethod::complete_case: return "complete-case";
    case FitMethod::available_case: return "available-case";
    case FitMethod::proposed: return "proposed";
    case FitMethod::proposed_flexible: return "proposed-flexible";
    case FitMethod::proposed_misspecified: return "proposed-misspecified";
  }
  throw std::logic_error("unreachable");
}

FitMethod parse_method(const std::string& name) {
  for (FitMethod m :
       {FitMethod::complete_case, FitMethod::available_case, FitMethod::proposed,
        FitMethod::proposed_flexible, FitMethod::proposed_misspecified})
    if (method_name(m) == name) return m;
  throw std::invalid_argument("unknown method: " + name);
}

ChainOutput run_fit(FitMethod method, const SimDesign& design,
                    const DyadPanel& panel, const SamplerConfig& config) {
  ModelSpec spec = design.model_spec();
  switch (method) {
    case FitMethod::complete_case:
      return fit_complete_case(panel, spec, config);
    case FitMethod::available_case:
      return fit_available_case(panel, spec, config);
    case FitMethod::proposed:
      return fit_proposed(panel, spec, config);
    case FitMethod::proposed_flexible:
      spec.lag_transform = LagTransform::square;
      return fit_proposed(panel, spec, config);
    case FitMethod::proposed_misspecified:
      spec.lag_transform = LagTransform::identity;
      return fit_proposed(panel, spec, config);
  }
  throw std::logic_error("unreachable");
}

ReplicateReport run_replicates(const SimDesign& design,
                               const std::vector<FitMethod>& methods,
                               const SamplerConfig& base_config,
                               int n_threads) {
  const int R = design.replicates;
  if (R < 1) throw std::invalid_argument("need at least one replicate");
  const auto truth = design.truth_by_name();

  ReplicateReport report;
  for (const auto& [name, value] : truth) report.params.push_back(name);
  for (FitMethod m : methods) report.methods.push_back(method_name(m));

  const int P = static_cast<int>(report.params.size());
  const int M = static_cast<int>(methods.size());

  struct RepResult {
    bool failed = false;
    std::vector<double> est;  // method-major, then param
    std::vector<char> hit;
    std::map<int, double> dyad_wave;
    std::array<std::map<int, double>, 2> member_wave;
  };
  std::vector<RepResult> results(static_cast<std::size_t>(R));

  parallel_for(R, n_threads == 0 ? 8 : n_threads, [&](int r) {
    RepResult& res = results[static_cast<std::size_t>(r)];
    const std::uint64_t rep_seed = derive_seed(design.seed, r);
    const DyadPanel panel = generate_dataset(design, rep_seed);

    for (int wave = 2; wave <= design.n_times; ++wave) {
      res.dyad_wave[wave] = dyad_dropout_fraction(panel, wave);
      for (int k = 0; k < kMembers; ++k) {
        int cnt = 0;
        for (int i = 0; i < panel.n_dyads; ++i)
          if (panel.dropout[k][i] == wave) ++cnt;
        res.member_wave[k][wave] =
            panel.n_dyads ? static_cast<double>(cnt) / panel.n_dyads : 0.0;
      }
    }

    res.est.assign(static_cast<std::size_t>(M) * P, 0.0);
    res.hit.assign(static_cast<std::size_t>(M) * P, 0);
    for (int m = 0; m < M; ++m) {
      SamplerConfig cfg = base_config;
      cfg.seed = derive_seed(rep_seed, 1000 + m);
      try {
        const ChainOutput chain = run_fit(methods[m], design, panel, cfg);
        for (int p = 0; p < P; ++p) {
          const auto& s = chain.summary(report.params[p]);
          res.est[static_cast<std::size_t>(m) * P + p] = s.mean;
          const double t = truth.at(report.params[p]);
          res.hit[static_cast<std::size_t>(m) * P + p] =
              (t >= s.q025 && t <= s.q975) ? 1 : 0;
        }
      } catch (const SamplerAbort&) {
        res.failed = true;
        return;
      }
    }
  });

  // sequential aggregation keyed by replicate index
  report.n_replicates = R;
  for (const auto& res : results)
    if (res.failed) report.n_failed++;

  for (int wave = 2; wave <= design.n_times; ++wave) {
    double acc = 0.0;
    std::array<double, 2> macc{0.0, 0.0};
    for (const auto& res : results) {
      acc += res.dyad_wave.at(wave);
      for (int k = 0; k < kMembers; ++k) macc[k] += res.member_wave[k].at(wave);
    }
    report.dyad_dropout_by_wave[wave] = acc / R;
    for (int k = 0; k < kMembers; ++k)
      report.member_dropout_by_wave[k][wave] = macc[k] / R;
  }

  for (int m = 0; m < M; ++m) {
    auto& method_cells = report.cells[report.methods[m]];
    for (int p = 0; p < P; ++p) {
      std::vector<double> est;
      double hits = 0.0;
      for (const auto& res : results) {
        if (res.failed) continue;
        est.push_back(res.est[static_cast<std::size_t>(m) * P + p]);
        hits += res.hit[static_cast<std::size_t>(m) * P + p];
      }
      ReplicateCell cell;
      if (!est.empty()) {
        cell.bias = mean_of(est) - truth.at(report.params[p]);
        cell.se = sd_of(est);
        cell.coverage = hits / static_cast<double>(est.size());
      }
      method_cells[report.params[p]] = cell;
    }
  }
  return report;
}

}  // namespace dyad
