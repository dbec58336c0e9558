#include "dyad/diagnostics.hpp"

#include <bit>
#include <cmath>

#include "dyad/util.hpp"

namespace dyad {

namespace {

// Autocovariance at the given lag, normalized by n.
double autocov(std::span<const double> x, double m, std::size_t lag) {
  double s = 0.0;
  for (std::size_t t = lag; t < x.size(); ++t)
    s += (x[t] - m) * (x[t - lag] - m);
  return s / static_cast<double>(x.size());
}

}  // namespace

double effective_sample_size(std::span<const double> x) {
  const auto n = x.size();
  if (n < 4) return static_cast<double>(n);
  const double m = mean_of(x);
  const double g0 = autocov(x, m, 0);
  if (g0 <= 0.0) return static_cast<double>(n);  // constant chain

  // Sum autocovariances in adjacent pairs while the pair sums stay positive,
  // enforcing monotone non-increase.
  double tail = 0.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t lag = 1; lag + 1 < n; lag += 2) {
    const double pair = autocov(x, m, lag) + autocov(x, m, lag + 1);
    if (pair <= 0.0) break;
    const double capped = std::min(pair, prev_pair);
    tail += capped;
    prev_pair = capped;
  }
  const double ess = static_cast<double>(n) * g0 / (g0 + 2.0 * tail);
  return std::min(static_cast<double>(n), ess);
}

double mcse(std::span<const double> x) {
  const double ess = effective_sample_size(x);
  return ess > 0.0 ? sd_of(x) / std::sqrt(ess) : 0.0;
}

double geweke_z(std::span<const double> x) {
  const auto n = x.size();
  if (n < 20) return 0.0;
  const auto n1 = static_cast<std::size_t>(0.1 * static_cast<double>(n));
  const auto n2 = static_cast<std::size_t>(0.5 * static_cast<double>(n));
  std::span<const double> head = x.subspan(0, std::max<std::size_t>(n1, 2));
  std::span<const double> tail = x.subspan(n - n2, n2);
  const double se1 = mcse(head), se2 = mcse(tail);
  const double denom = std::sqrt(se1 * se1 + se2 * se2);
  if (denom == 0.0) return 0.0;
  return (mean_of(head) - mean_of(tail)) / denom;
}

// ---------------------------------------------------------------------------

GirConfig GirConfig::defaults() {
  GirConfig cfg;
  cfg.priors.ig_shape = 5.0;
  cfg.priors.ig_scale = 4.0;
  cfg.priors.coef_prior = NormalPrior{0.0, 0.25};
  return cfg;
}

namespace {

SimDesign gir_design(const GirConfig& cfg) {
  SimDesign d = SimDesign::variant_a();
  d.n_dyads = cfg.n_dyads;
  d.n_times = cfg.n_times;
  d.baseline_mean = cfg.baseline_mean;
  d.baseline_sd = cfg.baseline_sd;
  return d;
}

// Draw every model parameter from its prior.
void draw_parameters(SamplerState& s, const PriorSpec& priors, Rng& rng) {
  const NormalPrior cp = *priors.coef_prior;
  auto coef = [&] { return rng.normal(cp.mean, std::sqrt(cp.variance)); };
  for (int k = 0; k < kMembers; ++k) {
    s.mp.alpha[k] = coef();
    for (auto& v : s.mp.beta[k]) v = coef();
    for (auto& v : s.mp.gamma[k]) v = coef();
    for (auto& v : s.mp.beta_cov[k]) v = coef();
    for (auto& v : s.mp.gamma_cov[k]) v = coef();
    s.dp.xi[k] = coef();
    for (auto& v : s.dp.psi[k]) v = coef();
    for (auto& v : s.dp.delta[k]) v = coef();
    s.dp.phi[k] = coef();
    s.mp.sigma2[k] = rng.inv_gamma(priors.ig_shape, priors.ig_scale);
  }
  s.mp.tau_b2 = rng.inv_gamma(priors.ig_shape, priors.ig_scale);
  s.dp.tau_c2 = rng.inv_gamma(priors.ig_shape, priors.ig_scale);
}

SimDesign design_from_state(const SimDesign& base, const SamplerState& s) {
  SimDesign d = base;
  d.truth = s.mp;
  d.dropout = s.dp;
  return d;
}

}  // namespace

GirResult getting_it_right(
    const GirConfig& cfg,
    const std::function<void(GibbsEngine&, SamplerState&)>& transition) {
  if (!cfg.priors.coef_prior)
    throw std::invalid_argument(
        "getting_it_right requires proper priors (coefficient prior not set)");
  if (cfg.priors.ig_shape <= 2.0)
    throw std::invalid_argument(
        "getting_it_right requires an inverse-gamma shape above 2");
  cfg.priors.validate();

  const SimDesign base = gir_design(cfg);
  SamplerConfig scfg;
  scfg.prior = cfg.priors;
  scfg.adapt = false;  // the compared kernel must stay fixed
  scfg.check_drift = false;
  scfg.seed = cfg.seed;

  // Template objects for sizing and naming.
  Rng setup_rng(cfg.seed, 1);
  DyadPanel panel0 = generate_dataset(base, setup_rng.next_u64());
  GibbsEngine engine0(panel0, base.model_spec(), scfg);
  const auto names = engine0.param_names();
  const auto n_par = names.size();

  const int N = cfg.n_samples;
  std::vector<double> marg(static_cast<std::size_t>(N) * n_par);
  std::vector<double> succ(static_cast<std::size_t>(N) * n_par);

  // Marginal-conditional side: parameters are plain prior draws.
  Rng mc_rng(cfg.seed, 2);
  {
    SamplerState tmpl = engine0.make_state();
    for (int t = 0; t < N; ++t) {
      SamplerState s = tmpl;
      draw_parameters(s, cfg.priors, mc_rng);
      const auto v = engine0.param_values(s);
      std::copy(v.begin(), v.end(), marg.begin() + t * n_par);
    }
  }

  // Successive-conditional side: alternate data re-simulation with the
  // posterior transition kernel.
  Rng sc_rng(cfg.seed, 3);
  {
    SamplerState s = engine0.make_state();
    draw_parameters(s, cfg.priors, sc_rng);
    for (int t = 0; t < N; ++t) {
      GeneratedTruth audit;
      const SimDesign d = design_from_state(base, s);
      DyadPanel panel = generate_dataset(d, sc_rng.next_u64(), &audit);

      // Seed the state with the simulator's own latent values: observed
      // entries verbatim, in-horizon missing entries from the complete
      // trajectories, dyad effects from the simulation draw.
      SamplerState state{s.mp, s.dp, RandomEffects{}, CompletedOutcomes::from_observed(panel),
                         Rng(derive_seed(cfg.seed, 1000003 + t))};
      state.re.b = audit.b;
      state.re.c = audit.c;
      for (int i = 0; i < panel.n_dyads; ++i) {
        const int horizon = panel.horizon(i);
        for (int k = 0; k < kMembers; ++k)
          for (int j = panel.dropout[k][i]; j <= horizon; ++j)
            state.yc.at(k, i, j) = audit.full.at(k, i, j);
      }

      GibbsEngine engine(panel, d.model_spec(), scfg);
      if (transition)
        transition(engine, state);
      else
        engine.iterate(state);

      s.mp = state.mp;
      s.dp = state.dp;
      s.re = state.re;
      const auto v = engine.param_values(state);
      std::copy(v.begin(), v.end(), succ.begin() + t * n_par);
    }
  }

  GirResult res;
  res.names = names;
  res.z_mean.resize(n_par);
  res.z_square.resize(n_par);
  std::vector<double> a(static_cast<std::size_t>(N)), b(static_cast<std::size_t>(N));
  for (std::size_t p = 0; p < n_par; ++p) {
    for (int t = 0; t < N; ++t) {
      a[static_cast<std::size_t>(t)] = marg[t * n_par + p];
      b[static_cast<std::size_t>(t)] = succ[t * n_par + p];
    }
    auto zstat = [&](const std::vector<double>& u, const std::vector<double>& v) {
      const double su = sd_of(u) / std::sqrt(static_cast<double>(u.size()));
      const double sv = mcse(v);
      const double den = std::sqrt(su * su + sv * sv);
      return den > 0.0 ? (mean_of(u) - mean_of(v)) / den : 0.0;
    };
    res.z_mean[p] = zstat(a, b);
    std::vector<double> a2 = a, b2 = b;
    for (auto& x : a2) x *= x;
    for (auto& x : b2) x *= x;
    res.z_square[p] = zstat(a2, b2);
    res.max_abs_z = std::max({res.max_abs_z, std::abs(res.z_mean[p]),
                              std::abs(res.z_square[p])});
  }
  return res;
}

// ---------------------------------------------------------------------------

SensitivityGrid SensitivityGrid::defaults() {
  SensitivityGrid g;
  for (int i = -6; i <= 6; ++i) g.phi_means.push_back(0.5 * i);
  g.phi_prior_variance = 0.01;
  g.ig_settings = {{0.01, 0.01}, {1.0, 1.0}, {5.0, 5.0}};
  return g;
}

void SensitivityGrid::validate() const {
  if (phi_prior_variance <= 0.0)
    throw std::invalid_argument("phi prior variance must be positive");
  if (phi_means.empty() && ig_settings.empty())
    throw std::invalid_argument("sensitivity grid is empty");
}

namespace {

bool is_measurement_param(const std::string& name) {
  return name.rfind("meas.", 0) == 0;
}

}  // namespace

std::vector<SweepRow> sensitivity_sweep(const DyadPanel& panel,
                                        const ModelSpec& spec,
                                        const SensitivityGrid& grid,
                                        const SamplerConfig& config,
                                        int n_threads) {
  grid.validate();
  const int G = static_cast<int>(grid.phi_means.size());
  std::vector<std::vector<SweepRow>> per_point(static_cast<std::size_t>(G));
  parallel_for(G, n_threads == 0 ? 8 : n_threads, [&](int g) {
    const double m = grid.phi_means[static_cast<std::size_t>(g)];
    SamplerConfig cfg = config;
    cfg.prior.phi_prior = NormalPrior{m, grid.phi_prior_variance};
    cfg.seed = derive_seed(config.seed, std::bit_cast<std::uint64_t>(m));
    auto& rows = per_point[static_cast<std::size_t>(g)];
    try {
      GibbsEngine engine(panel, spec, cfg);
      const ChainOutput chain = engine.run();
      for (std::size_t p = 0; p < chain.names.size(); ++p) {
        if (!is_measurement_param(chain.names[p])) continue;
        SweepRow row;
        row.phi_mean = m;
        row.param = chain.names[p];
        row.mean = chain.summaries[p].mean;
        row.q025 = chain.summaries[p].q025;
        row.q975 = chain.summaries[p].q975;
        row.sd = chain.summaries[p].sd;
        row.mcse = mcse(chain.column(chain.names[p]));
        rows.push_back(std::move(row));
      }
    } catch (const std::exception& e) {
      SweepRow row;
      row.phi_mean = m;
      row.ok = false;
      row.error = e.what();
      rows.push_back(std::move(row));
    }
  });
  std::vector<SweepRow> out;
  for (auto& rows : per_point)
    for (auto& r : rows) out.push_back(std::move(r));
  return out;
}

std::vector<IgRow> ig_prior_sensitivity(const DyadPanel& panel,
                                        const ModelSpec& spec,
                                        const SensitivityGrid& grid,
                                        const SamplerConfig& config,
                                        int n_threads) {
  grid.validate();
  const int G = static_cast<int>(grid.ig_settings.size());
  std::vector<std::vector<IgRow>> per_point(static_cast<std::size_t>(G));
  parallel_for(G, n_threads == 0 ? 8 : n_threads, [&](int g) {
    const auto [a, b] = grid.ig_settings[static_cast<std::size_t>(g)];
    SamplerConfig cfg = config;
    cfg.prior.ig_shape = a;
    cfg.prior.ig_scale = b;
    cfg.seed = derive_seed(config.seed, std::bit_cast<std::uint64_t>(a) ^
                                            mix64(std::bit_cast<std::uint64_t>(b)));
    auto& rows = per_point[static_cast<std::size_t>(g)];
    try {
      GibbsEngine engine(panel, spec, cfg);
      const ChainOutput chain = engine.run();
      for (std::size_t p = 0; p < chain.names.size(); ++p) {
        if (!is_measurement_param(chain.names[p])) continue;
        IgRow row;
        row.a = a;
        row.b = b;
        row.param = chain.names[p];
        row.mean = chain.summaries[p].mean;
        row.q025 = chain.summaries[p].q025;
        row.q975 = chain.summaries[p].q975;
        row.sd = chain.summaries[p].sd;
        row.mcse = mcse(chain.column(chain.names[p]));
        rows.push_back(std::move(row));
      }
    } catch (const std::exception& e) {
      IgRow row;
      row.a = a;
      row.b = b;
      row.ok = false;
      row.error = e.what();
      rows.push_back(std::move(row));
    }
  });
  std::vector<IgRow> out;
  for (auto& rows : per_point)
    for (auto& r : rows) out.push_back(std::move(r));
  return out;
}

}  // namespace dyad
