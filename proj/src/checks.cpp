#include "dyad/checks.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dyad/fits.hpp"
#include "dyad/util.hpp"

namespace dyad {

GridCdf::GridCdf(const std::function<double(double)>& log_density, double lo,
                 double hi, int n_points)
    : lo_(lo), hi_(hi), step_((hi - lo) / (n_points - 1)) {
  std::vector<double> ld(static_cast<std::size_t>(n_points));
  double mx = -std::numeric_limits<double>::infinity();
  for (int g = 0; g < n_points; ++g) {
    ld[static_cast<std::size_t>(g)] = log_density(lo + g * step_);
    mx = std::max(mx, ld[static_cast<std::size_t>(g)]);
  }
  cdf_.assign(static_cast<std::size_t>(n_points), 0.0);
  double acc = 0.0;
  for (int g = 1; g < n_points; ++g) {
    acc += 0.5 *
           (std::exp(ld[static_cast<std::size_t>(g) - 1] - mx) +
            std::exp(ld[static_cast<std::size_t>(g)] - mx)) *
           step_;
    cdf_[static_cast<std::size_t>(g)] = acc;
  }
  if (acc <= 0.0) throw std::runtime_error("quadrature grid captured no mass");
  for (auto& v : cdf_) v /= acc;
}

double GridCdf::operator()(double x) const {
  if (x <= lo_) return 0.0;
  if (x >= hi_) return 1.0;
  const double h = (x - lo_) / step_;
  const auto g = static_cast<std::size_t>(h);
  const double w = h - static_cast<double>(g);
  return cdf_[g] * (1.0 - w) + cdf_[g + 1] * w;
}

double ks_distance(std::vector<double> sample,
                   const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

double inv_gamma_cdf(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_q(a, b / x);
}

bool CheckReport::all_pass() const {
  for (const auto& l : lines)
    if (!l.pass) return false;
  return true;
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

CheckLine moment_and_ks_line(const std::string& name,
                             const std::vector<double>& draws,
                             const std::function<double(double)>& cdf,
                             double true_mean, double true_sd,
                             const CheckOptions& opts) {
  const double ks = ks_distance(draws, cdf);
  const double scale = std::max(std::abs(true_mean), true_sd);
  const double mean_err = std::abs(mean_of(draws) - true_mean) / scale;
  const double sd_err = std::abs(sd_of(draws) / true_sd - 1.0);
  CheckLine line;
  line.name = name;
  line.pass = ks < opts.ks_tol && mean_err < opts.moment_tol &&
              sd_err < opts.moment_tol;
  line.detail = "KS=" + fmt(ks) + " mean_err=" + fmt(mean_err) +
                " sd_err=" + fmt(sd_err);
  return line;
}

CheckLine ks_line(const std::string& name, const std::vector<double>& draws,
                  const std::function<double(double)>& cdf,
                  const CheckOptions& opts) {
  const double ks = ks_distance(draws, cdf);
  CheckLine line;
  line.name = name;
  line.pass = ks < opts.ks_tol;
  line.detail = "KS=" + fmt(ks);
  return line;
}

// Complete-data fixture: a small study with the hazard switched off so every
// dyad completes, giving convenient fixed states for the conjugate checks.
struct ConjugateFixture {
  SimDesign design;
  DyadPanel panel;
  ModelSpec spec;
  SamplerConfig cfg;

  explicit ConjugateFixture(std::uint64_t seed) {
    design = SimDesign::variant_a();
    design.n_dyads = 6;
    design.n_times = 4;
    design.dropout.xi = {-1000.0, -1000.0};
    panel = generate_dataset(design, derive_seed(seed, 11));
    spec = design.model_spec();
    cfg.seed = derive_seed(seed, 77);
    cfg.adapt = false;
    cfg.check_drift = false;
  }

  SamplerState fixed_state(const GibbsEngine& eng) const {
    SamplerState s = eng.make_state();
    s.mp = design.truth;
    for (int i = 0; i < panel.n_dyads; ++i) {
      s.re.b[i] = (i % 2 == 0) ? 0.3 : -0.3;
      s.re.c[i] = (i % 2 == 0) ? -0.2 : 0.4;
    }
    return s;
  }
};

}  // namespace

std::vector<CheckLine> check_conjugate_conditionals(const CheckOptions& opts) {
  std::vector<CheckLine> lines;
  const int N = 2 * opts.ks_draws;
  ConjugateFixture fx(opts.seed);
  GibbsEngine eng(fx.panel, fx.spec, fx.cfg);

  {  // dyad intercept: normal with precision-weighted residual mean
    SamplerState s = fx.fixed_state(eng);
    const auto [mean, var] = eng.b_conditional(s, 0);
    const double sd = std::sqrt(var);
    std::vector<double> draws(static_cast<std::size_t>(N));
    for (auto& d : draws) {
      eng.step_b(s);
      d = s.re.b[0];
    }
    lines.push_back(moment_and_ks_line(
        "conjugate.b", draws,
        [&](double x) { return normal_cdf(x, mean, sd); }, mean, sd, opts));
  }

  for (int k = 0; k < kMembers; ++k) {  // residual variances
    SamplerState s = fx.fixed_state(eng);
    const auto [shape, scale] = eng.sigma2_conditional(s, k);
    std::vector<double> draws(static_cast<std::size_t>(N));
    for (auto& d : draws) {
      eng.step_sigma2(s, k);
      d = s.mp.sigma2[k];
    }
    const double m = scale / (shape - 1.0);
    const double sd = m / std::sqrt(shape - 2.0);
    lines.push_back(moment_and_ks_line(
        "conjugate.sigma2.k" + std::to_string(k + 1), draws,
        [&](double x) { return inv_gamma_cdf(x, shape, scale); }, m, sd, opts));
  }

  {  // regression block: marginals of the multivariate normal draw
    SamplerState s = fx.fixed_state(eng);
    const auto cond = eng.eta_conditional(s, 0);
    const int ncol = static_cast<int>(cond.mean.size());
    std::vector<std::vector<double>> draws(
        static_cast<std::size_t>(ncol),
        std::vector<double>(static_cast<std::size_t>(N)));
    for (int t = 0; t < N; ++t) {
      eng.step_eta(s, 0);
      draws[0][static_cast<std::size_t>(t)] = s.mp.alpha[0];
      draws[1][static_cast<std::size_t>(t)] = s.mp.beta[0][0];
      draws[2][static_cast<std::size_t>(t)] = s.mp.gamma[0][0];
      draws[3][static_cast<std::size_t>(t)] = s.mp.beta_cov[0][0];
      draws[4][static_cast<std::size_t>(t)] = s.mp.gamma_cov[0][0];
    }
    for (int c = 0; c < ncol; ++c) {
      const double m = cond.mean(c);
      const double sd = std::sqrt(cond.cov(c, c));
      lines.push_back(moment_and_ks_line(
          "conjugate.eta." + cond.col_names[static_cast<std::size_t>(c)],
          draws[static_cast<std::size_t>(c)],
          [&](double x) { return normal_cdf(x, m, sd); }, m, sd, opts));
    }
  }

  {  // random-effect variances on a wider panel so the shapes are moment-rich
    SimDesign d24 = fx.design;
    d24.n_dyads = 24;
    const DyadPanel panel24 = generate_dataset(d24, derive_seed(opts.seed, 12));
    GibbsEngine eng24(panel24, fx.spec, fx.cfg);
    SamplerState s = eng24.make_state();
    for (int i = 0; i < panel24.n_dyads; ++i) {
      s.re.b[i] = 0.25 * ((i % 3) - 1);
      s.re.c[i] = 0.4 * ((i % 5) - 2);
    }
    {
      const auto [shape, scale] = eng24.tau_b2_conditional(s);
      std::vector<double> draws(static_cast<std::size_t>(N));
      for (auto& v : draws) {
        eng24.step_tau_b2(s);
        v = s.mp.tau_b2;
      }
      const double m = scale / (shape - 1.0);
      const double sd = m / std::sqrt(shape - 2.0);
      lines.push_back(moment_and_ks_line(
          "conjugate.tau_b2", draws,
          [&](double x) { return inv_gamma_cdf(x, shape, scale); }, m, sd,
          opts));
    }
    {
      const auto [shape, scale] = eng24.tau_c2_conditional(s);
      std::vector<double> draws(static_cast<std::size_t>(N));
      for (auto& v : draws) {
        eng24.step_tau_c2(s);
        v = s.dp.tau_c2;
      }
      const double m = scale / (shape - 1.0);
      const double sd = m / std::sqrt(shape - 2.0);
      lines.push_back(moment_and_ks_line(
          "conjugate.tau_c2", draws,
          [&](double x) { return inv_gamma_cdf(x, shape, scale); }, m, sd,
          opts));
    }
  }
  return lines;
}

std::vector<CheckLine> check_mh_kernels(const CheckOptions& opts) {
  std::vector<CheckLine> lines;
  const int N = opts.ks_draws;
  const int burn = 2000;

  {  // hazard-block kernel on a one-parameter target (intercept only)
    SimDesign design = SimDesign::variant_a();
    design.n_dyads = 40;
    const DyadPanel panel = generate_dataset(design, derive_seed(opts.seed, 21));
    ModelSpec spec = design.model_spec();
    spec.hazard_lags = 0;
    SamplerConfig cfg;
    cfg.seed = derive_seed(opts.seed, 22);
    cfg.adapt = false;
    cfg.check_drift = false;
    cfg.fixed_phi = 0.0;
    GibbsEngine eng(panel, spec, cfg);
    SamplerState s = eng.make_state();
    const GridCdf cdf(
        [&](double xi) { return eng.varpi_logpost(s, 0, {xi}); }, -7.0, 2.0);
    std::vector<double> draws(static_cast<std::size_t>(N));
    for (int t = 0; t < burn; ++t) eng.step_varpi(s, 0);
    for (auto& v : draws) {
      eng.step_varpi(s, 0);
      v = s.dp.xi[0];
    }
    lines.push_back(ks_line("mh.varpi_intercept", draws,
                            [&](double x) { return cdf(x); }, opts));
  }

  {  // dropout-intercept kernel on a single dyad
    DyadPanel panel = DyadPanel::empty(1, 3, {});
    panel.y_at(0, 0, 1) = 4.0;
    panel.dropout[0][0] = 2;
    panel.y_at(1, 0, 1) = 6.0;
    panel.y_at(1, 0, 2) = 6.5;
    panel.y_at(1, 0, 3) = 5.5;
    panel.dropout[1][0] = 4;
    panel.validate();
    ModelSpec spec;
    spec.order = 1;
    SamplerConfig cfg;
    cfg.seed = derive_seed(opts.seed, 23);
    cfg.adapt = false;
    cfg.check_drift = false;
    GibbsEngine eng(panel, spec, cfg);
    SamplerState s = eng.make_state();
    s.mp.beta = {std::vector<double>{0.5}, std::vector<double>{0.6}};
    s.mp.gamma = {std::vector<double>{0.5}, std::vector<double>{0.6}};
    s.dp.xi = {-2.0, -2.0};
    s.dp.delta = {std::vector<double>{0.3}, std::vector<double>{0.3}};
    s.dp.phi = {0.5, 0.5};
    s.dp.tau_c2 = 1.0;
    const SamplerState frozen = s;
    const GridCdf cdf(
        [&](double c) { return eng.c_logpost(frozen, 0, c); }, -9.0, 9.0);
    std::vector<double> draws(static_cast<std::size_t>(N));
    for (int t = 0; t < burn; ++t) eng.step_c(s);
    for (auto& v : draws) {
      eng.step_c(s);
      v = s.re.c[0];
    }
    lines.push_back(
        ks_line("mh.c_intercept", draws, [&](double x) { return cdf(x); }, opts));
  }

  {  // terminal imputation draw: transition normal times the dropout hazard
    DyadPanel panel = DyadPanel::empty(1, 2, {});
    panel.y_at(0, 0, 1) = 5.0;
    panel.dropout[0][0] = 2;
    panel.y_at(1, 0, 1) = 7.0;
    panel.y_at(1, 0, 2) = 7.5;
    panel.dropout[1][0] = 3;
    panel.validate();
    ModelSpec spec;
    spec.order = 1;
    SamplerConfig cfg;
    cfg.seed = derive_seed(opts.seed, 24);
    cfg.adapt = false;
    cfg.check_drift = false;
    GibbsEngine eng(panel, spec, cfg);
    SamplerState s = eng.make_state();
    s.mp.beta = {std::vector<double>{0.5}, std::vector<double>{0.6}};
    s.mp.gamma = {std::vector<double>{0.5}, std::vector<double>{0.6}};
    s.dp.xi = {-3.0, -3.0};
    s.dp.delta = {std::vector<double>{0.2}, std::vector<double>{0.2}};
    s.dp.phi = {0.8, 0.8};
    const double mu = 0.5 * 5.0 + 0.5 * 7.0;
    const GridCdf cdf(
        [&](double y) {
          return log_normal_pdf(y, mu, 1.0) +
                 log_inv_logit(-3.0 + 0.2 * 5.0 + 0.8 * y);
        },
        mu - 9.0, mu + 9.0);
    std::vector<double> draws(static_cast<std::size_t>(N));
    for (int t = 0; t < burn; ++t) eng.step_augment(s);
    for (auto& v : draws) {
      eng.step_augment(s);
      v = s.yc.at(0, 0, 2);
    }
    lines.push_back(ks_line("mh.augment_terminal", draws,
                            [&](double x) { return cdf(x); }, opts));
  }
  return lines;
}

CheckLine check_getting_it_right(const CheckOptions& opts) {
  GirConfig cfg = GirConfig::defaults();
  cfg.n_samples = opts.gir_samples;
  cfg.seed = derive_seed(opts.seed, 5);
  const GirResult res = getting_it_right(cfg);
  CheckLine line;
  line.name = "getting_it_right";
  line.pass = res.pass(opts.gir_threshold);
  line.detail = "max|z|=" + fmt(res.max_abs_z) + " over " +
                std::to_string(res.names.size()) + " parameters";
  return line;
}

DyadPanel make_mar_panel(int n_dyads, std::uint64_t seed) {
  SimDesign design = SimDesign::variant_b();
  design.n_dyads = n_dyads;
  GeneratedTruth audit;
  DyadPanel panel = generate_dataset(design, seed, &audit);
  // Collapse to simultaneous dyad-level dropout at the earlier member's
  // time; the trigger depends only on observed previous outcomes.
  for (int i = 0; i < panel.n_dyads; ++i) {
    const int d = std::min(panel.dropout[0][i], panel.dropout[1][i]);
    for (int k = 0; k < kMembers; ++k) {
      panel.dropout[k][i] = d;
      for (int j = 1; j <= panel.n_times; ++j)
        panel.y_at(k, i, j) = j < d
                                  ? audit.full.at(k, i, j)
                                  : std::numeric_limits<double>::quiet_NaN();
    }
  }
  panel.validate();
  return panel;
}

CheckLine check_phi_zero_reduction(const CheckOptions& opts) {
  const DyadPanel panel = make_mar_panel(150, derive_seed(opts.seed, 31));
  const SimDesign design = SimDesign::variant_b();
  const ModelSpec spec = design.model_spec();

  SamplerConfig cfg;
  cfg.seed = derive_seed(opts.seed, 32);
  cfg.check_drift = false;

  SamplerConfig cfg_fixed = cfg;
  cfg_fixed.fixed_phi = 0.0;
  GibbsEngine eng(panel, spec, cfg_fixed);
  const ChainOutput nonign = eng.run();

  SamplerConfig cfg_ac = cfg;
  cfg_ac.seed = derive_seed(opts.seed, 33);
  const ChainOutput avail = fit_available_case(panel, spec, cfg_ac);

  double worst = 0.0;
  std::string worst_name;
  for (const auto& name : avail.names) {
    if (name.rfind("meas.", 0) != 0) continue;
    const double m1 = nonign.summary(name).mean;
    const double m2 = avail.summary(name).mean;
    const double se = std::sqrt(std::pow(mcse(nonign.column(name)), 2) +
                                std::pow(mcse(avail.column(name)), 2));
    const double z = se > 0.0 ? std::abs(m1 - m2) / se : 0.0;
    if (z > worst) {
      worst = z;
      worst_name = name;
    }
  }
  CheckLine line;
  line.name = "phi_zero_reduction";
  line.pass = worst < 3.0;
  line.detail = "max |mean difference| = " + fmt(worst) +
                " combined MCSEs (worst: " + worst_name + ")";
  return line;
}

CheckReport run_sampler_checks(const CheckOptions& opts) {
  CheckReport report;
  for (auto& l : check_conjugate_conditionals(opts)) report.lines.push_back(l);
  for (auto& l : check_mh_kernels(opts)) report.lines.push_back(l);
  report.lines.push_back(check_getting_it_right(opts));
  if (opts.include_phi_reduction)
    report.lines.push_back(check_phi_zero_reduction(opts));
  return report;
}

}  // namespace dyad
