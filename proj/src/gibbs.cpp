#include "dyad/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dyad/util.hpp"

namespace dyad {

void SamplerConfig::validate() const {
  if (n_iter <= 0) throw std::invalid_argument("n_iter must be positive");
  if (burn_in < 0 || burn_in >= n_iter)
    throw std::invalid_argument("burn_in must lie in [0, n_iter)");
  if (thin < 1) throw std::invalid_argument("thin must be >= 1");
  prior.validate();
}

int ChainOutput::col(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end())
    throw std::invalid_argument("unknown parameter name: " + name);
  return static_cast<int>(it - names.begin());
}

std::vector<double> ChainOutput::column(const std::string& name) const {
  const int c = col(name);
  std::vector<double> out(static_cast<std::size_t>(n_retained));
  for (int r = 0; r < n_retained; ++r) out[r] = at(r, c);
  return out;
}

const ChainSummary& ChainOutput::summary(const std::string& name) const {
  return summaries[col(name)];
}

ChainSummary summarize(const std::vector<double>& draws) {
  ChainSummary s;
  s.mean = mean_of(draws);
  s.sd = sd_of(draws);
  s.q025 = quantile_of(draws, 0.025);
  s.q975 = quantile_of(draws, 0.975);
  return s;
}

GibbsEngine::GibbsEngine(const DyadPanel& panel, const ModelSpec& spec,
                         SamplerConfig config)
    : panel_(&panel), spec_(spec), cfg_(std::move(config)) {
  cfg_.validate();
  if (spec_.order != 1)
    throw std::invalid_argument(
        "the full sampler supports first-order transitions only");
  build_rows_full();
  build_slots();
  build_hazard_centers();
  for (int k = 0; k < kMembers; ++k) {
    const int d = varpi_dim(k);
    varpi_adapt_[k].mean = Eigen::VectorXd::Zero(d);
    varpi_adapt_[k].cov_acc = Eigen::MatrixXd::Zero(d, d);
    varpi_adapt_[k].chol =
        Eigen::MatrixXd::Identity(d, d) * cfg_.block_scale0;
  }
  c_log_scale_ = std::log(cfg_.scalar_scale0);
}

GibbsEngine GibbsEngine::measurement_only(
    const DyadPanel& panel, const ModelSpec& spec, SamplerConfig config,
    std::array<std::vector<std::vector<int>>, 2> rows) {
  config.validate();
  GibbsEngine e(panel, spec, std::move(config), std::move(rows));
  return e;
}

// private delegating path for the measurement-only factory
GibbsEngine::GibbsEngine(const DyadPanel& panel, const ModelSpec& spec,
                         SamplerConfig config,
                         std::array<std::vector<std::vector<int>>, 2> rows)
    : panel_(&panel),
      spec_(spec),
      cfg_(std::move(config)),
      full_(false),
      rows_(std::move(rows)) {}

void GibbsEngine::build_rows_full() {
  const auto& p = *panel_;
  for (int k = 0; k < kMembers; ++k) {
    rows_[k].assign(p.n_dyads, {});
    for (int i = 0; i < p.n_dyads; ++i) {
      const int horizon = p.horizon(i);
      for (int j = spec_.order + 1; j <= horizon; ++j)
        rows_[k][i].push_back(j);
    }
  }
}

// Missing slots per dyad: the earlier dropper's waves d..horizon, then the
// later dropper's terminal wave if it is missing too. A slot at the member's
// own dropout wave carries that member's hazard factor.
void GibbsEngine::build_slots() {
  const auto& p = *panel_;
  slot_begin_.assign(p.n_dyads + 1, 0);
  for (int i = 0; i < p.n_dyads; ++i) {
    const int horizon = p.horizon(i);
    int early = p.dropout[0][i] <= p.dropout[1][i] ? 0 : 1;
    for (int m = 0; m < kMembers; ++m) {
      const int k = m == 0 ? early : other(early);
      const int d = p.dropout[k][i];
      for (int j = d; j <= horizon; ++j)
        slots_.push_back({k, j, j == d});
    }
    slot_begin_[i + 1] = static_cast<int>(slots_.size());
  }
}

void GibbsEngine::build_hazard_centers() {
  const auto& p = *panel_;
  for (int k = 0; k < kMembers; ++k) {
    std::vector<double> center;
    for (int c : spec_.hazard_cols[k]) {
      double s = 0.0;
      long n = 0;
      for (int i = 0; i < p.n_dyads; ++i)
        for (int j = 2; j <= p.n_times; ++j) {
          s += p.x_at(k, i, j)[c];
          ++n;
        }
      center.push_back(n ? s / static_cast<double>(n) : 0.0);
    }
    double y_mean = 0.0, g_mean = 0.0;
    long n_obs = 0;
    for (int i = 0; i < p.n_dyads; ++i)
      for (int j = 1; j <= p.n_times; ++j)
        if (p.observed(k, i, j)) {
          y_mean += p.y_at(k, i, j);
          g_mean += apply_lag_transform(spec_.lag_transform, p.y_at(k, i, j));
          ++n_obs;
        }
    if (n_obs > 0) {
      y_mean /= static_cast<double>(n_obs);
      g_mean /= static_cast<double>(n_obs);
    }
    for (int l = 0; l < spec_.hazard_lags; ++l) center.push_back(g_mean);
    if (!cfg_.fixed_phi) center.push_back(y_mean);
    hazard_center_[k] = std::move(center);
  }
}

SamplerState GibbsEngine::make_state() const {
  const auto& p = *panel_;
  SamplerState s{MeasurementParams{}, DropoutParams{}, RandomEffects{},
                 CompletedOutcomes::locf(p), Rng(cfg_.seed)};
  const int q = spec_.order;
  for (int k = 0; k < kMembers; ++k) {
    s.mp.beta[k].assign(q, 0.0);
    s.mp.gamma[k].assign(q, 0.0);
    s.mp.beta_cov[k].assign(spec_.own_cols[k].size(), 0.0);
    s.mp.gamma_cov[k].assign(spec_.own_cols[other(k)].size(), 0.0);
    s.dp.psi[k].assign(spec_.hazard_cols[k].size(), 0.0);
    s.dp.delta[k].assign(spec_.hazard_lags, 0.0);
    s.dp.phi[k] = cfg_.fixed_phi.value_or(0.0);
    if (full_) {
      // start the hazard intercept at the member's crude event rate
      long events = 0, exposure = 0;
      for (int i = 0; i < p.n_dyads; ++i) {
        const int d = p.dropout[k][i];
        if (d <= p.n_times) ++events;
        exposure += std::min(d, p.n_times) - 1;
      }
      if (exposure > 0) {
        const double rate =
            std::clamp(static_cast<double>(events) / exposure, 0.02, 0.98);
        s.dp.xi[k] = std::log(rate / (1.0 - rate));
      }
    }
  }
  s.dp.transform = spec_.lag_transform;
  s.re.b.assign(p.n_dyads, 0.0);
  s.re.c.assign(p.n_dyads, 0.0);
  return s;
}

void GibbsEngine::check_finite(const SamplerState& s,
                               const std::string& block) const {
  auto bad = [&](double v) { return !std::isfinite(v); };
  for (int k = 0; k < kMembers; ++k) {
    if (bad(s.mp.alpha[k]) || bad(s.mp.sigma2[k]) || bad(s.dp.xi[k]) ||
        bad(s.dp.phi[k]))
      throw SamplerAbort(iteration_, block, "non-finite parameter");
    for (const auto* v :
         {&s.mp.beta[k], &s.mp.gamma[k], &s.mp.beta_cov[k], &s.mp.gamma_cov[k],
          &s.dp.psi[k], &s.dp.delta[k]})
      for (double x : *v)
        if (bad(x)) throw SamplerAbort(iteration_, block, "non-finite parameter");
  }
  if (bad(s.mp.tau_b2) || bad(s.dp.tau_c2))
    throw SamplerAbort(iteration_, block, "non-finite variance");
  for (double x : s.re.b)
    if (bad(x)) throw SamplerAbort(iteration_, block, "non-finite effect");
  for (double x : s.re.c)
    if (bad(x)) throw SamplerAbort(iteration_, block, "non-finite effect");
}

// ---------------------------------------------------------------------------
// data augmentation

void GibbsEngine::step_augment(SamplerState& s) {
  const auto& p = *panel_;
  for (int i = 0; i < p.n_dyads; ++i) {
    const int horizon = p.horizon(i);
    for (int si = slot_begin_[i]; si < slot_begin_[i + 1]; ++si) {
      const Slot& slot = slots_[si];
      const int k = slot.member, j = slot.wave, kp = other(k);

      // Gaussian part of the conditional: the slot's own transition term,
      // plus the two next-wave terms in which the value appears as a lag.
      double prec = 1.0 / s.mp.sigma2[k];
      double num =
          transition_mean(p, spec_, s.mp, k, i, j, s.re.b[i], s.yc) * prec;
      if (j + 1 <= horizon) {
        const double cur = s.yc.at(k, i, j);
        {
          const double a = s.mp.beta[k][0];
          if (a != 0.0) {
            const double excl =
                transition_mean(p, spec_, s.mp, k, i, j + 1, s.re.b[i], s.yc) -
                a * cur;
            prec += a * a / s.mp.sigma2[k];
            num += a * (s.yc.at(k, i, j + 1) - excl) / s.mp.sigma2[k];
          }
        }
        {
          const double a = s.mp.gamma[kp][0];
          if (a != 0.0) {
            const double excl =
                transition_mean(p, spec_, s.mp, kp, i, j + 1, s.re.b[i], s.yc) -
                a * cur;
            prec += a * a / s.mp.sigma2[kp];
            num += a * (s.yc.at(kp, i, j + 1) - excl) / s.mp.sigma2[kp];
          }
        }
      }
      const double mean = num / prec;
      const double sd = std::sqrt(1.0 / prec);

      if (!slot.hazard_factor) {
        s.yc.at(k, i, j) = s.rng.normal(mean, sd);
        continue;
      }
      // Independence proposal from the Gaussian part; the acceptance ratio
      // is the ratio of the member's dropout-wave hazard factors.
      aug_accept_[k].proposed++;
      const double cur = s.yc.at(k, i, j);
      const double prop = s.rng.normal(mean, sd);
      const double lp_cur =
          log_inv_logit(hazard_logit_at(p, spec_, s.dp, k, i, j, s.re.c[i], s.yc));
      s.yc.at(k, i, j) = prop;
      const double lp_prop =
          log_inv_logit(hazard_logit_at(p, spec_, s.dp, k, i, j, s.re.c[i], s.yc));
      if (std::log(s.rng.uniform()) < lp_prop - lp_cur) {
        aug_accept_[k].accepted++;
      } else {
        s.yc.at(k, i, j) = cur;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// conjugate updates

std::pair<double, double> GibbsEngine::b_conditional(const SamplerState& s,
                                                     int i) const {
  double prec = 1.0 / s.mp.tau_b2;
  double num = 0.0;
  for (int k = 0; k < kMembers; ++k) {
    const double inv_s2 = 1.0 / s.mp.sigma2[k];
    for (int j : rows_[k][i]) {
      const double mu0 = transition_mean_no_b(*panel_, spec_, s.mp, k, i, j, s.yc);
      num += (s.yc.at(k, i, j) - mu0) * inv_s2;
      prec += inv_s2;
    }
  }
  return {num / prec, 1.0 / prec};
}

void GibbsEngine::step_b(SamplerState& s) {
  for (int i = 0; i < panel_->n_dyads; ++i) {
    const auto [mean, var] = b_conditional(s, i);
    s.re.b[i] = s.rng.normal(mean, std::sqrt(var));
  }
}

std::pair<double, double> GibbsEngine::sigma2_conditional(const SamplerState& s,
                                                          int k) const {
  double n_terms = 0.0;
  double rss = 0.0;
  for (int i = 0; i < panel_->n_dyads; ++i)
    for (int j : rows_[k][i]) {
      const double mu =
          transition_mean(*panel_, spec_, s.mp, k, i, j, s.re.b[i], s.yc);
      const double r = s.yc.at(k, i, j) - mu;
      rss += r * r;
      n_terms += 1.0;
    }
  return {cfg_.prior.ig_shape + 0.5 * n_terms,
          cfg_.prior.ig_scale + 0.5 * rss};
}

void GibbsEngine::step_sigma2(SamplerState& s, int k) {
  const auto [shape, scale] = sigma2_conditional(s, k);
  s.mp.sigma2[k] = s.rng.inv_gamma(shape, scale);
}

std::pair<double, double> GibbsEngine::tau_b2_conditional(
    const SamplerState& s) const {
  double ss = 0.0;
  for (double b : s.re.b) ss += b * b;
  return {cfg_.prior.ig_shape + 0.5 * panel_->n_dyads,
          cfg_.prior.ig_scale + 0.5 * ss};
}

void GibbsEngine::step_tau_b2(SamplerState& s) {
  const auto [shape, scale] = tau_b2_conditional(s);
  s.mp.tau_b2 = s.rng.inv_gamma(shape, scale);
}

std::pair<double, double> GibbsEngine::tau_c2_conditional(
    const SamplerState& s) const {
  double ss = 0.0;
  for (double c : s.re.c) ss += c * c;
  return {cfg_.prior.ig_shape + 0.5 * panel_->n_dyads,
          cfg_.prior.ig_scale + 0.5 * ss};
}

void GibbsEngine::step_tau_c2(SamplerState& s) {
  const auto [shape, scale] = tau_c2_conditional(s);
  s.dp.tau_c2 = s.rng.inv_gamma(shape, scale);
}

GibbsEngine::EtaConditional GibbsEngine::eta_conditional(const SamplerState& s,
                                                         int k) const {
  const auto& p = *panel_;
  const int q = spec_.order;
  const int kp = other(k);
  const auto p_own = static_cast<int>(spec_.own_cols[k].size());
  const auto p_par = static_cast<int>(spec_.own_cols[kp].size());
  const int ncol = 1 + 2 * q + p_own + p_par;

  EtaConditional out;
  out.col_names.push_back("alpha");
  for (int l = 1; l <= q; ++l)
    out.col_names.push_back(q == 1 ? "beta" : "beta.l" + std::to_string(l));
  for (int l = 1; l <= q; ++l)
    out.col_names.push_back(q == 1 ? "gamma" : "gamma.l" + std::to_string(l));
  for (int c = 0; c < p_own; ++c)
    out.col_names.push_back("btilde." + p.cov_names[spec_.own_cols[k][c]]);
  for (int c = 0; c < p_par; ++c)
    out.col_names.push_back("gtilde." + p.cov_names[spec_.own_cols[kp][c]]);

  long n_rows = 0;
  for (int i = 0; i < p.n_dyads; ++i) n_rows += rows_[k][i].size();

  Eigen::MatrixXd Z(n_rows, ncol);
  Eigen::VectorXd r(n_rows);
  long row = 0;
  for (int i = 0; i < p.n_dyads; ++i)
    for (int j : rows_[k][i]) {
      int c = 0;
      Z(row, c++) = 1.0;
      for (int l = 1; l <= q; ++l) Z(row, c++) = s.yc.at(k, i, j - l);
      for (int l = 1; l <= q; ++l) Z(row, c++) = s.yc.at(kp, i, j - l);
      const auto x_own = p.x_at(k, i, j);
      for (int cc = 0; cc < p_own; ++cc)
        Z(row, c++) = x_own[spec_.own_cols[k][cc]];
      const auto x_par = p.x_at(kp, i, j);
      for (int cc = 0; cc < p_par; ++cc)
        Z(row, c++) = x_par[spec_.own_cols[kp][cc]];
      r(row) = s.yc.at(k, i, j) - s.re.b[i];
      ++row;
    }

  const double inv_s2 = 1.0 / s.mp.sigma2[k];
  Eigen::MatrixXd A = Z.transpose() * Z * inv_s2;
  Eigen::VectorXd rhs = Z.transpose() * r * inv_s2;
  if (cfg_.prior.coef_prior) {
    const double inv_v = 1.0 / cfg_.prior.coef_prior->variance;
    for (int c = 0; c < ncol; ++c) {
      A(c, c) += inv_v;
      rhs(c) += cfg_.prior.coef_prior->mean * inv_v;
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
    qr.setThreshold(1e-10);
    const int rank = static_cast<int>(qr.rank());
    std::string cols;
    const auto perm = qr.colsPermutation().indices();
    for (int c = rank; c < ncol; ++c) {
      if (!cols.empty()) cols += ", ";
      cols += out.col_names[perm(c)];
    }
    throw std::runtime_error("regression design for member " +
                             std::to_string(k + 1) +
                             " is rank deficient; collinear columns: " + cols);
  }
  out.mean = llt.solve(rhs);
  out.cov = llt.solve(Eigen::MatrixXd::Identity(ncol, ncol));
  return out;
}

void GibbsEngine::step_eta(SamplerState& s, int k) {
  const auto cond = eta_conditional(s, k);
  const int ncol = static_cast<int>(cond.mean.size());
  Eigen::LLT<Eigen::MatrixXd> llt(cond.cov);
  if (llt.info() != Eigen::Success)
    throw SamplerAbort(iteration_, "eta.k" + std::to_string(k + 1),
                       "conditional covariance not positive definite");
  Eigen::VectorXd z(ncol);
  for (int c = 0; c < ncol; ++c) z(c) = s.rng.normal();
  Eigen::VectorXd draw = cond.mean + llt.matrixL() * z;

  const int q = spec_.order;
  int c = 0;
  s.mp.alpha[k] = draw(c++);
  for (int l = 0; l < q; ++l) s.mp.beta[k][l] = draw(c++);
  for (int l = 0; l < q; ++l) s.mp.gamma[k][l] = draw(c++);
  for (auto& v : s.mp.beta_cov[k]) v = draw(c++);
  for (auto& v : s.mp.gamma_cov[k]) v = draw(c++);
}

// ---------------------------------------------------------------------------
// hazard-block and dropout-intercept Metropolis updates

int GibbsEngine::varpi_dim(int k) const {
  return 1 + static_cast<int>(spec_.hazard_cols[k].size()) + spec_.hazard_lags +
         (cfg_.fixed_phi ? 0 : 1);
}

std::vector<double> GibbsEngine::varpi_values(const SamplerState& s,
                                              int k) const {
  std::vector<double> w;
  w.push_back(s.dp.xi[k]);
  for (double v : s.dp.psi[k]) w.push_back(v);
  for (double v : s.dp.delta[k]) w.push_back(v);
  if (!cfg_.fixed_phi) w.push_back(s.dp.phi[k]);
  return w;
}

void GibbsEngine::set_varpi(SamplerState& s, int k,
                            const std::vector<double>& w) const {
  std::size_t c = 0;
  s.dp.xi[k] = w[c++];
  for (auto& v : s.dp.psi[k]) v = w[c++];
  for (auto& v : s.dp.delta[k]) v = w[c++];
  if (!cfg_.fixed_phi) s.dp.phi[k] = w[c++];
}

double GibbsEngine::varpi_logpost(const SamplerState& s, int k,
                                  const std::vector<double>& w) const {
  SamplerState tmp = s;  // shallow-ish copy; only dp is consulted below
  set_varpi(tmp, k, w);
  double lp = 0.0;
  for (int i = 0; i < panel_->n_dyads; ++i)
    lp += member_dropout_loglik(*panel_, spec_, tmp.dp, k, i, s.re.c[i], s.yc);
  if (cfg_.prior.coef_prior)
    for (double v : w)
      lp += log_normal_pdf(v, cfg_.prior.coef_prior->mean,
                           cfg_.prior.coef_prior->variance);
  if (cfg_.prior.phi_prior && !cfg_.fixed_phi) {
    const double phi = w.back();
    if (cfg_.prior.coef_prior)  // replace the generic term for phi
      lp -= log_normal_pdf(phi, cfg_.prior.coef_prior->mean,
                           cfg_.prior.coef_prior->variance);
    lp += log_normal_pdf(phi, cfg_.prior.phi_prior->mean,
                         cfg_.prior.phi_prior->variance);
  }
  return lp;
}

void GibbsEngine::adapt_block(int k, const std::vector<double>& w,
                              double alpha) {
  BlockAdapt& a = varpi_adapt_[k];
  const int d = static_cast<int>(w.size());
  Eigen::Map<const Eigen::VectorXd> wv(w.data(), d);
  a.n_obs++;
  const Eigen::VectorXd delta = wv - a.mean;
  a.mean += delta / static_cast<double>(a.n_obs);
  a.cov_acc += delta * (wv - a.mean).transpose();

  a.rm_step++;
  const double target = d == 1 ? cfg_.target_scalar : cfg_.target_block;
  a.log_scale +=
      std::pow(static_cast<double>(a.rm_step), -0.6) * (alpha - target);

  if (a.n_obs >= 20 && a.n_obs % 25 == 0) {
    Eigen::MatrixXd cov = a.cov_acc / static_cast<double>(a.n_obs - 1);
    cov += Eigen::MatrixXd::Identity(d, d) * 1e-8;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) a.chol = llt.matrixL();
  }
}

void GibbsEngine::step_varpi(SamplerState& s, int k) {
  const int d = varpi_dim(k);
  const auto& center = hazard_center_[k];
  std::vector<double> w = varpi_values(s, k);
  // Work in the parameterization whose first coordinate is the linear
  // predictor at the feature means (unit-determinant shear), then map back.
  auto to_centered = [&](const std::vector<double>& v) {
    std::vector<double> u = v;
    for (int c = 1; c < d; ++c) u[0] += center[static_cast<std::size_t>(c) - 1] * v[static_cast<std::size_t>(c)];
    return u;
  };
  auto from_centered = [&](const std::vector<double>& u) {
    std::vector<double> v = u;
    for (int c = 1; c < d; ++c) v[0] -= center[static_cast<std::size_t>(c) - 1] * u[static_cast<std::size_t>(c)];
    return v;
  };

  std::vector<double> u = to_centered(w);
  Eigen::VectorXd z(d);
  for (int c = 0; c < d; ++c) z(c) = s.rng.normal();
  const double scale =
      std::exp(varpi_adapt_[k].log_scale) * (2.38 / std::sqrt(double(d)));
  Eigen::VectorXd stepv = varpi_adapt_[k].chol * z * scale;
  std::vector<double> u_prop = u;
  for (int c = 0; c < d; ++c) u_prop[static_cast<std::size_t>(c)] += stepv(c);
  const std::vector<double> w_prop = from_centered(u_prop);

  const double lp_cur = varpi_logpost(s, k, w);
  const double lp_prop = varpi_logpost(s, k, w_prop);
  const double alpha = std::min(1.0, std::exp(lp_prop - lp_cur));
  varpi_accept_[k].proposed++;
  if (std::log(s.rng.uniform()) < lp_prop - lp_cur) {
    set_varpi(s, k, w_prop);
    varpi_accept_[k].accepted++;
    u = u_prop;
  }
  if (adapting_) adapt_block(k, u, alpha);
}

double GibbsEngine::c_logpost(const SamplerState& s, int i, double c_i) const {
  double lp = log_normal_pdf(c_i, 0.0, s.dp.tau_c2);
  for (int k = 0; k < kMembers; ++k)
    lp += member_dropout_loglik(*panel_, spec_, s.dp, k, i, c_i, s.yc);
  return lp;
}

void GibbsEngine::step_c(SamplerState& s) {
  const double sc = std::exp(c_log_scale_);
  double alpha_sum = 0.0;
  for (int i = 0; i < panel_->n_dyads; ++i) {
    const double cur = s.re.c[i];
    const double prop = cur + sc * s.rng.normal();
    const double dlp = c_logpost(s, i, prop) - c_logpost(s, i, cur);
    alpha_sum += std::min(1.0, std::exp(dlp));
    c_accept_.proposed++;
    if (std::log(s.rng.uniform()) < dlp) {
      s.re.c[i] = prop;
      c_accept_.accepted++;
    }
  }
  if (adapting_ && panel_->n_dyads > 0) {
    c_rm_step_++;
    const double alpha = alpha_sum / panel_->n_dyads;
    c_log_scale_ += std::pow(static_cast<double>(c_rm_step_), -0.6) *
                    (alpha - cfg_.target_scalar);
  }
}

// ---------------------------------------------------------------------------

void GibbsEngine::iterate(SamplerState& s) {
  if (full_) {
    step_augment(s);
    check_finite(s, "augment");
  }
  step_b(s);
  check_finite(s, "b");
  for (int k = 0; k < kMembers; ++k) step_sigma2(s, k);
  step_tau_b2(s);
  check_finite(s, "variance");
  for (int k = 0; k < kMembers; ++k) {
    step_eta(s, k);
    check_finite(s, "eta.k" + std::to_string(k + 1));
  }
  if (full_) {
    for (int k = 0; k < kMembers; ++k) step_varpi(s, k);
    step_c(s);
    step_tau_c2(s);
    check_finite(s, "dropout");
  }
}

std::vector<std::string> GibbsEngine::param_names() const {
  const auto& p = *panel_;
  std::vector<std::string> names;
  const int q = spec_.order;
  for (int k = 0; k < kMembers; ++k) {
    const std::string mk = "meas.k" + std::to_string(k + 1) + ".";
    names.push_back(mk + "alpha");
    for (int l = 1; l <= q; ++l)
      names.push_back(mk + (q == 1 ? "beta" : "beta.l" + std::to_string(l)));
    for (int l = 1; l <= q; ++l)
      names.push_back(mk + (q == 1 ? "gamma" : "gamma.l" + std::to_string(l)));
    for (int c : spec_.own_cols[k])
      names.push_back(mk + "btilde." + p.cov_names[c]);
    for (int c : spec_.own_cols[other(k)])
      names.push_back(mk + "gtilde." + p.cov_names[c]);
  }
  names.push_back("meas.sigma2.k1");
  names.push_back("meas.sigma2.k2");
  names.push_back("meas.tau_b2");
  if (full_) {
    for (int k = 0; k < kMembers; ++k) {
      const std::string dk = "drop.k" + std::to_string(k + 1) + ".";
      names.push_back(dk + "xi");
      for (int c : spec_.hazard_cols[k])
        names.push_back(dk + "psi." + p.cov_names[c]);
      for (int l = 1; l <= spec_.hazard_lags; ++l)
        names.push_back(dk + (spec_.hazard_lags == 1
                                  ? "delta"
                                  : "delta.l" + std::to_string(l)));
      names.push_back(dk + "phi");
    }
    names.push_back("drop.tau_c2");
  }
  return names;
}

std::vector<double> GibbsEngine::param_values(const SamplerState& s) const {
  std::vector<double> v;
  for (int k = 0; k < kMembers; ++k) {
    v.push_back(s.mp.alpha[k]);
    for (double x : s.mp.beta[k]) v.push_back(x);
    for (double x : s.mp.gamma[k]) v.push_back(x);
    for (double x : s.mp.beta_cov[k]) v.push_back(x);
    for (double x : s.mp.gamma_cov[k]) v.push_back(x);
  }
  v.push_back(s.mp.sigma2[0]);
  v.push_back(s.mp.sigma2[1]);
  v.push_back(s.mp.tau_b2);
  if (full_) {
    for (int k = 0; k < kMembers; ++k) {
      v.push_back(s.dp.xi[k]);
      for (double x : s.dp.psi[k]) v.push_back(x);
      for (double x : s.dp.delta[k]) v.push_back(x);
      v.push_back(s.dp.phi[k]);
    }
    v.push_back(s.dp.tau_c2);
  }
  return v;
}

double GibbsEngine::loglik(const SamplerState& s) const {
  if (full_)
    return joint_loglik(*panel_, spec_, s.mp, s.dp, s.re, s.yc);
  double ll = 0.0;
  for (int i = 0; i < panel_->n_dyads; ++i) {
    for (int k = 0; k < kMembers; ++k) {
      const double inv_s2 = 1.0 / s.mp.sigma2[k];
      for (int j : rows_[k][i]) {
        const double mu =
            transition_mean(*panel_, spec_, s.mp, k, i, j, s.re.b[i], s.yc);
        const double r = s.yc.at(k, i, j) - mu;
        ll += -0.5 * std::log(2.0 * M_PI * s.mp.sigma2[k]) -
              0.5 * r * r * inv_s2;
      }
    }
    ll += log_normal_pdf(s.re.b[i], 0.0, s.mp.tau_b2);
  }
  return ll;
}

std::map<std::string, double> GibbsEngine::acceptance_rates() const {
  std::map<std::string, double> m;
  if (!full_) return m;
  m["augment.k1"] = aug_accept_[0].rate();
  m["augment.k2"] = aug_accept_[1].rate();
  m["varpi.k1"] = varpi_accept_[0].rate();
  m["varpi.k2"] = varpi_accept_[1].rate();
  m["c"] = c_accept_.rate();
  return m;
}

ChainOutput GibbsEngine::run() {
  SamplerState s = make_state();
  ChainOutput out;
  out.names = param_names();
  const auto n_par = out.names.size();
  out.loglik_trace.reserve(static_cast<std::size_t>(cfg_.n_iter));

  for (iteration_ = 0; iteration_ < cfg_.n_iter; ++iteration_) {
    adapting_ = cfg_.adapt && iteration_ < cfg_.burn_in;
    if (iteration_ == cfg_.burn_in) {
      // count acceptance over the frozen kernel only
      aug_accept_ = {};
      varpi_accept_ = {};
      c_accept_ = {};
    }
    iterate(s);
    const double ll = loglik(s);
    if (!std::isfinite(ll))
      throw SamplerAbort(iteration_, "loglik", "non-finite log likelihood");
    out.loglik_trace.push_back(ll);
    if (iteration_ >= cfg_.burn_in &&
        (iteration_ - cfg_.burn_in) % cfg_.thin == 0) {
      const auto v = param_values(s);
      out.draws.insert(out.draws.end(), v.begin(), v.end());
      out.n_retained++;
    }
  }

  out.summaries.resize(n_par);
  std::vector<double> colbuf(static_cast<std::size_t>(out.n_retained));
  for (std::size_t c = 0; c < n_par; ++c) {
    for (int r = 0; r < out.n_retained; ++r)
      colbuf[static_cast<std::size_t>(r)] = out.at(r, static_cast<int>(c));
    out.summaries[c] = summarize(colbuf);
  }
  out.acceptance = acceptance_rates();

  if (cfg_.check_drift && out.n_retained >= 200) {
    // Sustained monotone drift of the log likelihood signals an improper
    // posterior under the flat coefficient priors.
    const auto& tr = out.loglik_trace;
    const std::size_t n_post = tr.size() - static_cast<std::size_t>(cfg_.burn_in);
    const double* post = tr.data() + cfg_.burn_in;
    double qm[4];
    const std::size_t qn = n_post / 4;
    for (int qi = 0; qi < 4; ++qi)
      qm[qi] = mean_of({post + qi * qn, qn});
    const bool mono = (qm[0] < qm[1] && qm[1] < qm[2] && qm[2] < qm[3]) ||
                      (qm[0] > qm[1] && qm[1] > qm[2] && qm[2] > qm[3]);
    const double spread = sd_of({post, n_post});
    if (mono && std::abs(qm[3] - qm[0]) > 25.0 * spread / std::sqrt(double(qn)))
      throw SamplerAbort(cfg_.n_iter - 1, "loglik",
                         "sustained drift in the log-likelihood trace");
  }
  return out;
}

}  // namespace dyad
