#include "dyad/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dyad {

namespace {

constexpr double kLogitSat = 700.0;  // exp() overflow guard
constexpr double kTwoPi = 6.283185307179586476925286766559;

double clamp_logit(double t) { return std::clamp(t, -kLogitSat, kLogitSat); }

double require_lag(const CompletedOutcomes& yc, int k, int i, int j) {
  const double v = yc.at(k, i, j);
  if (std::isnan(v))
    throw std::domain_error("augmentation incomplete: member " +
                            std::to_string(k + 1) + " dyad index " +
                            std::to_string(i) + " time " + std::to_string(j) +
                            " is unavailable");
  return v;
}

}  // namespace

double inv_logit(double t) {
  t = clamp_logit(t);
  const double v = 1.0 / (1.0 + std::exp(-t));
  // keep strictly inside (0,1); the log-space forms below carry the tails
  return std::clamp(v, 1e-300, 1.0 - 1e-15);
}

double log_inv_logit(double t) { return -std::log1p(std::exp(-clamp_logit(t))); }

double log1m_inv_logit(double t) { return -std::log1p(std::exp(clamp_logit(t))); }

double log_normal_pdf(double x, double mean, double var) {
  if (var <= 0.0) throw std::domain_error("normal variance must be positive");
  const double r = x - mean;
  return -0.5 * std::log(kTwoPi * var) - 0.5 * r * r / var;
}

double transition_mean(const DyadPanel& panel, const ModelSpec& spec,
                       const MeasurementParams& mp, int k, int i, int j,
                       double b_i, const CompletedOutcomes& yc) {
  return b_i + transition_mean_no_b(panel, spec, mp, k, i, j, yc);
}

double transition_mean_no_b(const DyadPanel& panel, const ModelSpec& spec,
                            const MeasurementParams& mp, int k, int i, int j,
                            const CompletedOutcomes& yc) {
  const int q = spec.order;
  if (j < q + 1) throw std::domain_error("transition mean needs j >= q+1");
  const int kp = other(k);
  double m = mp.alpha[k];
  for (int l = 1; l <= q; ++l) {
    m += mp.beta[k][l - 1] * require_lag(yc, k, i, j - l);
    m += mp.gamma[k][l - 1] * require_lag(yc, kp, i, j - l);
  }
  const auto x_own = panel.x_at(k, i, j);
  for (std::size_t c = 0; c < spec.own_cols[k].size(); ++c)
    m += mp.beta_cov[k][c] * x_own[spec.own_cols[k][c]];
  const auto x_par = panel.x_at(kp, i, j);
  for (std::size_t c = 0; c < spec.own_cols[kp].size(); ++c)
    m += mp.gamma_cov[k][c] * x_par[spec.own_cols[kp][c]];
  return m;
}

double measurement_loglik(const DyadPanel& panel, const ModelSpec& spec,
                          const MeasurementParams& mp,
                          const RandomEffects& effects,
                          const CompletedOutcomes& yc) {
  mp.validate();
  double ll = 0.0;
  for (int i = 0; i < panel.n_dyads; ++i) {
    const int horizon = panel.horizon(i);
    for (int k = 0; k < kMembers; ++k)
      for (int j = spec.order + 1; j <= horizon; ++j) {
        const double mu =
            transition_mean(panel, spec, mp, k, i, j, effects.b[i], yc);
        ll += log_normal_pdf(require_lag(yc, k, i, j), mu, mp.sigma2[k]);
      }
  }
  return ll;
}

double hazard(const DropoutParams& dp, int k, double c_i, double y_current,
              std::span<const double> lags, std::span<const double> x) {
  double t = c_i + dp.xi[k] + dp.phi[k] * y_current;
  const std::size_t nl = std::min(lags.size(), dp.delta[k].size());
  for (std::size_t l = 0; l < nl; ++l)
    t += dp.delta[k][l] * apply_lag_transform(dp.transform, lags[l]);
  for (std::size_t c = 0; c < x.size(); ++c) t += dp.psi[k][c] * x[c];
  return inv_logit(t);
}

double hazard_logit_at(const DyadPanel& panel, const ModelSpec& spec,
                       const DropoutParams& dp, int k, int i, int j,
                       double c_i, const CompletedOutcomes& yc) {
  if (j < 2) throw std::domain_error("hazard defined for waves j >= 2");
  double t = c_i + dp.xi[k] + dp.phi[k] * require_lag(yc, k, i, j);
  const int nl = std::min(static_cast<int>(dp.delta[k].size()), j - 1);
  for (int l = 1; l <= nl; ++l)
    t += dp.delta[k][l - 1] *
         apply_lag_transform(dp.transform, require_lag(yc, k, i, j - l));
  const auto x = panel.x_at(k, i, j);
  for (std::size_t c = 0; c < spec.hazard_cols[k].size(); ++c)
    t += dp.psi[k][c] * x[spec.hazard_cols[k][c]];
  return t;
}

double hazard_at(const DyadPanel& panel, const ModelSpec& spec,
                 const DropoutParams& dp, int k, int i, int j, double c_i,
                 const CompletedOutcomes& yc) {
  return inv_logit(hazard_logit_at(panel, spec, dp, k, i, j, c_i, yc));
}

double dropout_logprob(int d, int n_times, std::span<const double> hazards) {
  if (d < 2 || d > n_times + 1)
    throw std::domain_error("dropout time out of range");
  const int last = std::min(d, n_times);
  if (static_cast<int>(hazards.size()) < last - 1)
    throw std::domain_error("hazard sequence shorter than dropout range");
  double lp = 0.0;
  for (int j = 2; j < d; ++j) lp += std::log1p(-hazards[j - 2]);
  if (d <= n_times) lp += std::log(hazards[d - 2]);
  return lp;
}

double member_dropout_loglik(const DyadPanel& panel, const ModelSpec& spec,
                             const DropoutParams& dp, int k, int i, double c_i,
                             const CompletedOutcomes& yc) {
  const int d = panel.dropout[k][i];
  double lp = 0.0;
  for (int j = 2; j < d && j <= panel.n_times; ++j)
    lp += log1m_inv_logit(hazard_logit_at(panel, spec, dp, k, i, j, c_i, yc));
  if (d <= panel.n_times)
    lp += log_inv_logit(hazard_logit_at(panel, spec, dp, k, i, d, c_i, yc));
  return lp;
}

double joint_loglik(const DyadPanel& panel, const ModelSpec& spec,
                    const MeasurementParams& mp, const DropoutParams& dp,
                    const RandomEffects& effects, const CompletedOutcomes& yc) {
  dp.validate();
  double ll = measurement_loglik(panel, spec, mp, effects, yc);
  for (int i = 0; i < panel.n_dyads; ++i) {
    for (int k = 0; k < kMembers; ++k)
      ll += member_dropout_loglik(panel, spec, dp, k, i, effects.c[i], yc);
    ll += log_normal_pdf(effects.b[i], 0.0, mp.tau_b2);
    ll += log_normal_pdf(effects.c[i], 0.0, dp.tau_c2);
  }
  return ll;
}

}  // namespace dyad
