#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dyad {

// Members of a dyad are indexed 0 and 1 internally; external formats use 1|2.
inline constexpr int kMembers = 2;

inline int other(int k) { return 1 - k; }

enum class LagTransform { identity, square };

inline double apply_lag_transform(LagTransform t, double y) {
  return t == LagTransform::square ? y * y : y;
}

// Which panel covariate columns play which role, and the shape of the
// dropout hazard. own_cols[k] are the columns that form member k's own
// covariate vector; the partner terms in the outcome model reuse the other
// member's own columns. hazard_cols[k] are the columns entering member k's
// hazard (often empty).
struct ModelSpec {
  int order = 1;  // transition order q
  std::array<std::vector<int>, 2> own_cols;
  std::array<std::vector<int>, 2> hazard_cols;
  LagTransform lag_transform = LagTransform::identity;
  int hazard_lags = 1;  // 1 = previous outcome only; >1 = deeper history
};

// Outcome-model coefficients and variances.
//   mean_kij = b_i + alpha[k] + beta[k].lags(own) + gamma[k].lags(partner)
//             + beta_cov[k].x_own + gamma_cov[k].x_partner,  residual sd
//             sqrt(sigma2[k]); dyad intercepts b_i ~ N(0, tau_b2).
struct MeasurementParams {
  std::array<double, 2> alpha{0.0, 0.0};
  std::array<std::vector<double>, 2> beta;       // own-lag coefficients (q)
  std::array<std::vector<double>, 2> gamma;      // partner-lag coefficients (q)
  std::array<std::vector<double>, 2> beta_cov;   // own-covariate coefficients
  std::array<std::vector<double>, 2> gamma_cov;  // partner-covariate coeffs
  std::array<double, 2> sigma2{1.0, 1.0};
  double tau_b2 = 1.0;

  void validate() const {
    if (sigma2[0] <= 0.0 || sigma2[1] <= 0.0 || tau_b2 <= 0.0)
      throw std::domain_error("measurement variances must be positive");
  }
};

// Dropout-hazard coefficients.
//   logit(lambda_kij) = c_i + xi[k] + psi[k].x + sum_l delta[k][l]*g(y_lag_l)
//                      + phi[k]*y_current,  c_i ~ N(0, tau_c2).
struct DropoutParams {
  std::array<double, 2> xi{0.0, 0.0};
  std::array<std::vector<double>, 2> psi;
  std::array<std::vector<double>, 2> delta;  // one entry per modeled lag
  std::array<double, 2> phi{0.0, 0.0};
  LagTransform transform = LagTransform::identity;
  double tau_c2 = 1.0;

  void validate() const {
    if (tau_c2 <= 0.0)
      throw std::domain_error("dropout random-effect variance must be positive");
  }
};

struct RandomEffects {
  std::vector<double> b;  // outcome-model dyad intercepts
  std::vector<double> c;  // dropout-model dyad intercepts
};

struct NormalPrior {
  double mean = 0.0;
  double variance = 1.0;
};

// Priors used by the sampler. Regression and hazard coefficients are flat
// unless coef_prior is set (the validation harness requires proper priors);
// phi_prior overrides coef_prior for the current-outcome hazard coefficient
// and drives the sensitivity sweeps.
struct PriorSpec {
  double ig_shape = 0.1;  // shared inverse-gamma shape for all variances
  double ig_scale = 0.1;
  std::optional<NormalPrior> phi_prior;
  std::optional<NormalPrior> coef_prior;

  void validate() const {
    if (ig_shape <= 0.0 || ig_scale <= 0.0)
      throw std::domain_error("inverse-gamma hyperparameters must be positive");
    if (phi_prior && phi_prior->variance <= 0.0)
      throw std::domain_error("phi prior variance must be positive");
    if (coef_prior && coef_prior->variance <= 0.0)
      throw std::domain_error("coefficient prior variance must be positive");
  }
};

}  // namespace dyad
