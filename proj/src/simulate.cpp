#include "dyad/simulate.hpp"

#include <cmath>

#include "dyad/model.hpp"

namespace dyad {

namespace {

MeasurementParams shared_truth() {
  MeasurementParams mp;
  mp.alpha = {0.0, 0.0};
  mp.beta[0] = {0.5};
  mp.gamma[0] = {0.5};
  mp.beta[1] = {0.6};
  mp.gamma[1] = {0.6};
  mp.beta_cov[0] = {1.0};
  mp.gamma_cov[0] = {1.0};
  mp.beta_cov[1] = {1.0};
  mp.gamma_cov[1] = {1.0};
  mp.sigma2 = {1.0, 1.0};
  mp.tau_b2 = 1.0;
  return mp;
}

}  // namespace

SimDesign SimDesign::variant_a() {
  SimDesign d;
  d.variant = SimVariant::A;
  d.baseline_mean = {5.0, 7.0};
  d.baseline_sd = {1.0, 1.0};
  d.truth = shared_truth();
  d.dropout.xi = {-13.15, -13.15};
  d.dropout.delta[0] = {0.5};
  d.dropout.delta[1] = {0.5};
  d.dropout.phi = {1.0, 1.0};
  d.dropout.transform = LagTransform::identity;
  d.dropout.tau_c2 = 1.0;
  return d;
}

SimDesign SimDesign::variant_b() {
  SimDesign d;
  d.variant = SimVariant::B;
  d.baseline_mean = {3.0, 3.0};
  d.baseline_sd = {1.0, 1.0};
  d.truth = shared_truth();
  d.dropout.xi = {-15.0, -15.0};
  d.dropout.delta[0] = {1.0};
  d.dropout.delta[1] = {1.0};
  d.dropout.phi = {0.0, 0.0};
  d.dropout.transform = LagTransform::square;
  d.dropout.tau_c2 = 1.0;
  return d;
}

ModelSpec SimDesign::model_spec() const {
  ModelSpec spec;
  spec.order = 1;
  spec.own_cols[0] = {0};  // column x1 is member 1's covariate
  spec.own_cols[1] = {1};
  spec.hazard_cols[0] = {};
  spec.hazard_cols[1] = {};
  spec.lag_transform = dropout.transform;
  spec.hazard_lags = 1;
  return spec;
}

std::map<std::string, double> SimDesign::truth_by_name() const {
  return {
      {"meas.k1.beta", truth.beta[0][0]},
      {"meas.k1.gamma", truth.gamma[0][0]},
      {"meas.k1.btilde.x1", truth.beta_cov[0][0]},
      {"meas.k1.gtilde.x2", truth.gamma_cov[0][0]},
      {"meas.k2.beta", truth.beta[1][0]},
      {"meas.k2.gamma", truth.gamma[1][0]},
      {"meas.k2.btilde.x2", truth.beta_cov[1][0]},
      {"meas.k2.gtilde.x1", truth.gamma_cov[1][0]},
  };
}

DyadPanel generate_dataset(const SimDesign& design, std::uint64_t replicate_seed,
                           GeneratedTruth* audit) {
  const int n = design.n_dyads, J = design.n_times;
  Rng rng(replicate_seed);
  DyadPanel panel = DyadPanel::empty(n, J, {"x1", "x2"});
  const ModelSpec spec = design.model_spec();

  CompletedOutcomes full;
  full.n_times = J;
  full.yc[0].assign(static_cast<std::size_t>(n) * J, 0.0);
  full.yc[1].assign(static_cast<std::size_t>(n) * J, 0.0);

  RandomEffects re;
  re.b.resize(n);
  re.c.resize(n);

  for (int i = 0; i < n; ++i) {
    const double x1 = rng.normal();
    const double x2 = rng.normal();
    for (int k = 0; k < kMembers; ++k)
      for (int j = 1; j <= J; ++j) {
        panel.x_at(k, i, j, 0) = x1;
        panel.x_at(k, i, j, 1) = x2;
      }
    re.b[i] = rng.normal(0.0, std::sqrt(design.truth.tau_b2));
    re.c[i] = rng.normal(0.0, std::sqrt(design.dropout.tau_c2));

    for (int k = 0; k < kMembers; ++k)
      full.at(k, i, 1) =
          rng.normal(design.baseline_mean[k], design.baseline_sd[k]);
    for (int j = 2; j <= J; ++j)
      for (int k = 0; k < kMembers; ++k) {
        const double mu =
            transition_mean(panel, spec, design.truth, k, i, j, re.b[i], full);
        full.at(k, i, j) = rng.normal(mu, std::sqrt(design.truth.sigma2[k]));
      }

    // wave-by-wave dropout; baseline is always observed
    for (int k = 0; k < kMembers; ++k) {
      int d = J + 1;
      for (int j = 2; j <= J; ++j) {
        const double lam = hazard_at(panel, spec, design.dropout, k, i, j,
                                     re.c[i], full);
        if (rng.uniform() < lam) {
          d = j;
          break;
        }
      }
      panel.dropout[k][i] = d;
      for (int j = 1; j < d; ++j) panel.y_at(k, i, j) = full.at(k, i, j);
    }
  }

  if (audit) {
    audit->full = full;
    audit->dropout[0] = panel.dropout[0];
    audit->dropout[1] = panel.dropout[1];
    audit->b = re.b;
    audit->c = re.c;
  }
  return panel;
}

double dyad_dropout_fraction(const DyadPanel& panel, int wave) {
  if (panel.n_dyads == 0) return 0.0;
  int count = 0;
  for (int i = 0; i < panel.n_dyads; ++i)
    if (std::min(panel.dropout[0][i], panel.dropout[1][i]) == wave) ++count;
  return static_cast<double>(count) / panel.n_dyads;
}

}  // namespace dyad
