#pragma once

#include <span>

#include "dyad/panel.hpp"
#include "dyad/params.hpp"

namespace dyad {

// Logistic transforms, saturated so the hazard stays strictly inside (0, 1)
// and its log terms stay finite for any finite linear predictor.
double inv_logit(double t);
double log_inv_logit(double t);        // log lambda
double log1m_inv_logit(double t);      // log (1 - lambda)

double log_normal_pdf(double x, double mean, double var);

// Conditional mean of member k's outcome at wave j (j >= q+1): dyad intercept
// plus intercept, q own and partner lags, and both members' covariate terms.
// Lags are read from the completed outcomes; a NaN lag means the caller asked
// for a value outside the completed range.
double transition_mean(const DyadPanel& panel, const ModelSpec& spec,
                       const MeasurementParams& mp, int k, int i, int j,
                       double b_i, const CompletedOutcomes& yc);

// Same with the dyad intercept left out (used by the conditional updates).
double transition_mean_no_b(const DyadPanel& panel, const ModelSpec& spec,
                            const MeasurementParams& mp, int k, int i, int j,
                            const CompletedOutcomes& yc);

// Gaussian log likelihood of all transition terms, both members, waves
// q+1 .. horizon(i) per dyad. Baseline waves (j <= q) contribute nothing.
double measurement_loglik(const DyadPanel& panel, const ModelSpec& spec,
                          const MeasurementParams& mp,
                          const RandomEffects& effects,
                          const CompletedOutcomes& yc);

// Hazard of dropping out at wave j given survival to j-1, evaluated from raw
// ingredients: lag outcomes ordered most recent first (the configured lag
// transform is applied here) and the member's hazard covariates.
double hazard(const DropoutParams& dp, int k, double c_i, double y_current,
              std::span<const double> lags, std::span<const double> x);

// Hazard linear predictor at (k, i, j) read from panel + completed outcomes.
double hazard_logit_at(const DyadPanel& panel, const ModelSpec& spec,
                       const DropoutParams& dp, int k, int i, int j,
                       double c_i, const CompletedOutcomes& yc);

double hazard_at(const DyadPanel& panel, const ModelSpec& spec,
                 const DropoutParams& dp, int k, int i, int j, double c_i,
                 const CompletedOutcomes& yc);

// Log probability of dropout time d in {2,...,J+1} given the member's
// per-wave hazards (lambda_2 .. lambda_min(d,J)). d = J+1 means completion.
double dropout_logprob(int d, int n_times, std::span<const double> hazards);

// Log of the member's dropout-time factor: survival through d-1 and, for
// non-completers, the hazard at d (which involves the augmented outcome).
double member_dropout_loglik(const DyadPanel& panel, const ModelSpec& spec,
                             const DropoutParams& dp, int k, int i, double c_i,
                             const CompletedOutcomes& yc);

// Complete-data joint log likelihood: transitions + dropout factors + the
// two sets of dyad random-effect densities.
double joint_loglik(const DyadPanel& panel, const ModelSpec& spec,
                    const MeasurementParams& mp, const DropoutParams& dp,
                    const RandomEffects& effects, const CompletedOutcomes& yc);

}  // namespace dyad
