#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "dyad/panel.hpp"
#include "dyad/params.hpp"
#include "dyad/rng.hpp"

namespace dyad {

enum class SimVariant { A, B };

// Synthetic-study design: baseline outcome distributions, data-generating
// coefficients for the outcome and dropout processes, and study shape.
struct SimDesign {
  SimVariant variant = SimVariant::A;
  int n_dyads = 200;
  int n_times = 3;
  int replicates = 100;
  std::uint64_t seed = 20260101;

  std::array<double, 2> baseline_mean{5.0, 7.0};
  std::array<double, 2> baseline_sd{1.0, 1.0};
  MeasurementParams truth;
  DropoutParams dropout;

  // Study A: selection on the current (possibly unobserved) outcome. The
  // hazard keeps the linear current+previous-outcome form; its intercept is
  // calibrated so that about 24% of dyads lose a member at wave 2.
  static SimDesign variant_a();
  // Study B: dropout depends quadratically on the previous observed outcome
  // only, so the missingness is ignorable given the observed data. About 37%
  // of dyads lose a member at wave 2.
  static SimDesign variant_b();

  ModelSpec model_spec() const;  // covariate roles used when fitting

  // True values of the eight reported coefficients keyed by parameter name.
  std::map<std::string, double> truth_by_name() const;
};

// Complete latent trajectories kept alongside a generated panel, including
// the dyad effects the trajectories were generated under.
struct GeneratedTruth {
  CompletedOutcomes full;  // all waves, no deletion
  std::array<std::vector<int>, 2> dropout;
  std::vector<double> b;
  std::vector<double> c;
};

// Draws baselines, runs the transition process forward, applies the discrete
// hazard wave by wave (baseline is never missing), and blanks outcomes from
// each member's dropout wave on.
DyadPanel generate_dataset(const SimDesign& design, std::uint64_t replicate_seed,
                           GeneratedTruth* audit = nullptr);

// Fraction of dyads whose first member loss happens at the given wave.
double dyad_dropout_fraction(const DyadPanel& panel, int wave);

}  // namespace dyad
