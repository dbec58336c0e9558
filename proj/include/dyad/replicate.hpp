#pragma once

#include <map>
#include <string>
#include <vector>

#include "dyad/fits.hpp"
#include "dyad/simulate.hpp"

namespace dyad {

enum class FitMethod {
  complete_case,
  available_case,
  proposed,              // dropout model shaped like the generating design
  proposed_flexible,     // squared previous outcome in the hazard
  proposed_misspecified  // linear previous outcome in the hazard
};

std::string method_name(FitMethod m);
FitMethod parse_method(const std::string& name);

ChainOutput run_fit(FitMethod method, const SimDesign& design,
                    const DyadPanel& panel, const SamplerConfig& config);

struct ReplicateCell {
  double bias = 0.0;
  double se = 0.0;        // spread of the point estimates across replicates
  double coverage = 0.0;  // fraction of 95% intervals containing the truth
};

struct ReplicateReport {
  std::vector<std::string> params;   // the eight reported coefficients
  std::vector<std::string> methods;
  std::map<std::string, std::map<std::string, ReplicateCell>> cells;

  // dropout behaviour of the generated panels, averaged over replicates
  std::map<int, double> dyad_dropout_by_wave;
  std::array<std::map<int, double>, 2> member_dropout_by_wave;

  int n_replicates = 0;
  int n_failed = 0;
};

// Generates `design.replicates` datasets, runs each requested method, and
// scores bias, spread and interval coverage against the design truth.
// Replicate seeds are split from design.seed by index, so the result is
// independent of thread count and execution order. A replicate whose sampler
// aborts is excluded and counted in n_failed.
ReplicateReport run_replicates(const SimDesign& design,
                               const std::vector<FitMethod>& methods,
                               const SamplerConfig& base_config,
                               int n_threads = 0);

}  // namespace dyad
