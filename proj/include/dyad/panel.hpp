#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dyad/params.hpp"

namespace dyad {

// Long panel of n dyads, two members each, waves 1..J. Outcomes are subject
// to monotone dropout: member k of dyad i is observed at waves 1..d-1 where
// d = dropout[k][i] in {2,...,J+1} (J+1 means completer). Covariates are
// fully observed at every (member, dyad, wave).
struct DyadPanel {
  int n_dyads = 0;
  int n_times = 0;

  std::vector<std::string> dyad_ids;
  std::vector<std::string> cov_names;

  // Row-major [dyad][wave]; NaN where unobserved.
  std::array<std::vector<double>, 2> y;
  // Row-major [dyad][wave][covariate].
  std::array<std::vector<double>, 2> x;
  std::array<std::vector<int>, 2> dropout;

  int n_covs() const { return static_cast<int>(cov_names.size()); }

  // Waves are 1-based throughout the public interface.
  double y_at(int k, int i, int j) const {
    return y[k][static_cast<std::size_t>(i) * n_times + (j - 1)];
  }
  double& y_at(int k, int i, int j) {
    return y[k][static_cast<std::size_t>(i) * n_times + (j - 1)];
  }
  bool observed(int k, int i, int j) const { return j < dropout[k][i]; }

  std::span<const double> x_at(int k, int i, int j) const {
    const auto p = static_cast<std::size_t>(n_covs());
    return {x[k].data() + (static_cast<std::size_t>(i) * n_times + (j - 1)) * p,
            p};
  }
  double& x_at(int k, int i, int j, int col) {
    const auto p = static_cast<std::size_t>(n_covs());
    return x[k][(static_cast<std::size_t>(i) * n_times + (j - 1)) * p + col];
  }

  // Last wave entering the likelihood for dyad i: the later dropout time,
  // capped at J. The sampler completes outcomes for both members up to here.
  int horizon(int i) const {
    return std::min(std::max(dropout[0][i], dropout[1][i]), n_times);
  }

  static DyadPanel empty(int n_dyads, int n_times,
                         std::vector<std::string> cov_names);

  // Checks structural invariants: dropout times in range, observation
  // pattern monotone and consistent with the dropout times, covariates and
  // baseline outcomes present. Throws std::invalid_argument.
  void validate() const;
};

// Outcome values the model works with: observed entries from the panel plus
// sampled values for the missing slots inside each dyad's horizon. Entries
// beyond the horizon stay NaN and must never be read.
struct CompletedOutcomes {
  int n_times = 0;
  std::array<std::vector<double>, 2> yc;

  double at(int k, int i, int j) const {
    return yc[k][static_cast<std::size_t>(i) * n_times + (j - 1)];
  }
  double& at(int k, int i, int j) {
    return yc[k][static_cast<std::size_t>(i) * n_times + (j - 1)];
  }

  // Observed values verbatim; missing slots NaN.
  static CompletedOutcomes from_observed(const DyadPanel& panel);
  // Observed values, with in-horizon missing slots filled by carrying each
  // member's last observed value forward (sampler initialization).
  static CompletedOutcomes locf(const DyadPanel& panel);
};

}  // namespace dyad
