#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dyad/model.hpp"
#include "dyad/panel.hpp"
#include "dyad/params.hpp"
#include "dyad/rng.hpp"

namespace dyad {

struct SamplerConfig {
  int n_iter = 11000;  // total iterations, burn-in included
  int burn_in = 1000;
  int thin = 1;
  std::uint64_t seed = 20260101;
  PriorSpec prior;

  // Random-walk proposal tuning. Scales adapt during burn-in only and are
  // frozen afterwards.
  double block_scale0 = 0.2;
  double scalar_scale0 = 0.8;
  double target_block = 0.234;
  double target_scalar = 0.44;
  bool adapt = true;

  // Pin the current-outcome hazard coefficient for both members (excluded
  // from the update) instead of sampling it.
  std::optional<double> fixed_phi;

  bool check_drift = true;

  void validate() const;
};

struct ChainSummary {
  double mean = 0.0, sd = 0.0, q025 = 0.0, q975 = 0.0;
};

struct ChainOutput {
  std::vector<std::string> names;
  int n_retained = 0;
  std::vector<double> draws;  // row-major, n_retained x names.size()
  std::vector<ChainSummary> summaries;
  std::map<std::string, double> acceptance;
  std::vector<double> loglik_trace;  // one entry per iteration

  int col(const std::string& name) const;
  double at(int row, int c) const {
    return draws[static_cast<std::size_t>(row) * names.size() + c];
  }
  std::vector<double> column(const std::string& name) const;
  const ChainSummary& summary(const std::string& name) const;
};

// Thrown when the sampler reaches a non-finite state or the log-likelihood
// trace drifts without stabilizing.
struct SamplerAbort : std::runtime_error {
  SamplerAbort(int iteration_, std::string block_, const std::string& what)
      : std::runtime_error("sampler aborted at iteration " +
                           std::to_string(iteration_) + " in block " + block_ +
                           ": " + what),
        iteration(iteration_),
        block(std::move(block_)) {}
  int iteration;
  std::string block;
};

struct SamplerState {
  MeasurementParams mp;
  DropoutParams dp;
  RandomEffects re;
  CompletedOutcomes yc;
  Rng rng;
};

// Systematic-scan Gibbs sampler for the dyadic selection model. A full cycle
// completes the missing outcomes inside each dyad's horizon, then updates
// the dyad intercepts, variances, regression blocks, hazard blocks, dropout
// intercepts and their variance. The measurement-only mode runs just the
// outcome-model updates over caller-supplied row sets (used by the
// complete-case and available-case fits, which ignore the dropout process).
class GibbsEngine {
 public:
  GibbsEngine(const DyadPanel& panel, const ModelSpec& spec,
              SamplerConfig config);

  // rows[k][i] lists the waves of member k in dyad i entering the Gaussian
  // likelihood. Waves referenced by a row (outcome and its q lags for both
  // members) must be observed.
  static GibbsEngine measurement_only(
      const DyadPanel& panel, const ModelSpec& spec, SamplerConfig config,
      std::array<std::vector<std::vector<int>>, 2> rows);

  SamplerState make_state() const;
  ChainOutput run();

  // One full cycle with the current proposal scales.
  void iterate(SamplerState& s);

  void step_augment(SamplerState& s);
  void step_b(SamplerState& s);
  void step_sigma2(SamplerState& s, int k);
  void step_tau_b2(SamplerState& s);
  void step_eta(SamplerState& s, int k);
  void step_varpi(SamplerState& s, int k);
  void step_c(SamplerState& s);
  void step_tau_c2(SamplerState& s);

  // Closed forms behind the conjugate updates.
  std::pair<double, double> b_conditional(const SamplerState& s, int i) const;
  std::pair<double, double> sigma2_conditional(const SamplerState& s,
                                               int k) const;  // shape, scale
  std::pair<double, double> tau_b2_conditional(const SamplerState& s) const;
  std::pair<double, double> tau_c2_conditional(const SamplerState& s) const;

  struct EtaConditional {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    std::vector<std::string> col_names;
  };
  EtaConditional eta_conditional(const SamplerState& s, int k) const;

  // Log target of the member-k hazard block at the given coefficient values
  // (survival/dropout factors over all dyads plus any priors).
  double varpi_logpost(const SamplerState& s, int k,
                       const std::vector<double>& w) const;
  // Log target of dyad i's dropout intercept.
  double c_logpost(const SamplerState& s, int i, double c_i) const;

  std::vector<std::string> param_names() const;
  std::vector<double> param_values(const SamplerState& s) const;
  double loglik(const SamplerState& s) const;

  bool full_model() const { return full_; }
  const std::vector<std::vector<int>>& rows(int k) const { return rows_[k]; }
  std::map<std::string, double> acceptance_rates() const;

 private:
  GibbsEngine(const DyadPanel& panel, const ModelSpec& spec,
              SamplerConfig config,
              std::array<std::vector<std::vector<int>>, 2> rows);

  struct Slot {
    int member;
    int wave;
    bool hazard_factor;  // wave equals this member's dropout time
  };
  struct BlockAdapt {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov_acc;
    Eigen::MatrixXd chol;  // proposal shape, lower triangular
    double log_scale = 0.0;
    long n_obs = 0;
    long rm_step = 0;
  };
  struct Counter {
    long accepted = 0, proposed = 0;
    double rate() const {
      return proposed > 0 ? static_cast<double>(accepted) / proposed : 1.0;
    }
  };

  void build_rows_full();
  void build_slots();
  void build_hazard_centers();
  std::vector<double> varpi_values(const SamplerState& s, int k) const;
  void set_varpi(SamplerState& s, int k, const std::vector<double>& w) const;
  int varpi_dim(int k) const;
  void adapt_block(int k, const std::vector<double>& w, double alpha);
  void check_finite(const SamplerState& s, const std::string& block) const;

  const DyadPanel* panel_;
  ModelSpec spec_;
  SamplerConfig cfg_;
  bool full_ = true;
  std::array<std::vector<std::vector<int>>, 2> rows_;
  std::vector<Slot> slots_;  // grouped by dyad, draw order
  std::vector<int> slot_begin_;

  std::array<BlockAdapt, 2> varpi_adapt_;
  // Mean of each non-intercept hazard feature over the observed data. The
  // block update proposes in the parameterization whose intercept is the
  // linear predictor at these feature means, which decorrelates the
  // intercept from the slopes.
  std::array<std::vector<double>, 2> hazard_center_;
  double c_log_scale_ = 0.0;
  long c_rm_step_ = 0;
  bool adapting_ = false;
  int iteration_ = 0;

  std::array<Counter, 2> aug_accept_;
  std::array<Counter, 2> varpi_accept_;
  Counter c_accept_;
};

// Posterior-summary helper shared by fits and reports.
ChainSummary summarize(const std::vector<double>& draws);

}  // namespace dyad
