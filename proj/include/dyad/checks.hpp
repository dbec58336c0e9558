#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dyad/diagnostics.hpp"

namespace dyad {

// Cumulative distribution of an unnormalized density tabulated by the
// trapezoid rule on [lo, hi]. Used as an independent target for the
// Metropolis kernels.
class GridCdf {
 public:
  GridCdf(const std::function<double(double)>& log_density, double lo,
          double hi, int n_points = 4001);
  double operator()(double x) const;

 private:
  double lo_, hi_, step_;
  std::vector<double> cdf_;
};

// Kolmogorov-Smirnov distance between a sample and a reference CDF.
double ks_distance(std::vector<double> sample,
                   const std::function<double(double)>& cdf);

double normal_cdf(double x, double mean, double sd);
// Inverse-gamma CDF with shape a and scale b.
double inv_gamma_cdf(double x, double a, double b);

// ---------------------------------------------------------------------------
// Shipped sampler-correctness suite: conjugate conditionals against their
// closed forms, Metropolis kernels against quadrature targets, the
// joint-distribution test, and the reduction to an ignorable fit when the
// current-outcome hazard coefficients are pinned at zero.

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckLine> lines;
  bool all_pass() const;
};

struct CheckOptions {
  int ks_draws = 100000;
  int gir_samples = 10000;
  std::uint64_t seed = 20260101;
  double ks_tol = 0.02;
  double moment_tol = 0.01;
  double gir_threshold = 4.0;
  bool include_phi_reduction = true;
  int n_threads = 0;
};

CheckReport run_sampler_checks(const CheckOptions& opts);

// Individual pieces (also exercised directly by the test suites).
std::vector<CheckLine> check_conjugate_conditionals(const CheckOptions& opts);
std::vector<CheckLine> check_mh_kernels(const CheckOptions& opts);
CheckLine check_getting_it_right(const CheckOptions& opts);
CheckLine check_phi_zero_reduction(const CheckOptions& opts);

// A panel whose dropout is simultaneous within each dyad and driven only by
// observed values (both members leave together, hazard on the squared
// previous outcome). Used by the ignorable-reduction check.
DyadPanel make_mar_panel(int n_dyads, std::uint64_t seed);

}  // namespace dyad
