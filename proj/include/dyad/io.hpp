#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "dyad/diagnostics.hpp"
#include "dyad/replicate.hpp"

namespace dyad {

// Long-format panel CSV. Header: dyad_id,member,time,y followed by covariate
// columns. member is 1 or 2, time runs 1..J, a missing outcome is an empty
// cell, covariate cells must parse as finite reals. Every dyad must carry
// both members at every time.
DyadPanel parse_panel(std::istream& in);
DyadPanel parse_panel_file(const std::filesystem::path& path);
void write_panel(const DyadPanel& panel, std::ostream& out);
void write_panel_file(const DyadPanel& panel, const std::filesystem::path& path);

// JSON run configuration:
// {
//   "model":   {"q":1, "hazard_form":"lag1",
//               "covariates": {"member1": [...], "member2": [...]},
//               "hazard_covariates": {"member1": [...], "member2": [...]}},
//   "priors":  {"a":0.1, "b":0.1, "phi_prior": {"mean":0, "variance":0.01}},
//   "sampler": {"n_iter":11000, "burn_in":1000, "thin":1, "seed":1,
//               "adaptation": {"block_scale":0.2, "scalar_scale":0.8},
//               "fixed_phi": 0.0}
// }
// All sections optional; unknown keys are rejected.
struct RunConfig {
  int q = 1;
  std::string hazard_form = "lag1";  // lag1 | lag1_squared | full_history
  std::array<std::vector<std::string>, 2> covariates;
  std::array<std::vector<std::string>, 2> hazard_covariates;
  SamplerConfig sampler;

  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_file(const std::filesystem::path& path);

  // Resolves column names against the panel and the hazard form into the
  // model description used by the fits.
  ModelSpec model_spec(const DyadPanel& panel) const;
};

void write_draws_csv(const ChainOutput& chain, const std::filesystem::path& path);
void write_loglik_csv(const ChainOutput& chain, const std::filesystem::path& path);
// Stable-keyed summary document (means, sds, central intervals, ESS,
// acceptance rates) plus the metadata in `meta` (flat string map).
void write_summary_json(const ChainOutput& chain,
                        const std::map<std::string, std::string>& meta,
                        const std::filesystem::path& path);

void write_report_csv(const ReplicateReport& report,
                      const std::filesystem::path& path);
void write_report_json(const ReplicateReport& report,
                       const std::filesystem::path& path);

void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::filesystem::path& path);
void write_ig_csv(const std::vector<IgRow>& rows,
                  const std::filesystem::path& path);

}  // namespace dyad
