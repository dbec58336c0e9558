#include "dyad/fits.hpp"

#include <stdexcept>

namespace dyad {

std::array<std::vector<std::vector<int>>, 2> available_case_rows(
    const DyadPanel& panel, int order) {
  std::array<std::vector<std::vector<int>>, 2> rows;
  for (int k = 0; k < kMembers; ++k) {
    rows[k].assign(panel.n_dyads, {});
    for (int i = 0; i < panel.n_dyads; ++i)
      for (int j = order + 1; j <= panel.n_times; ++j) {
        if (!panel.observed(k, i, j)) break;
        bool lags_ok = true;
        for (int l = 1; l <= order && lags_ok; ++l)
          lags_ok = panel.observed(k, i, j - l) &&
                    panel.observed(other(k), i, j - l);
        if (lags_ok) rows[k][i].push_back(j);
      }
  }
  return rows;
}

DyadPanel completers_subpanel(const DyadPanel& panel) {
  std::vector<int> keep;
  for (int i = 0; i < panel.n_dyads; ++i)
    if (panel.dropout[0][i] == panel.n_times + 1 &&
        panel.dropout[1][i] == panel.n_times + 1)
      keep.push_back(i);
  DyadPanel sub = DyadPanel::empty(static_cast<int>(keep.size()),
                                   panel.n_times, panel.cov_names);
  const auto p = panel.cov_names.size();
  for (std::size_t ii = 0; ii < keep.size(); ++ii) {
    const int i = keep[ii];
    sub.dyad_ids[ii] = panel.dyad_ids[i];
    for (int k = 0; k < kMembers; ++k) {
      sub.dropout[k][ii] = panel.dropout[k][i];
      for (int j = 1; j <= panel.n_times; ++j) {
        sub.y_at(k, static_cast<int>(ii), j) = panel.y_at(k, i, j);
        const auto x = panel.x_at(k, i, j);
        for (std::size_t c = 0; c < p; ++c)
          sub.x_at(k, static_cast<int>(ii), j, static_cast<int>(c)) = x[c];
      }
    }
  }
  return sub;
}

ChainOutput fit_complete_case(const DyadPanel& panel, const ModelSpec& spec,
                              const SamplerConfig& config) {
  DyadPanel sub = completers_subpanel(panel);
  if (sub.n_dyads == 0)
    throw std::runtime_error("complete-case analysis: no completer dyads");
  std::array<std::vector<std::vector<int>>, 2> rows;
  for (int k = 0; k < kMembers; ++k) {
    rows[k].assign(sub.n_dyads, {});
    for (int i = 0; i < sub.n_dyads; ++i)
      for (int j = spec.order + 1; j <= sub.n_times; ++j)
        rows[k][i].push_back(j);
  }
  GibbsEngine engine =
      GibbsEngine::measurement_only(sub, spec, config, std::move(rows));
  return engine.run();
}

ChainOutput fit_available_case(const DyadPanel& panel, const ModelSpec& spec,
                               const SamplerConfig& config) {
  GibbsEngine engine = GibbsEngine::measurement_only(
      panel, spec, config, available_case_rows(panel, spec.order));
  return engine.run();
}

ChainOutput fit_proposed(const DyadPanel& panel, const ModelSpec& spec,
                         const SamplerConfig& config) {
  GibbsEngine engine(panel, spec, config);
  return engine.run();
}

}  // namespace dyad
