#include "dyad/panel.hpp"

#include <stdexcept>

namespace dyad {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

DyadPanel DyadPanel::empty(int n_dyads, int n_times,
                           std::vector<std::string> cov_names) {
  DyadPanel p;
  p.n_dyads = n_dyads;
  p.n_times = n_times;
  p.cov_names = std::move(cov_names);
  p.dyad_ids.resize(n_dyads);
  for (int i = 0; i < n_dyads; ++i) p.dyad_ids[i] = "d" + std::to_string(i + 1);
  const auto cells = static_cast<std::size_t>(n_dyads) * n_times;
  for (int k = 0; k < kMembers; ++k) {
    p.y[k].assign(cells, kNaN);
    p.x[k].assign(cells * p.cov_names.size(), 0.0);
    p.dropout[k].assign(n_dyads, n_times + 1);
  }
  return p;
}

void DyadPanel::validate() const {
  if (n_dyads < 0 || n_times < 2)
    throw std::invalid_argument("panel needs at least two waves");
  for (int k = 0; k < kMembers; ++k) {
    if (static_cast<int>(dropout[k].size()) != n_dyads ||
        y[k].size() != static_cast<std::size_t>(n_dyads) * n_times ||
        x[k].size() != static_cast<std::size_t>(n_dyads) * n_times * cov_names.size())
      throw std::invalid_argument("panel storage sizes are inconsistent");
  }
  for (int i = 0; i < n_dyads; ++i) {
    for (int k = 0; k < kMembers; ++k) {
      const int d = dropout[k][i];
      if (d < 2 || d > n_times + 1)
        throw std::invalid_argument("dropout time out of range for dyad " +
                                    dyad_ids[i] + " member " +
                                    std::to_string(k + 1));
      for (int j = 1; j <= n_times; ++j) {
        const bool have = !std::isnan(y_at(k, i, j));
        if (j < d && !have)
          throw std::invalid_argument(
              "outcome missing before dropout (non-monotone pattern) for dyad " +
              dyad_ids[i] + " member " + std::to_string(k + 1) + " time " +
              std::to_string(j));
        if (j >= d && have)
          throw std::invalid_argument(
              "outcome present after dropout for dyad " + dyad_ids[i] +
              " member " + std::to_string(k + 1) + " time " + std::to_string(j));
        for (double v : x_at(k, i, j))
          if (!std::isfinite(v))
            throw std::invalid_argument("covariate missing for dyad " +
                                        dyad_ids[i] + " member " +
                                        std::to_string(k + 1) + " time " +
                                        std::to_string(j));
      }
    }
  }
}

CompletedOutcomes CompletedOutcomes::from_observed(const DyadPanel& panel) {
  CompletedOutcomes c;
  c.n_times = panel.n_times;
  c.yc[0] = panel.y[0];
  c.yc[1] = panel.y[1];
  return c;
}

CompletedOutcomes CompletedOutcomes::locf(const DyadPanel& panel) {
  CompletedOutcomes c = from_observed(panel);
  for (int i = 0; i < panel.n_dyads; ++i) {
    const int horizon = panel.horizon(i);
    for (int k = 0; k < kMembers; ++k) {
      const int d = panel.dropout[k][i];
      for (int j = d; j <= horizon; ++j) c.at(k, i, j) = c.at(k, i, d - 1);
    }
  }
  return c;
}

}  // namespace dyad
