#pragma once

#include "dyad/gibbs.hpp"

namespace dyad {

// Waves of member k in dyad i usable by an ignorable-likelihood fit: the
// outcome and every lag it needs (own and partner) must be observed.
std::array<std::vector<std::vector<int>>, 2> available_case_rows(
    const DyadPanel& panel, int order);

// Outcome-model fit on the dyads whose members both completed follow-up.
// Throws std::runtime_error when there are no completers.
ChainOutput fit_complete_case(const DyadPanel& panel, const ModelSpec& spec,
                              const SamplerConfig& config);

// Outcome-model fit on every observed transition with complete lags.
ChainOutput fit_available_case(const DyadPanel& panel, const ModelSpec& spec,
                               const SamplerConfig& config);

// Full selection-model fit (augmentation + dropout model).
ChainOutput fit_proposed(const DyadPanel& panel, const ModelSpec& spec,
                         const SamplerConfig& config);

// Dyads with both members observed through the last wave.
DyadPanel completers_subpanel(const DyadPanel& panel);

}  // namespace dyad
