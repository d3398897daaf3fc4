#pragma once

#include <map>
#include <memory>
#include <string_view>

#include "lord/model.hpp"
#include "lord/strategy.hpp"

namespace lord {

enum class ModelFamily { osnn, linear, evm, cevm, wsvm, pisvm };

const char* to_string(ModelFamily family);
ModelFamily family_from_string(std::string_view name);

// Flat hyperparameter assignment; unknown keys are rejected by fit_model so
// config typos fail loudly.
using Params = std::map<std::string, double>;

bool family_supports(ModelFamily family, StrategyKind kind);

// Trains one model with the family's defaults overridden by params. The
// seed only matters for families with stochastic fits (the linear head).
std::unique_ptr<OpenSetModel> fit_model(ModelFamily family, const StrategyView& view, const Params& params,
                                        std::uint64_t seed);

}  // namespace lord
