#pragma once

#include <json.hpp>

#include "clinrel/learners/ova.hpp"

namespace clinrel::learn {

nlohmann::ordered_json hyperparameters_to_json(const Hyperparameters& hp);
/// Missing keys keep their defaults; unknown keys are rejected.
Hyperparameters hyperparameters_from_json(const nlohmann::ordered_json& j);

/// Doubles are written with round-trip precision, so a reloaded model
/// reproduces decision values bit for bit.
nlohmann::ordered_json ova_to_json(const OvaModel& m);
/// Throws std::runtime_error on malformed input.
OvaModel ova_from_json(const nlohmann::ordered_json& j);

}  // namespace clinrel::learn
