#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "swarmnav/world.hpp"

namespace swarmnav {

/// Scenario (de)serialization. The text form is canonical: field order and
/// number formatting are fixed, so serializing the same scenario twice gives
/// byte-identical output. Inputs are validated on load; unknown keys are
/// rejected to catch typos early.

std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);

std::string scenarios_to_json(std::span<const Scenario> set);
std::vector<Scenario> scenarios_from_json(const std::string& text);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

std::vector<Scenario> load_scenarios(const std::filesystem::path& path);
void save_scenarios(std::span<const Scenario> set,
                    const std::filesystem::path& path);

}  // namespace swarmnav
