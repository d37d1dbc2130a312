#pragma once

#include <stdexcept>
#include <string>

#include "fbgsole/layout.hpp"
#include "fbgsole/physics.hpp"

namespace fbgsole {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Layout document: template outline, fiber path, spectral plan, sensor
/// array and the six-region partition rectangles.
std::string layout_to_json(const SensorLayout& layout);
SensorLayout layout_from_json(const std::string& text);

std::string scenario_to_json(const GaitScenario& scenario);
GaitScenario scenario_from_json(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace fbgsole
