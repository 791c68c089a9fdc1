#pragma once

#include <string>
#include <vector>

#include "copulalab/core.hpp"
#include "json.hpp"

namespace copulalab::registry {

/// Builds a family member from a descriptor {"family": name, "params": {...}}.
/// Nested parameters (e.g. "base") accept either a family name string or a
/// full descriptor object. Unknown families and out-of-range parameters
/// throw std::invalid_argument naming the offending field.
DependenceFunction from_descriptor(const nlohmann::json& descriptor);

/// Convenience: parse a descriptor from text.
DependenceFunction from_descriptor_text(const std::string& text);

/// Names accepted by from_descriptor.
std::vector<std::string> family_names();

}  // namespace copulalab::registry
