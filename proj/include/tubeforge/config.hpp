#pragma once

#include <filesystem>
#include <string>

#include "tubeforge/spray.hpp"

namespace tubeforge {

// JSON schema:
// { "dimension": n, "ratios": [...],
//   "generator": { "kappa": [k_0..k_{n-1}], "inradius": g, "volume": V } }
// Missing fields, non-finite numbers and kappa length != n raise
// Error(Validation).
SprayConfig parse_spray_config(const std::string& json_text);
SprayConfig load_spray_config(const std::filesystem::path& path);
std::string dump_spray_config(const SprayConfig& config);

}  // namespace tubeforge
