#include "tubeforge/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tubeforge/errors.hpp"

namespace tubeforge {

using nlohmann::json;

namespace {

[[noreturn]] void reject(const std::string& what) {
  throw Error(ErrorKind::Validation, "spray config: " + what);
}

const json& require(const json& node, const char* key) {
  if (!node.is_object() || !node.contains(key)) reject(std::string("missing field \"") + key + "\"");
  return node.at(key);
}

double require_number(const json& value, const std::string& name) {
  if (!value.is_number()) reject("field \"" + name + "\" must be a number");
  const double x = value.get<double>();
  if (!std::isfinite(x)) reject("field \"" + name + "\" is not finite");
  return x;
}

std::vector<double> require_numbers(const json& value, const std::string& name) {
  if (!value.is_array()) reject("field \"" + name + "\" must be an array");
  std::vector<double> out;
  out.reserve(value.size());
  for (std::size_t k = 0; k < value.size(); ++k) {
    out.push_back(require_number(value[k], name + "[" + std::to_string(k) + "]"));
  }
  return out;
}

}  // namespace

SprayConfig parse_spray_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    reject(std::string("invalid JSON: ") + e.what());
  }

  SprayConfig config;
  const json& dim = require(doc, "dimension");
  if (!dim.is_number_integer()) reject("field \"dimension\" must be an integer");
  config.dimension = dim.get<int>();
  if (config.dimension < 1) reject("field \"dimension\" must be positive");

  config.ratios = require_numbers(require(doc, "ratios"), "ratios");
  const json& gen = require(doc, "generator");
  config.kappa = require_numbers(require(gen, "kappa"), "generator.kappa");
  config.inradius = require_number(require(gen, "inradius"), "generator.inradius");
  config.volume = require_number(require(gen, "volume"), "generator.volume");

  if (config.kappa.size() != static_cast<std::size_t>(config.dimension)) {
    reject("kappa has " + std::to_string(config.kappa.size()) + " entries but dimension is " +
           std::to_string(config.dimension));
  }
  return config;
}

SprayConfig load_spray_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) reject("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_spray_config(text.str());
}

std::string dump_spray_config(const SprayConfig& config) {
  json doc = {{"dimension", config.dimension},
              {"ratios", config.ratios},
              {"generator",
               {{"kappa", config.kappa}, {"inradius", config.inradius}, {"volume", config.volume}}}};
  return doc.dump(2);
}

}  // namespace tubeforge
