#pragma once

#include <string>

#include <json.hpp>

#include "seqlab/tape.hpp"

namespace seqlab {

/// Versioned parameter serialization: name -> shape -> row-major values.
/// JSON doubles are written in shortest round-trip form, so a write/read
/// cycle is bit-exact.
nlohmann::json params_to_json(const ParamStore& params);

/// Loads tensors into `params`. Creates missing parameters; existing ones
/// must match shape.
void params_from_json(const nlohmann::json& j, ParamStore& params);

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace seqlab
