#pragma once

#include <json.hpp>
#include <string>

namespace helixlab::cli {

using Json = nlohmann::ordered_json;

/// Serializes with insertion-ordered keys and every float at 17 significant
/// digits, so equal inputs give byte-identical text. Non-finite floats become null.
std::string dump(const Json& value, int indent = 2);

}  // namespace helixlab::cli
