#pragma once

#include <json.hpp>

#include "foodvol/error.hpp"

namespace foodvol {

// Checks `value` against the subset of JSON Schema used by the shipped
// schemas: type, properties, required, items, enum, minimum, minItems,
// maxItems. Throws ValidationError naming the offending path.
void validate_schema(const nlohmann::json& schema, const nlohmann::json& value);

}  // namespace foodvol
