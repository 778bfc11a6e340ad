#pragma once

#include <string>

#include "movescanner/module.hpp"

namespace mvsc {

// Parses one module in the line-oriented assembly format (see
// docs/format.md). Throws ParseError on syntax or validation failures.
ModuleDef parse_text(const std::string& source);

}  // namespace mvsc
