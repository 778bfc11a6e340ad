#pragma once

#include <string>

#include "movescanner/scanner.hpp"

namespace mvsc {

// One line per finding: "SEVERITY check module::function @index — message",
// then a per-check summary table.
std::string render_text(const Report& r);

// UTF-8 JSON with fixed key order: tool, version, modules_analyzed, findings
// (id, check, severity, confidence, module, function, instruction_index,
// message, optional path_blocks), stats, warnings. Byte-identical for equal
// reports; re-rendering parsed output reproduces the bytes.
std::string render_json(const Report& r);

}  // namespace mvsc
