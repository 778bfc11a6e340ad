#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "movescanner/module.hpp"

namespace mvsc {

// Container magic "MVSC" followed by a version byte.
inline constexpr uint8_t kMagic[4] = {0x4D, 0x56, 0x53, 0x43};
inline constexpr uint8_t kVersion = 0x01;
// On-chain Move bytecode magic; recognized and rejected, never parsed.
inline constexpr uint8_t kChainMagic[4] = {0xA1, 0x1C, 0xEB, 0x0B};

struct LoadResult {
    ModuleDef module;
    std::vector<std::string> warnings;
};

// Canonical encoding: byte-identical output for structurally equal modules.
std::vector<uint8_t> serialize_binary(const ModuleDef& m);

// Fallback ladder: (1) MVSC v1 strict; (2) MVSC v>1 lenient, trailing bytes
// skipped with a warning; (3) chain magic A11CEB0B rejected with a structured
// UnsupportedChain error; (4) valid UTF-8 delegates to parse_text; (5)
// structured parse error carrying the ladder trace. Never crashes on
// arbitrary bytes.
LoadResult parse_binary(const std::vector<uint8_t>& bytes);

}  // namespace mvsc
