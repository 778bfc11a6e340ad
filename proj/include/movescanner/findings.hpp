#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "movescanner/module.hpp"

namespace mvsc {

enum class CheckKind : uint8_t {
    ResourceLeak,
    UncheckedReturn,
    ArithOverflow,
    CrossModule,
    CapabilityLeak,
    Diagnostic,
};

const char* check_name(CheckKind c);
// The five configurable checks; "diagnostic" is not configurable.
std::optional<CheckKind> check_from_name(const std::string& name);
const std::vector<CheckKind>& all_checks();

enum class Severity : uint8_t { Info = 0, Low, Medium, High };
enum class Confidence : uint8_t { Low = 0, Medium, High };

const char* severity_name(Severity s);
std::optional<Severity> severity_from_name(const std::string& name);
const char* confidence_name(Confidence c);

inline Confidence lower(Confidence c) {
    return c == Confidence::Low ? Confidence::Low
                                : static_cast<Confidence>(
                                      static_cast<uint8_t>(c) - 1);
}

uint64_t fnv1a64(std::string_view data);

struct Finding {
    CheckKind check = CheckKind::Diagnostic;
    Severity severity = Severity::Info;
    ModuleId module;
    std::string function;
    int instruction_index = 0;
    std::string message;
    Confidence confidence = Confidence::High;
    std::optional<std::vector<int>> witness_path;  // resource-leak only

    // Stable hash of "check|module|function|instruction_index", 16 hex chars.
    std::string id() const;
};

// Report order: (module, function, instruction_index, check name).
bool finding_less(const Finding& a, const Finding& b);
void sort_findings(std::vector<Finding>& v);

}  // namespace mvsc
