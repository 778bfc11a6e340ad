#include "movescanner/findings.hpp"

#include <algorithm>

namespace mvsc {

const char* check_name(CheckKind c) {
    switch (c) {
        case CheckKind::ResourceLeak: return "resource-leak";
        case CheckKind::UncheckedReturn: return "unchecked-return";
        case CheckKind::ArithOverflow: return "arith-overflow";
        case CheckKind::CrossModule: return "cross-module";
        case CheckKind::CapabilityLeak: return "capability-leak";
        case CheckKind::Diagnostic: return "diagnostic";
    }
    return "?";
}

const std::vector<CheckKind>& all_checks() {
    static const std::vector<CheckKind> kChecks{
        CheckKind::ResourceLeak, CheckKind::UncheckedReturn,
        CheckKind::ArithOverflow, CheckKind::CrossModule,
        CheckKind::CapabilityLeak};
    return kChecks;
}

std::optional<CheckKind> check_from_name(const std::string& name) {
    for (CheckKind c : all_checks())
        if (name == check_name(c)) return c;
    return std::nullopt;
}

const char* severity_name(Severity s) {
    switch (s) {
        case Severity::High: return "high";
        case Severity::Medium: return "medium";
        case Severity::Low: return "low";
        case Severity::Info: return "info";
    }
    return "?";
}

std::optional<Severity> severity_from_name(const std::string& name) {
    for (Severity s : {Severity::Info, Severity::Low, Severity::Medium,
                       Severity::High})
        if (name == severity_name(s)) return s;
    return std::nullopt;
}

const char* confidence_name(Confidence c) {
    switch (c) {
        case Confidence::High: return "high";
        case Confidence::Medium: return "medium";
        case Confidence::Low: return "low";
    }
    return "?";
}

uint64_t fnv1a64(std::string_view data) {
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string Finding::id() const {
    std::string key = std::string(check_name(check)) + "|" + module.str() +
                      "|" + function + "|" + std::to_string(instruction_index);
    uint64_t h = fnv1a64(key);
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

bool finding_less(const Finding& a, const Finding& b) {
    if (a.module != b.module) return a.module < b.module;
    if (a.function != b.function) return a.function < b.function;
    if (a.instruction_index != b.instruction_index)
        return a.instruction_index < b.instruction_index;
    return std::string_view(check_name(a.check)) < check_name(b.check);
}

void sort_findings(std::vector<Finding>& v) {
    std::stable_sort(v.begin(), v.end(), finding_less);
}

}  // namespace mvsc
