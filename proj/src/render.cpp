#include "movescanner/render.hpp"

#include <sstream>

#include <json.hpp>

namespace mvsc {

std::string render_text(const Report& r) {
    std::ostringstream out;
    out << r.tool << " " << r.version << "\n";
    out << "modules analyzed: " << r.modules_analyzed << "\n";
    out << r.findings.size() << " finding"
        << (r.findings.size() == 1 ? "" : "s") << "\n";
    if (!r.findings.empty()) {
        out << "\n";
        for (const auto& f : r.findings) {
            std::string sev = severity_name(f.severity);
            for (auto& c : sev) c = static_cast<char>(toupper(c));
            out << sev << " " << check_name(f.check) << " " << f.module.str()
                << "::" << f.function << " @" << f.instruction_index
                << " — " << f.message << "\n";
        }
    }
    out << "\n";
    out << "per-check counts:\n";
    for (const auto& [check, count] : r.per_check_counts)
        out << "  " << check_name(check) << ": " << count << "\n";
    if (!r.warnings.empty()) {
        out << "\nwarnings:\n";
        for (const auto& w : r.warnings) out << "  " << w << "\n";
    }
    return out.str();
}

std::string render_json(const Report& r) {
    using json = nlohmann::ordered_json;
    json j;
    j["tool"] = r.tool;
    j["version"] = r.version;
    j["modules_analyzed"] = r.modules_analyzed;
    j["findings"] = json::array();
    for (const auto& f : r.findings) {
        json jf;
        jf["id"] = f.id();
        jf["check"] = check_name(f.check);
        jf["severity"] = severity_name(f.severity);
        jf["confidence"] = confidence_name(f.confidence);
        jf["module"] = f.module.str();
        jf["function"] = f.function;
        jf["instruction_index"] = f.instruction_index;
        jf["message"] = f.message;
        if (f.witness_path) jf["path_blocks"] = *f.witness_path;
        j["findings"].push_back(std::move(jf));
    }
    json checks;
    for (const auto& [check, count] : r.per_check_counts)
        checks[check_name(check)] = count;
    j["stats"] = json::object();
    j["stats"]["checks"] = std::move(checks);
    json ms = json::object();
    for (const auto& [mod, t] : r.per_module_ms) ms[mod] = t;
    j["stats"]["modules_ms"] = std::move(ms);
    j["warnings"] = r.warnings;
    return j.dump(2) + "\n";
}

}  // namespace mvsc
