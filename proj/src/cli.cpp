#include "movescanner/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "movescanner/render.hpp"
#include "movescanner/scanner.hpp"

namespace mvsc {

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"static security scanner for Move-style bytecode modules"};
    app.name("movescanner");

    std::vector<std::string> paths;
    std::string format = "text";
    std::string output;
    std::string checks_list;
    std::vector<std::string> no_checks;
    size_t max_paths = 4096;
    size_t back_edge_budget = 1;
    std::string fail_on = "low";
    bool deterministic = false;

    app.add_option("path", paths, "module files (.mvas text or .mvbc binary)")
        ->required();
    app.add_option("--format", format, "report format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    app.add_option("--output", output, "write the report to FILE");
    app.add_option("--checks", checks_list,
                   "comma-separated list of checks to enable");
    app.add_option("--no-check", no_checks, "disable one check (repeatable)");
    app.add_option("--max-paths", max_paths, "path enumeration cap")
        ->check(CLI::PositiveNumber);
    app.add_option("--back-edge-budget", back_edge_budget,
                   "times each back edge may repeat per path");
    app.add_option("--fail-on", fail_on,
                   "minimum severity that makes the exit code nonzero")
        ->check(CLI::IsMember({"info", "low", "medium", "high"}));
    app.add_flag("--deterministic", deterministic)->group("");  // test hook

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n\n" << app.help();
        return 3;
    }

    ScannerConfig cfg = ScannerConfig::defaults();
    cfg.max_paths = max_paths;
    cfg.back_edge_budget = back_edge_budget;
    cfg.fail_on = *severity_from_name(fail_on);
    cfg.deterministic_timing = deterministic;

    if (!checks_list.empty()) {
        cfg.enabled_checks.clear();
        for (const auto& name : split_list(checks_list)) {
            auto c = check_from_name(name);
            if (!c) {
                err << "usage error: unknown check '" << name << "'\n";
                return 3;
            }
            cfg.enabled_checks.insert(*c);
        }
    }
    for (const auto& name : no_checks) {
        auto c = check_from_name(name);
        if (!c) {
            err << "usage error: unknown check '" << name << "'\n";
            return 3;
        }
        cfg.enabled_checks.erase(*c);
    }

    Report rep = scan(paths, cfg);
    std::string rendered = format == "json" ? render_json(rep)
                                            : render_text(rep);
    if (!output.empty()) {
        std::ofstream f(output, std::ios::binary);
        if (!f) {
            err << "cannot write output file " << output << "\n";
            return 2;
        }
        f << rendered;
    } else {
        out << rendered;
    }

    if (rep.load_error_count > 0) return 2;
    return rep.any_at_or_above(cfg.fail_on) ? 1 : 0;
}

}  // namespace mvsc
