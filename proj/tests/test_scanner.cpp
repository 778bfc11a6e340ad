#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "movescanner/binary.hpp"
#include "movescanner/cli.hpp"
#include "movescanner/render.hpp"
#include "movescanner/scanner.hpp"
#include "movescanner/text_parser.hpp"

using namespace mvsc;
namespace fs = std::filesystem;

namespace {

const char* kClean = "module 0x1::clean\nfun f() {\n    ret\n}\n";

std::string fixture(const std::string& name) {
    return std::string(MVSC_SOURCE_DIR) + "/tests/fixtures/" + name;
}

fs::path temp_file(const std::string& name, const std::string& content) {
    fs::path dir = fs::temp_directory_path() / "mvsc_tests";
    fs::create_directories(dir);
    fs::path p = dir / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p;
}

fs::path temp_file(const std::string& name,
                   const std::vector<uint8_t>& bytes) {
    return temp_file(name, std::string(bytes.begin(), bytes.end()));
}

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

ScannerConfig deterministic_defaults() {
    ScannerConfig cfg = ScannerConfig::defaults();
    cfg.deterministic_timing = true;
    return cfg;
}

}  // namespace

TEST_CASE("a clean module produces an empty report") {
    Report r = scan_modules({parse_text(kClean)}, deterministic_defaults());
    CHECK(r.modules_analyzed == 1);
    CHECK(r.findings.empty());
    CHECK(r.load_error_count == 0);
    size_t sum = 0;
    for (const auto& [c, n] : r.per_check_counts) sum += n;
    CHECK(sum == r.findings.size());
}

TEST_CASE("the mixed package trips every check exactly once") {
    Report r = scan({fixture("mixed_app.mvas"), fixture("mixed_vault.mvas")},
                    deterministic_defaults());
    REQUIRE(r.load_error_count == 0);
    CHECK(r.per_check_counts.at(CheckKind::ResourceLeak) == 1);
    CHECK(r.per_check_counts.at(CheckKind::UncheckedReturn) == 1);
    CHECK(r.per_check_counts.at(CheckKind::ArithOverflow) == 1);
    CHECK(r.per_check_counts.at(CheckKind::CrossModule) == 1);
    CHECK(r.per_check_counts.at(CheckKind::CapabilityLeak) == 1);
    CHECK(r.per_check_counts.at(CheckKind::Diagnostic) == 0);
    CHECK(r.findings.size() == 5);
}

TEST_CASE("disabling a check removes exactly that check's findings") {
    std::vector<std::string> paths{fixture("mixed_app.mvas"),
                                   fixture("mixed_vault.mvas")};
    Report full = scan(paths, deterministic_defaults());
    REQUIRE(full.findings.size() == 5);

    for (CheckKind disabled : all_checks()) {
        ScannerConfig cfg = deterministic_defaults();
        cfg.enabled_checks.erase(disabled);
        Report partial = scan(paths, cfg);

        std::set<std::string> full_ids, partial_ids, disabled_ids;
        for (const auto& f : full.findings) {
            full_ids.insert(f.id());
            if (f.check == disabled) disabled_ids.insert(f.id());
        }
        for (const auto& f : partial.findings) partial_ids.insert(f.id());

        std::set<std::string> expected;
        std::set_difference(full_ids.begin(), full_ids.end(),
                            disabled_ids.begin(), disabled_ids.end(),
                            std::inserter(expected, expected.begin()));
        CHECK(partial_ids == expected);
    }
}

TEST_CASE("disabling arith-overflow silences an overflow-only module") {
    std::string src =
        "module 0x1::ovf\n"
        "fun f(a: u64, b: u64): u64 {\n"
        "    copy_loc a\n"
        "    copy_loc b\n"
        "    mul\n"
        "    ret\n"
        "}\n";
    ScannerConfig cfg = deterministic_defaults();
    cfg.enabled_checks.erase(CheckKind::ArithOverflow);
    Report r = scan_modules({parse_text(src)}, cfg);
    CHECK(r.findings.empty());
}

TEST_CASE("render_text shows the header and zero findings") {
    Report r = scan_modules({parse_text(kClean)}, deterministic_defaults());
    std::string text = render_text(r);
    CHECK(text.find("movescanner 0.1.0") != std::string::npos);
    CHECK(text.find("0 findings") != std::string::npos);
}

TEST_CASE("render_text prints one line per finding") {
    std::string src =
        "module 0x1::ovf\n"
        "fun f(a: u64, b: u64): u64 {\n"
        "    copy_loc a\n"
        "    copy_loc b\n"
        "    mul\n"
        "    ret\n"
        "}\n";
    Report r = scan_modules({parse_text(src)}, deterministic_defaults());
    REQUIRE(r.findings.size() == 1);
    std::string text = render_text(r);
    CHECK(text.find("HIGH arith-overflow 0x1::ovf::f @2") !=
          std::string::npos);
    CHECK(render_text(r) == text);  // stable across renders
}

TEST_CASE("render_json emits the fixed key order and round-trips") {
    Report r = scan({fixture("mixed_app.mvas"), fixture("mixed_vault.mvas")},
                    deterministic_defaults());
    std::string js = render_json(r);
    auto j = nlohmann::ordered_json::parse(js);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"tool", "version",
                                           "modules_analyzed", "findings",
                                           "stats", "warnings"});
    REQUIRE(!j["findings"].empty());
    std::vector<std::string> fkeys;
    for (auto it = j["findings"][0].begin(); it != j["findings"][0].end(); ++it)
        fkeys.push_back(it.key());
    // path_blocks appears only on resource-leak findings.
    CHECK(fkeys == std::vector<std::string>{
                       "id", "check", "severity", "confidence", "module",
                       "function", "instruction_index", "message",
                       "path_blocks"});
    // Parse and re-render reproduces the exact bytes.
    CHECK(j.dump(2) + "\n" == js);
}

TEST_CASE("json determinism across runs with timing normalized") {
    std::vector<std::string> paths{fixture("mixed_app.mvas"),
                                   fixture("mixed_vault.mvas")};
    std::string a = render_json(scan(paths, deterministic_defaults()));
    std::string b = render_json(scan(paths, deterministic_defaults()));
    CHECK(a == b);
}

TEST_CASE("empty report still carries the findings array") {
    Report r = scan_modules({parse_text(kClean)}, deterministic_defaults());
    std::string js = render_json(r);
    CHECK(js.find("\"findings\": []") != std::string::npos);
}

TEST_CASE("config validation rejects out-of-range values") {
    ScannerConfig cfg = ScannerConfig::defaults();
    cfg.max_paths = 0;
    CHECK_THROWS_AS(scan_modules({parse_text(kClean)}, cfg),
                    std::invalid_argument);
}

TEST_CASE("cli: no arguments is a usage error with usage text") {
    std::string err;
    CHECK(cli({}, nullptr, &err) == 3);
    CHECK(err.find("usage") != std::string::npos);
}

TEST_CASE("cli: a clean module exits 0 with valid JSON on stdout") {
    fs::path p = temp_file("clean.mvas", kClean);
    std::string out;
    CHECK(cli({p.string(), "--format", "json"}, &out) == 0);
    auto j = nlohmann::json::parse(out);
    CHECK(j["findings"].empty());
    CHECK(j["modules_analyzed"] == 1);
}

TEST_CASE("cli: findings at or above fail-on exit 1") {
    CHECK(cli({fixture("mixed_app.mvas"), fixture("mixed_vault.mvas")}) == 1);
}

TEST_CASE("cli: fail-on filters the exit code by severity") {
    // Only a low-severity dead-store finding.
    fs::path p = temp_file("lowsev.mvas",
                           "module 0x1::m\n"
                           "fun check(x: u64): bool {\n"
                           "    copy_loc x\n"
                           "    ld_u64 100\n"
                           "    lt\n"
                           "    ret\n"
                           "}\n"
                           "fun caller() {\n"
                           "    locals ok: bool\n"
                           "    ld_u64 5\n"
                           "    call 0x1::m::check\n"
                           "    st_loc ok\n"
                           "    ret\n"
                           "}\n");
    CHECK(cli({p.string()}) == 1);
    CHECK(cli({p.string(), "--fail-on", "medium"}) == 0);
    CHECK(cli({p.string(), "--fail-on", "high"}) == 0);
}

TEST_CASE("cli: parse failures exit 2 and dominate findings") {
    fs::path bad = temp_file("bad.mvas", "module not_an_address::m\n");
    CHECK(cli({bad.string()}) == 2);
    // A bad file plus a seeded file still exits 2.
    CHECK(cli({fixture("mixed_app.mvas"), fixture("mixed_vault.mvas"),
               bad.string()}) == 2);
    // Unreadable path.
    CHECK(cli({"/nonexistent/nowhere.mvas"}) == 2);
}

TEST_CASE("cli: chain bytecode input exits 2 with the structured error") {
    fs::path p = temp_file("chain.mvbc",
                           std::vector<uint8_t>{0xA1, 0x1C, 0xEB, 0x0B});
    std::string out;
    int code = cli({p.string()}, &out);
    CHECK(code == 2);
    CHECK(out.find("chain bytecode") != std::string::npos);
}

TEST_CASE("cli: unknown check names are usage errors") {
    fs::path p = temp_file("clean.mvas", kClean);
    CHECK(cli({p.string(), "--checks", "resource-leak,bogus"}) == 3);
    CHECK(cli({p.string(), "--no-check", "bogus"}) == 3);
    CHECK(cli({p.string(), "--format", "yaml"}) == 3);
}

TEST_CASE("cli: --checks narrows and --no-check removes") {
    std::vector<std::string> paths{fixture("mixed_app.mvas"),
                                   fixture("mixed_vault.mvas")};
    std::string out;
    cli({paths[0], paths[1], "--format", "json", "--checks",
         "arith-overflow", "--deterministic"},
        &out);
    auto j = nlohmann::json::parse(out);
    CHECK(j["stats"]["checks"]["arith-overflow"] == 1);
    CHECK(j["stats"]["checks"]["resource-leak"] == 0);

    cli({paths[0], paths[1], "--format", "json", "--no-check",
         "arith-overflow", "--deterministic"},
        &out);
    j = nlohmann::json::parse(out);
    CHECK(j["stats"]["checks"]["arith-overflow"] == 0);
    CHECK(j["stats"]["checks"]["resource-leak"] == 1);
}

TEST_CASE("cli: --output writes the report to a file") {
    fs::path p = temp_file("clean.mvas", kClean);
    fs::path outp = fs::temp_directory_path() / "mvsc_tests" / "report.json";
    std::string out;
    CHECK(cli({p.string(), "--format", "json", "--output", outp.string()},
              &out) == 0);
    CHECK(out.empty());
    std::ifstream in(outp);
    REQUIRE(in.good());
    auto j = nlohmann::json::parse(in);
    CHECK(j["tool"] == "movescanner");
}

TEST_CASE("cli: binary modules load through the ladder") {
    ModuleDef m = parse_text(
        "module 0x1::binmod\n"
        "fun f(a: u64, b: u64): u64 {\n"
        "    copy_loc a\n"
        "    copy_loc b\n"
        "    add\n"
        "    ret\n"
        "}\n");
    fs::path p = temp_file("binmod.mvbc", serialize_binary(m));
    std::string out;
    CHECK(cli({p.string(), "--format", "json", "--deterministic"}, &out) == 1);
    auto j = nlohmann::json::parse(out);
    CHECK(j["stats"]["checks"]["arith-overflow"] == 1);
}

TEST_CASE("ladder warnings surface in the report") {
    ModuleDef m = parse_text(kClean);
    std::vector<uint8_t> bytes = serialize_binary(m);
    bytes[4] = 0x02;
    bytes.push_back(0x00);
    fs::path p = temp_file("v2.mvbc", bytes);
    Report r = scan({p.string()}, deterministic_defaults());
    CHECK(r.modules_analyzed == 1);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("version 2") != std::string::npos);
    std::string text = render_text(r);
    CHECK(text.find("warnings:") != std::string::npos);
}

TEST_CASE("duplicate module ids across files are load errors") {
    fs::path a = temp_file("dup_a.mvas", kClean);
    fs::path b = temp_file("dup_b.mvas", kClean);
    Report r = scan({a.string(), b.string()}, deterministic_defaults());
    CHECK(r.modules_analyzed == 1);
    CHECK(r.load_error_count == 1);
    CHECK(cli({a.string(), b.string()}) == 2);
}
