#include "movescanner/corpus.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "movescanner/binary.hpp"

namespace mvsc {

LabelManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read manifest " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed manifest " + path + ": " + e.what());
    }
    LabelManifest m;
    for (const auto& jf : j.at("fixtures")) {
        FixtureEntry e;
        e.file = jf.at("file").get<std::string>();
        e.clean = jf.at("clean").get<std::string>();
        if (jf.contains("deps"))
            for (const auto& d : jf.at("deps"))
                e.deps.push_back(d.get<std::string>());
        for (const auto& jl : jf.at("labels")) {
            FixtureLabel l;
            auto c = check_from_name(jl.at("check").get<std::string>());
            if (!c)
                throw std::runtime_error("manifest " + path +
                                         ": unknown check '" +
                                         jl.at("check").get<std::string>() + "'");
            l.check = *c;
            l.function = jl.at("function").get<std::string>();
            l.instruction_index = jl.at("instruction_index").get<int>();
            e.labels.push_back(std::move(l));
        }
        m.fixtures.push_back(std::move(e));
    }
    return m;
}

double ScoreTable::rate(size_t num, size_t den) {
    if (den == 0) return 0.0;
    return std::round(1000.0 * static_cast<double>(num) /
                      static_cast<double>(den)) /
           10.0;
}

namespace {

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read fixture " + path);
    return std::vector<uint8_t>((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
}

// The labeled triple must name an existing instruction in the fixture.
void check_label_targets(const std::string& file, const ModuleDef& m,
                         const std::vector<FixtureLabel>& labels) {
    for (const auto& l : labels) {
        const FunctionDef* f = m.find_function(l.function);
        if (!f)
            throw std::runtime_error("manifest/corpus mismatch: " + file +
                                     " has no function '" + l.function + "'");
        if (l.instruction_index < 0 ||
            static_cast<size_t>(l.instruction_index) >= f->body.size())
            throw std::runtime_error(
                "manifest/corpus mismatch: " + file + "::" + l.function +
                " has no instruction " + std::to_string(l.instruction_index));
    }
}

}  // namespace

ScoreTable evaluate_corpus(const std::string& corpus_dir,
                           const LabelManifest& manifest,
                           const ScannerConfig& cfg) {
    ScoreTable table;
    for (CheckKind c : all_checks()) table.rows[c];

    for (const auto& fx : manifest.fixtures) {
        std::vector<std::string> paths{corpus_dir + "/" + fx.file};
        for (const auto& d : fx.deps) paths.push_back(corpus_dir + "/" + d);

        ModuleDef main_module = parse_binary(read_file(paths[0])).module;
        check_label_targets(fx.file, main_module, fx.labels);

        Report rep = scan(paths, cfg);
        if (rep.load_error_count > 0)
            throw std::runtime_error("fixture " + fx.file + " failed to load");

        for (const auto& l : fx.labels) {
            auto& row = table.rows[l.check];
            ++row.test_cases;
            for (const auto& f : rep.findings) {
                if (f.check != l.check || f.function != l.function) continue;
                if (std::abs(f.instruction_index - l.instruction_index) > 1)
                    continue;
                ++row.detected;
                break;
            }
        }

        std::vector<std::string> clean_paths{corpus_dir + "/" + fx.clean};
        for (const auto& d : fx.deps)
            clean_paths.push_back(corpus_dir + "/" + d);
        Report clean_rep = scan(clean_paths, cfg);
        if (clean_rep.load_error_count > 0)
            throw std::runtime_error("clean fixture " + fx.clean +
                                     " failed to load");
        for (const auto& f : clean_rep.findings)
            if (f.check != CheckKind::Diagnostic)
                ++table.rows[f.check].false_positives;
    }

    for (const auto& [c, row] : table.rows) {
        table.total.test_cases += row.test_cases;
        table.total.detected += row.detected;
        table.total.false_positives += row.false_positives;
    }
    return table;
}

namespace {

std::string fmt_rate(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", r);
    return buf;
}

}  // namespace

std::string render_score_text(const ScoreTable& t) {
    std::ostringstream out;
    out << "check              cases  detected  rate%   fp  fp%\n";
    auto row_line = [&](const std::string& name, const ScoreRow& r) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%-18s %5zu %9zu %6s %4zu %5s\n",
                      name.c_str(), r.test_cases, r.detected,
                      fmt_rate(ScoreTable::rate(r.detected, r.test_cases)).c_str(),
                      r.false_positives,
                      fmt_rate(ScoreTable::rate(r.false_positives,
                                                r.test_cases)).c_str());
        out << buf;
    };
    for (const auto& [c, r] : t.rows) {
        if (r.test_cases == 0 && r.false_positives == 0) continue;  // undefined
        row_line(check_name(c), r);
    }
    row_line("total", t.total);
    return out.str();
}

std::string render_score_json(const ScoreTable& t) {
    using json = nlohmann::ordered_json;
    json j;
    j["checks"] = json::object();
    for (const auto& [c, r] : t.rows) {
        if (r.test_cases == 0 && r.false_positives == 0) continue;
        json row;
        row["test_cases"] = r.test_cases;
        row["detected"] = r.detected;
        row["detection_rate"] = ScoreTable::rate(r.detected, r.test_cases);
        row["false_positives"] = r.false_positives;
        row["fp_rate"] = ScoreTable::rate(r.false_positives, r.test_cases);
        j["checks"][check_name(c)] = std::move(row);
    }
    json total;
    total["test_cases"] = t.total.test_cases;
    total["detected"] = t.total.detected;
    total["detection_rate"] =
        ScoreTable::rate(t.total.detected, t.total.test_cases);
    total["false_positives"] = t.total.false_positives;
    total["fp_rate"] =
        ScoreTable::rate(t.total.false_positives, t.total.test_cases);
    j["total"] = std::move(total);
    return j.dump(2) + "\n";
}

}  // namespace mvsc
