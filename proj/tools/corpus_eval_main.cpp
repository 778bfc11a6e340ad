// Evaluates a labeled corpus directory against its manifest and prints a
// per-check detection/false-positive table.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "movescanner/corpus.hpp"

int main(int argc, char** argv) {
    CLI::App app{"labeled corpus evaluator"};
    app.name("corpus-eval");

    std::string corpus_dir;
    std::string manifest_path;
    std::string format = "text";
    app.add_option("corpus_dir", corpus_dir, "corpus directory")->required();
    app.add_option("--manifest", manifest_path,
                   "manifest path (default: corpus_dir/manifest.json)");
    app.add_option("--format", format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 3;
    }

    if (manifest_path.empty()) manifest_path = corpus_dir + "/manifest.json";
    try {
        mvsc::LabelManifest manifest = mvsc::load_manifest(manifest_path);
        mvsc::ScoreTable table = mvsc::evaluate_corpus(
            corpus_dir, manifest, mvsc::ScannerConfig::defaults());
        std::cout << (format == "json" ? mvsc::render_score_json(table)
                                       : mvsc::render_score_text(table));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
