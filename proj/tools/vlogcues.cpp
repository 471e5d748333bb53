// Command-line front end: scan, extract, words, report.

#include "vlogcues/config.hpp"
#include "vlogcues/errors.hpp"
#include "vlogcues/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int run(const std::string& command, const vlogcues::PipelineConfig& config) {
    using namespace vlogcues;
    if (command == "scan") {
        const auto r = cmd_scan(config);
        std::cout << "input " << r.input << "\n";
        for (const auto& s : r.stages) {
            std::cout << s.name << " " << s.kept << " (dropped " << s.dropped_ids.size() << ")\n";
        }
    } else if (command == "extract") {
        const auto r = cmd_extract(config);
        std::cout << "extracted " << r.rows.size() << ", skipped " << r.skips.size() << "\n";
        for (const auto& s : r.skips) {
            std::cerr << "skip " << s.id << ": " << s.reason << "\n";
        }
    } else if (command == "words") {
        const auto r = cmd_words(config);
        std::cout << "bins " << r.bins.bins.size() << ", rejected " << r.bins.rejects.size() << "\n";
    } else if (command == "report") {
        const auto r = cmd_report(config);
        std::cout << "bins " << r.alignment.n_bins << ", matches " << r.alignment.matches.size()
                  << "\n";
        for (const auto& d : r.diagnostics) {
            std::cerr << d << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Speech-cue and word-frequency trajectories for timestamped vlog corpora"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir;
    std::size_t workers = 0;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--workers", workers, "parallel extraction workers")->check(CLI::PositiveNumber);
    app.add_option("--set", overrides, "override a config key, e.g. --set threshold=0.7");

    app.add_subcommand("scan", "dedupe and filter metadata, write stage counts");
    app.add_subcommand("extract", "diarize recordings and write 18 descriptors each");
    app.add_subcommand("words", "per-bin word tables and the target-word trajectory");
    app.add_subcommand("report", "weekly tables, event totals, peaks and alignments");

    CLI11_PARSE(app, argc, argv);

    vlogcues::PipelineConfig config;
    try {
        if (!config_path.empty()) {
            config = vlogcues::load_config(config_path);
        }
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw vlogcues::InvalidInput("--set expects key=value, got '" + kv + "'");
            }
            config.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (!out_dir.empty()) {
            config.out_dir = out_dir;
        }
        if (workers > 0) {
            config.workers = workers;
        }
        return run(app.get_subcommands().front()->get_name(), config);
    } catch (const vlogcues::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
