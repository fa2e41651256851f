#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zice/app/commands.hpp"
#include "zice/app/config.hpp"
#include "zice/errors.hpp"

namespace {

std::vector<std::string> split_formats(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    using namespace zice;
    using namespace zice::app;

    CLI::App cli{"Measurement-corrected decay of a two-level atom under pulsed measurement"};
    cli.name("zeno-ice");
    std::string command_name;
    std::string config_path;
    std::string preset;
    std::string out_dir;
    std::string formats;
    unsigned threads = 0;
    bool list_presets = false;
    cli.add_option("command", command_name, "trace | sweep | evolve | validate | baseline");
    cli.add_option("--config", config_path, "JSON run configuration");
    cli.add_option("--preset", preset, "named figure preset (merged under --config)");
    cli.add_option("--out", out_dir, "output directory (overrides output.path)");
    cli.add_option("--format", formats, "comma-separated subset of csv,json,svg");
    cli.add_option("--threads", threads, "worker threads for sweeps")->check(CLI::Range(1u, 1024u));
    cli.add_flag("--list-presets", list_presets, "print the shipped preset names");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (list_presets) {
            for (const auto& name : preset_names()) std::cout << name << '\n';
            return kExitOk;
        }
        if (command_name.empty()) {
            throw ConfigError("missing command (trace, sweep, evolve, validate, baseline)");
        }
        const Command command = parse_command(command_name);
        if (config_path.empty() && preset.empty()) {
            throw ConfigError("give --config, --preset or both");
        }
        nlohmann::json doc = nlohmann::json::object();
        if (!preset.empty()) {
            doc = load_preset(preset);
            if (!doc.contains("name")) doc["name"] = preset;
        }
        if (!config_path.empty()) {
            doc.merge_patch(load_json(config_path));
        }
        if (!out_dir.empty()) doc["output"]["path"] = out_dir;
        if (!formats.empty()) doc["output"]["formats"] = split_formats(formats);
        if (threads > 0) doc["threads"] = threads;

        const RunConfig config = parse_config(doc);
        const CommandOutcome outcome = run_command(command, config);
        for (const auto& line : outcome.messages) std::cerr << line << '\n';
        for (const auto& file : outcome.files) std::cout << file.string() << '\n';
        return outcome.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}
