// Command-line runner: darkbeam <scenario> --config <path> --out <dir> [--set key=value]...

#include <darkbeam/scenario.hpp>

#include <iostream>

#include <CLI11.hpp>

int main(int argc, char** argv)
{
    CLI::App app{"Continuous light-to-atom-beam state transfer scenarios"};
    std::string scenario;
    std::string config;
    std::string out_dir;
    std::vector<std::string> overrides;

    app.add_option("scenario", scenario,
                   "transfer | validate | sweep | entangle | feasibility")
        ->required();
    app.add_option("--config", config, "JSON configuration file")->required();
    app.add_option("--out", out_dir, "output directory")->required();
    app.add_option("--set", overrides, "override a config value, dotted.key=value")
        ->take_all()
        ->expected(1)
        ->allow_extra_args(false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return darkbeam::exit_config_error;
    }
    return darkbeam::run_command(scenario, config, out_dir, overrides, std::cerr);
}
