#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "conefrac/commands.hpp"
#include "conefrac/error.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Fractional calculus of cone Laplacians and the fractional porous medium equation"};
    app.require_subcommand(1);

    std::optional<std::string> config_path;
    std::optional<std::string> out_dir;
    std::optional<long long> seed;
    std::optional<int> nodes;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "key/value config file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "random seed")->check(CLI::NonNegativeNumber);
    app.add_option("--nodes", nodes, "quadrature / contour node override")->check(CLI::PositiveNumber);
    app.add_option("--set", overrides, "override a config entry, key=value (repeatable)");

    for (const std::string& name : conefrac::command_names) app.add_subcommand(name)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::vector<std::string> all = overrides;
        if (out_dir) all.push_back("output_dir=" + *out_dir);
        if (seed) all.push_back("seed=" + std::to_string(*seed));
        if (nodes) all.push_back("nodes=" + std::to_string(*nodes));
        const conefrac::RunConfig cfg = conefrac::RunConfig::load(config_path, all);
        conefrac::dispatch(app.get_subcommands().front()->get_name(), cfg, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return conefrac::exit_code_for(e);
    }
    return 0;
}
