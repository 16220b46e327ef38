// atlas: cross-city neighborhood comparison pipeline.
//
// Subcommands: run (full pipeline), select (trivariate selection for one
// city), moran (Moran's I for one variable), breaks (Jenks breaks on the
// reference city). Exit codes: 0 ok, 1 config error, 2 data error,
// 3 numeric error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "atlas/atlas.hpp"

namespace {

using namespace atlas;

app::CityAnalysis analyze_one(const app::RunConfig& cfg, const std::string& city_name) {
    unsigned threads = app::thread_budget();
    selection::MedianTriple medians;
    app::CityAnalysis ref = app::analyze_reference(cfg, threads, medians);
    if (city_name == cfg.reference_city) return ref;
    for (const auto& c : cfg.cities)
        if (c.name == city_name)
            return app::analyze_city(c, ref.city, medians, cfg.top_fraction, threads);
    throw config_error("city `" + city_name + "` is not in the config");
}

int cmd_run(const std::string& config_path) {
    app::RunConfig cfg = app::load_config(config_path);
    return app::run_pipeline(cfg);
}

int cmd_select(const std::string& config_path, const std::string& city_name) {
    app::RunConfig cfg = app::load_config(config_path);
    app::CityAnalysis a = analyze_one(cfg, city_name);
    std::cout << "geoid,selected_trivariate\n";
    for (const auto& geoid : a.bundle.geoids)
        std::cout << geoid << "," << (a.trivariate.contains(geoid) ? "1" : "0") << "\n";
    std::cerr << city_name << ": " << a.trivariate.n_selected << " of "
              << a.trivariate.n_eligible << " block groups selected ("
              << tables::format_value(100.0 * a.trivariate.share()) << "%)\n";
    return 0;
}

int cmd_moran(const std::string& config_path, const std::string& city_name,
              const std::string& var, const std::string& scheme) {
    app::RunConfig cfg = app::load_config(config_path);
    if (scheme == "queen") cfg.weights_scheme = geo::ContiguityScheme::queen;
    else if (scheme == "rook") cfg.weights_scheme = geo::ContiguityScheme::rook;
    else throw config_error("--scheme must be queen or rook");
    app::CityAnalysis a = analyze_one(cfg, city_name);
    CityDataset sub = app::detail::eligible_subset(a.city, a.bundle);
    auto w = geo::row_standardize(geo::contiguity_weights(sub, cfg.weights_scheme));
    auto vals = selection::variable_values(a.city, a.bundle, var);
    if (!vals) throw data_error("variable " + var + " unavailable for city " + city_name);
    std::cout << city_name << "," << var << "," << scheme << ","
              << tables::format_value(stats::morans_i(*vals, w)) << "\n";
    return 0;
}

int cmd_breaks(const std::string& config_path, const std::string& var, std::size_t k) {
    app::RunConfig cfg = app::load_config(config_path);
    app::CityAnalysis ref = analyze_one(cfg, cfg.reference_city);
    auto vals = selection::variable_values(ref.city, ref.bundle, var);
    if (!vals)
        throw data_error("variable " + var + " unavailable for city " + cfg.reference_city);
    auto breaks = stats::jenks_breaks(*vals, k);
    std::cout << "break\n";
    for (double b : breaks) std::cout << tables::format_value(b) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Cross-city block-group comparison pipeline"};
    cli.require_subcommand(1);

    std::string config_path, city_name, var_name, scheme = "queen";
    std::size_t k = 5;

    auto* run = cli.add_subcommand("run", "Run the full pipeline for every configured city");
    run->add_option("--config", config_path, "JSON config file")->required();

    auto* select = cli.add_subcommand("select", "Print the trivariate selection for one city");
    select->add_option("--config", config_path, "JSON config file")->required();
    select->add_option("--city", city_name, "City name from the config")->required();

    auto* moran = cli.add_subcommand("moran", "Moran's I for one city and variable");
    moran->add_option("--config", config_path, "JSON config file")->required();
    moran->add_option("--city", city_name, "City name from the config")->required();
    moran->add_option("--var", var_name, "Variable name (e.g. SD4DET, PERCVAC)")->required();
    moran->add_option("--scheme", scheme, "Contiguity scheme: queen or rook");

    auto* breaks = cli.add_subcommand("breaks", "Jenks breaks on the reference city");
    breaks->add_option("--config", config_path, "JSON config file")->required();
    breaks->add_option("--var", var_name, "Variable name")->required();
    breaks->add_option("--k", k, "Class count");

    CLI11_PARSE(cli, argc, argv);

    try {
        if (cli.got_subcommand(run)) return cmd_run(config_path);
        if (cli.got_subcommand(select)) return cmd_select(config_path, city_name);
        if (cli.got_subcommand(moran)) return cmd_moran(config_path, city_name, var_name, scheme);
        if (cli.got_subcommand(breaks)) return cmd_breaks(config_path, var_name, k);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return atlas::app::error_code(e);
    }
    return 0;
}
