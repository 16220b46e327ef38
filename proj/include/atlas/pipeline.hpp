#ifndef ATLAS_PIPELINE_HPP
#define ATLAS_PIPELINE_HPP

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "atlas/choropleth.hpp"
#include "atlas/errors.hpp"
#include "atlas/indices.hpp"
#include "atlas/ingest.hpp"
#include "atlas/selection.hpp"
#include "atlas/spatial_join.hpp"
#include "atlas/stats.hpp"
#include "atlas/tables.hpp"
#include "atlas/weights.hpp"

namespace atlas::app {

struct CityInputs {
    std::string name;
    std::string attr_path;
    std::string geom_path;
    std::string crimes_path;
};

struct RunConfig {
    std::vector<CityInputs> cities;
    std::string reference_city;
    geo::ContiguityScheme weights_scheme = geo::ContiguityScheme::queen;
    std::size_t class_count = 5;
    double top_fraction = 0.10;
    bool per_city_breaks = false;
    std::string output_dir;
};

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("invalid JSON config: " + std::string(e.what()));
    }

    namespace fs = std::filesystem;
    fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        fs::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };

    RunConfig cfg;
    try {
        for (const auto& c : doc.at("cities")) {
            CityInputs ci;
            ci.name = c.at("name").get<std::string>();
            ci.attr_path = resolve(c.at("attributes").get<std::string>());
            ci.geom_path = resolve(c.at("geometry").get<std::string>());
            ci.crimes_path = resolve(c.at("crimes").get<std::string>());
            cfg.cities.push_back(std::move(ci));
        }
        cfg.reference_city = doc.at("reference_city").get<std::string>();
        cfg.output_dir = resolve(doc.value("output_dir", "out"));
        std::string scheme = doc.value("weights_scheme", "queen");
        if (scheme == "queen") cfg.weights_scheme = geo::ContiguityScheme::queen;
        else if (scheme == "rook") cfg.weights_scheme = geo::ContiguityScheme::rook;
        else throw config_error("weights_scheme must be `queen` or `rook`, got `" + scheme + "`");
        cfg.class_count = doc.value("class_count", 5);
        cfg.top_fraction = doc.value("top_fraction", 0.10);
        cfg.per_city_breaks = doc.value("per_city_breaks", false);
    } catch (const nlohmann::json::exception& e) {
        throw config_error("bad config structure: " + std::string(e.what()));
    }

    if (cfg.cities.empty()) throw config_error("config lists no cities");
    bool ref_found = false;
    std::map<std::string, int> names;
    for (const auto& c : cfg.cities) {
        if (c.name == cfg.reference_city) ref_found = true;
        if (++names[c.name] > 1) throw config_error("duplicate city name: " + c.name);
    }
    if (!ref_found)
        throw config_error("reference_city `" + cfg.reference_city + "` is not in cities");
    if (cfg.class_count < 2 || cfg.class_count > 9)
        throw config_error("class_count must be in [2, 9]");
    if (cfg.top_fraction <= 0.0 || cfg.top_fraction > 1.0)
        throw config_error("top_fraction must be in (0, 1]");
    return cfg;
}

inline unsigned thread_budget() {
    if (const char* env = std::getenv("ATLAS_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Table 5/6/8-style variable order.
inline const std::vector<std::string>& report_variables() {
    static const std::vector<std::string> vars = {
        "SD4DET", "ABRPOP", "MEDVAL", "PERC40COMM", "PERCBLACK", "PERCHOUS30K",
        "PERCPUBTRA", "PERCRENT", "PERCSNAP", "PERCVAC", "PERCWHITE", "REVCOMM"};
    return vars;
}

inline const std::vector<std::string>& summary_variables() {
    static const std::vector<std::string> vars = {
        "ABRPOP", "SD4OWN", "SD4DET", "PCA4", "PERCNOHS",
        "PERCPOV", "PERCSNAP", "PERCVAC", "UNEMP"};
    return vars;
}

inline const std::vector<std::string>& choropleth_variables() {
    static const std::vector<std::string> vars = {"SD4DET", "PERCSNAP", "ABRPOP", "PERCVAC"};
    return vars;
}

namespace detail {

inline std::string full_precision(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write " + path.string());
    return out;
}

// Restricts a city to its eligible block groups so weights and variable
// columns stay aligned.
inline CityDataset eligible_subset(const CityDataset& city,
                                   const indices::IndexBundle& bundle) {
    CityDataset sub;
    sub.name = city.name;
    for (const auto& geoid : bundle.geoids) {
        int i = city.index_of(geoid);
        sub.block_groups.push_back(city.block_groups[i]);
        sub.geometries.push_back(city.geometries[i]);
    }
    return sub;
}

} // namespace detail

// Everything computed for one city during a run; kept so the CLI subcommands
// can reuse the same path.
struct CityAnalysis {
    CityDataset city;
    indices::IndexBundle bundle;
    geo::JoinResult join;
    std::size_t crime_total = 0;
    std::size_t crime_excluded = 0;
    std::size_t abr_count = 0;
    selection::SelectionResult trivariate;
    selection::SelectionResult top_fraction;
    selection::SelectionResult top_matched;
};

inline CityAnalysis analyze_city(const CityInputs& inputs, const CityDataset& reference,
                                 const selection::MedianTriple& medians,
                                 double top_fraction_value, unsigned threads,
                                 ingest::Log* log = nullptr) {
    CityAnalysis a;
    a.city = ingest::load_block_groups(inputs.attr_path, inputs.geom_path, inputs.name, log);
    auto crimes = ingest::load_crimes(inputs.crimes_path, log);
    a.crime_total = crimes.incidents.size();
    a.crime_excluded = crimes.excluded_count;
    auto abr = ingest::filter_abr(crimes.incidents);
    a.abr_count = abr.size();
    a.join = geo::spatial_join(abr, a.city, threads);
    a.bundle = indices::build_index_bundle(a.city, reference, a.join);
    a.trivariate = selection::select_trivariate(a.city, a.bundle, medians);
    a.top_fraction = selection::select_top_deprived(
        a.city, a.bundle, selection::TopMode::by_fraction(top_fraction_value));
    a.top_matched = selection::select_top_deprived(
        a.city, a.bundle, selection::TopMode::by_count(a.trivariate.n_selected));
    return a;
}

// Loads the reference city and computes the shared trivariate medians.
inline CityAnalysis analyze_reference(const RunConfig& cfg, unsigned threads,
                                      selection::MedianTriple& medians_out,
                                      ingest::Log* log = nullptr) {
    const CityInputs* ref_inputs = nullptr;
    for (const auto& c : cfg.cities)
        if (c.name == cfg.reference_city) ref_inputs = &c;
    // load_config guarantees presence
    CityAnalysis a;
    a.city = ingest::load_block_groups(ref_inputs->attr_path, ref_inputs->geom_path,
                                       ref_inputs->name, log);
    auto crimes = ingest::load_crimes(ref_inputs->crimes_path, log);
    a.crime_total = crimes.incidents.size();
    a.crime_excluded = crimes.excluded_count;
    auto abr = ingest::filter_abr(crimes.incidents);
    a.abr_count = abr.size();
    a.join = geo::spatial_join(abr, a.city, threads);
    a.bundle = indices::build_index_bundle(a.city, a.city, a.join);
    medians_out = selection::reference_medians(a.bundle, a.city);
    a.trivariate = selection::select_trivariate(a.city, a.bundle, medians_out);
    a.top_fraction = selection::select_top_deprived(
        a.city, a.bundle, selection::TopMode::by_fraction(cfg.top_fraction));
    a.top_matched = selection::select_top_deprived(
        a.city, a.bundle, selection::TopMode::by_count(a.trivariate.n_selected));
    return a;
}

inline void write_city_artifacts(const RunConfig& cfg, const CityAnalysis& a,
                                 const std::map<std::string, std::vector<double>>& ref_breaks) {
    namespace fs = std::filesystem;
    fs::path dir = fs::path(cfg.output_dir) / a.city.name;
    fs::create_directories(dir);

    // Summary statistics (mean/SD per variable)
    {
        auto out = detail::open_out(dir / "summary_stats.csv");
        out << "variable,mean,sd\n";
        for (const auto& var : summary_variables()) {
            auto vals = selection::variable_values(a.city, a.bundle, var);
            if (!vals) {
                out << var << ",NA,NA\n";
                continue;
            }
            out << var << "," << tables::format_value(stats::mean(*vals)) << ","
                << tables::format_value(stats::std_dev(*vals)) << "\n";
        }
    }

    // Correlations of SD4DET with the other indices and components
    {
        auto out = detail::open_out(dir / "index_correlations.csv");
        out << "variable,pearson\n";
        auto dep = selection::variable_values(a.city, a.bundle, "SD4DET");
        for (const std::string var :
             {"PCA4", "SD4OWN", "PERCNOHS", "PERCPOV", "PERCSNAP", "UNEMP"}) {
            auto vals = selection::variable_values(a.city, a.bundle, var);
            out << var << "," << tables::format_value(stats::pearson(*dep, *vals)) << "\n";
        }
    }

    // Moran's I over the eligible block groups
    {
        CityDataset sub = detail::eligible_subset(a.city, a.bundle);
        auto w = geo::row_standardize(geo::contiguity_weights(sub, cfg.weights_scheme));
        auto out = detail::open_out(dir / "morans_i.csv");
        out << "variable,morans_i\n";
        for (const auto& var : choropleth_variables()) {
            auto vals = selection::variable_values(a.city, a.bundle, var);
            out << var << "," << tables::format_value(stats::morans_i(*vals, w)) << "\n";
        }
    }

    // Selection membership
    {
        auto out = detail::open_out(dir / "selection.csv");
        out << "geoid,selected_trivariate,selected_top_fraction,selected_top_matched\n";
        for (const auto& geoid : a.bundle.geoids)
            out << geoid << "," << (a.trivariate.contains(geoid) ? "1" : "0") << ","
                << (a.top_fraction.contains(geoid) ? "1" : "0") << ","
                << (a.top_matched.contains(geoid) ? "1" : "0") << "\n";
    }

    // Median comparisons (city, trivariate selection, deprivation-only groups)
    std::vector<selection::Group> groups = {
        selection::Group::whole_city("City"),
        selection::Group::from_selection("Selected", a.trivariate),
        selection::Group::from_selection("TopFraction", a.top_fraction),
        selection::Group::from_selection("TopMatched", a.top_matched),
    };
    auto med_table = selection::median_table(a.city, a.bundle, groups, report_variables());
    tables::write_table(med_table, tables::Format::csv, (dir / "medians.csv").string());
    tables::write_table(med_table, tables::Format::markdown, (dir / "medians.md").string());

    // Z-scores of the trivariate selection against the city
    auto z_table = selection::zscore_table(a.city, a.bundle, a.trivariate, report_variables());
    tables::write_table(z_table, tables::Format::csv, (dir / "zscores.csv").string());
    tables::write_table(z_table, tables::Format::markdown, (dir / "zscores.md").string());

    // Higher/lower labels: trivariate selection vs same-size deprivation group
    {
        auto sel_med = selection::median_table(
            a.city, a.bundle, {selection::Group::from_selection("Selection", a.trivariate)},
            report_variables());
        auto dep_med = selection::median_table(
            a.city, a.bundle, {selection::Group::from_selection("Deprivation", a.top_matched)},
            report_variables());
        auto rows = selection::higher_lower(sel_med, dep_med, "Selection", "Deprivation");
        tables::write_higher_lower(rows, (dir / "higher_lower.csv").string());
    }

    // Choropleths classified by the reference city's breaks
    for (const auto& var : choropleth_variables()) {
        std::vector<double> breaks;
        if (cfg.per_city_breaks) {
            auto vals = selection::variable_values(a.city, a.bundle, var);
            breaks = stats::jenks_breaks(*vals, cfg.class_count);
        } else {
            breaks = ref_breaks.at(var);
        }
        auto exp = export_choropleth(a.city, a.bundle, var, breaks,
                                     cfg.per_city_breaks ? a.city.name : cfg.reference_city,
                                     a.trivariate);
        std::string lower;
        for (char c : var)
            lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        write_choropleth(exp, a.city, (dir / ("choropleth_" + lower + ".geojson")).string());
    }

    // Full-precision sidecar for downstream checks
    {
        auto out = detail::open_out(dir / "raw_values.csv");
        out << "geoid,sd4own,sd4det,pca4,abrpop\n";
        for (std::size_t k = 0; k < a.bundle.geoids.size(); ++k)
            out << a.bundle.geoids[k] << "," << detail::full_precision(a.bundle.sd4own[k]) << ","
                << detail::full_precision(a.bundle.sd4det[k]) << ","
                << detail::full_precision(a.bundle.pca4[k]) << ","
                << detail::full_precision(a.bundle.abrpop[k]) << "\n";
    }
}

inline int error_code(const std::exception& e) {
    if (dynamic_cast<const config_error*>(&e)) return 1;
    if (dynamic_cast<const numeric_error*>(&e)) return 3;
    return 2;
}

// Runs the whole pipeline. A failure in one city aborts that city's outputs
// but the remaining cities are still processed; the exit status is the
// highest per-city code.
inline int run_pipeline(const RunConfig& cfg, std::ostream& diag = std::cerr) {
    unsigned threads = thread_budget();
    selection::MedianTriple medians;
    CityAnalysis ref;
    try {
        ref = analyze_reference(cfg, threads, medians);
    } catch (const std::exception& e) {
        diag << "error: city " << cfg.reference_city << " (reference): " << e.what() << "\n";
        return error_code(e);
    }

    std::map<std::string, std::vector<double>> ref_breaks;
    try {
        for (const auto& var : choropleth_variables()) {
            auto vals = selection::variable_values(ref.city, ref.bundle, var);
            ref_breaks[var] = stats::jenks_breaks(*vals, cfg.class_count);
        }
    } catch (const std::exception& e) {
        diag << "error: city " << cfg.reference_city << " (breaks): " << e.what() << "\n";
        return error_code(e);
    }

    int status = 0;
    for (const auto& inputs : cfg.cities) {
        try {
            if (inputs.name == cfg.reference_city) {
                write_city_artifacts(cfg, ref, ref_breaks);
            } else {
                CityAnalysis a =
                    analyze_city(inputs, ref.city, medians, cfg.top_fraction, threads);
                write_city_artifacts(cfg, a, ref_breaks);
            }
        } catch (const std::exception& e) {
            diag << "error: city " << inputs.name << " (pipeline): " << e.what() << "\n";
            status = std::max(status, error_code(e));
        }
    }
    return status;
}

} // namespace atlas::app

#endif // ATLAS_PIPELINE_HPP
