#ifndef ATLAS_CHOROPLETH_HPP
#define ATLAS_CHOROPLETH_HPP

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "atlas/errors.hpp"
#include "atlas/selection.hpp"
#include "atlas/types.hpp"

namespace atlas::app {

struct ChoroplethFeature {
    std::string geoid;
    double value = 0.0;
    std::size_t class_index = 0;
    bool selected = false;
};

struct ChoroplethExport {
    std::string city;
    std::string variable;
    std::vector<double> breaks;  // class maxima, strictly increasing
    std::string breaks_source;   // city whose values produced the breaks
    std::vector<ChoroplethFeature> features;
};

// Breaks are class maxima: value <= breaks[i] lands in the first such class i,
// values above every break take the top class.
inline std::size_t classify(double value, const std::vector<double>& breaks) {
    for (std::size_t i = 0; i < breaks.size(); ++i)
        if (value <= breaks[i]) return i;
    return breaks.size();
}

inline ChoroplethExport export_choropleth(
    const CityDataset& city, const indices::IndexBundle& bundle,
    const std::string& variable, const std::vector<double>& breaks,
    const std::string& breaks_source,
    const std::optional<selection::SelectionResult>& sel = std::nullopt) {
    for (std::size_t i = 1; i < breaks.size(); ++i)
        if (breaks[i] <= breaks[i - 1])
            throw numeric_error("choropleth breaks must be strictly increasing");
    auto values = selection::variable_values(city, bundle, variable);
    if (!values)
        throw data_error("variable " + variable + " unavailable for city " + city.name);

    ChoroplethExport exp;
    exp.city = city.name;
    exp.variable = variable;
    exp.breaks = breaks;
    exp.breaks_source = breaks_source;
    for (std::size_t k = 0; k < bundle.geoids.size(); ++k) {
        ChoroplethFeature f;
        f.geoid = bundle.geoids[k];
        f.value = (*values)[k];
        f.class_index = classify(f.value, breaks);
        f.selected = sel && sel->contains(f.geoid);
        exp.features.push_back(std::move(f));
    }
    return exp;
}

namespace detail {

inline nlohmann::ordered_json ring_coords(const geo::Ring& ring) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& p : ring) arr.push_back({p.lon, p.lat});
    // GeoJSON rings must close explicitly
    if (!ring.empty() && !(ring.front() == ring.back()))
        arr.push_back({ring.front().lon, ring.front().lat});
    return arr;
}

inline nlohmann::ordered_json geometry_json(const geo::MultiPolygon& mp) {
    nlohmann::ordered_json geom;
    if (mp.polygons.size() == 1) {
        geom["type"] = "Polygon";
        nlohmann::ordered_json rings = nlohmann::ordered_json::array();
        for (const auto& r : mp.polygons[0].rings) rings.push_back(ring_coords(r));
        geom["coordinates"] = rings;
    } else {
        geom["type"] = "MultiPolygon";
        nlohmann::ordered_json polys = nlohmann::ordered_json::array();
        for (const auto& poly : mp.polygons) {
            nlohmann::ordered_json rings = nlohmann::ordered_json::array();
            for (const auto& r : poly.rings) rings.push_back(ring_coords(r));
            polys.push_back(rings);
        }
        geom["coordinates"] = polys;
    }
    return geom;
}

} // namespace detail

inline void write_choropleth(const ChoroplethExport& exp, const CityDataset& city,
                             const std::string& path) {
    nlohmann::ordered_json doc;
    doc["type"] = "FeatureCollection";
    doc["metadata"] = {{"city", exp.city},
                       {"variable", exp.variable},
                       {"classification", "jenks"},
                       {"breaks_source", exp.breaks_source},
                       {"class_count", exp.breaks.size() + 1},
                       {"breaks", exp.breaks}};
    nlohmann::ordered_json features = nlohmann::ordered_json::array();
    for (const auto& f : exp.features) {
        int i = city.index_of(f.geoid);
        if (i < 0) throw data_error("choropleth feature geoid not in city: " + f.geoid);
        nlohmann::ordered_json feat;
        feat["type"] = "Feature";
        feat["properties"] = {{"geoid", f.geoid},
                              {"value", f.value},
                              {"class", f.class_index},
                              {"selected", f.selected}};
        feat["geometry"] = detail::geometry_json(city.geometries[i]);
        features.push_back(std::move(feat));
    }
    doc["features"] = std::move(features);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write choropleth to " + path);
    out << doc.dump(2) << "\n";
    if (!out) throw data_error("write failed for " + path);
}

} // namespace atlas::app

#endif // ATLAS_CHOROPLETH_HPP
