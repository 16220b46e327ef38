#ifndef ATLAS_INGEST_HPP
#define ATLAS_INGEST_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "atlas/csv.hpp"
#include "atlas/errors.hpp"
#include "atlas/types.hpp"

namespace atlas::ingest {

struct Log {
    std::vector<std::string> warnings;
    void warn(std::string msg) { warnings.push_back(std::move(msg)); }
};

inline constexpr const char* kCoreColumns[] = {
    "geoid", "population", "housing_units", "perc_pov",
    "perc_snap", "unemp", "perc_nohs", "perc_vac",
};

inline constexpr const char* kExtraColumns[] = {
    "medval", "perc40comm", "percblack", "perchous30k",
    "percpubtra", "percrent", "percwhite", "revcomm",
};

inline bool parse_double(const std::string& s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && !s.empty();
}

inline bool parse_count(const std::string& s, long long& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && out >= 0;
}

// ---------------------------------------------------------------------------
// GeoJSON geometry loading

namespace detail {

inline geo::Ring parse_ring(const nlohmann::json& coords) {
    geo::Ring ring;
    for (const auto& pt : coords) {
        if (!pt.is_array() || pt.size() < 2)
            throw data_error("GeoJSON ring coordinate is not a [lon, lat] pair");
        ring.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    return ring;
}

inline geo::Polygon parse_polygon(const nlohmann::json& coords) {
    geo::Polygon poly;
    for (const auto& ring : coords) poly.rings.push_back(parse_ring(ring));
    return poly;
}

} // namespace detail

// Reads a FeatureCollection whose features carry a string `geoid` property.
inline std::map<std::string, geo::MultiPolygon> load_geometries(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open GeoJSON file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw data_error("invalid GeoJSON in " + path + ": " + e.what());
    }
    if (doc.value("type", "") != "FeatureCollection")
        throw data_error("GeoJSON root is not a FeatureCollection: " + path);

    std::map<std::string, geo::MultiPolygon> out;
    for (const auto& feature : doc.at("features")) {
        const auto& props = feature.at("properties");
        if (!props.contains("geoid") || !props["geoid"].is_string())
            throw data_error("GeoJSON feature missing string `geoid` property in " + path);
        std::string geoid = props["geoid"].get<std::string>();
        const auto& geom = feature.at("geometry");
        std::string gtype = geom.value("type", "");
        geo::MultiPolygon mp;
        if (gtype == "Polygon") {
            mp.polygons.push_back(detail::parse_polygon(geom.at("coordinates")));
        } else if (gtype == "MultiPolygon") {
            for (const auto& poly : geom.at("coordinates"))
                mp.polygons.push_back(detail::parse_polygon(poly));
        } else {
            throw data_error("unsupported geometry type `" + gtype + "` for geoid " + geoid);
        }
        geo::validate(mp);
        if (!out.emplace(geoid, std::move(mp)).second)
            throw data_error("duplicate geoid in geometry file: " + geoid);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Block-group attribute loading + join

inline CityDataset load_block_groups(const std::string& attr_path,
                                     const std::string& geom_path,
                                     const std::string& city_name = "",
                                     Log* log = nullptr) {
    csv::Table table = csv::read_file(attr_path);
    for (const char* col : kCoreColumns)
        if (table.column(col) < 0)
            throw data_error("attribute file " + attr_path +
                             " is missing required column: " + std::string(col));

    std::vector<int> extra_cols;
    std::vector<std::string> extra_names;
    for (const char* col : kExtraColumns) {
        int idx = table.column(col);
        if (idx >= 0) {
            extra_cols.push_back(idx);
            extra_names.push_back(col);
        }
    }

    const int c_geoid = table.column("geoid");
    const int c_pop = table.column("population");
    const int c_house = table.column("housing_units");
    const int c_pov = table.column("perc_pov");
    const int c_snap = table.column("perc_snap");
    const int c_unemp = table.column("unemp");
    const int c_nohs = table.column("perc_nohs");
    const int c_vac = table.column("perc_vac");

    CityDataset city;
    city.name = city_name;
    std::set<std::string> seen_geoids;  // includes excluded rows, for the join check

    auto reject = [&](const std::string& geoid, const std::string& why) {
        ++city.excluded_count;
        if (log) log->warn("row excluded (geoid " + geoid + "): " + why);
    };

    for (const auto& row : table.rows) {
        if (row.size() < table.header.size()) {
            reject(row.empty() ? "?" : row[0], "short row");
            continue;
        }
        BlockGroup bg;
        bg.geoid = row[c_geoid];
        if (bg.geoid.empty()) {
            reject("?", "empty geoid");
            continue;
        }
        if (!seen_geoids.insert(bg.geoid).second)
            throw data_error("duplicate geoid in attribute file: " + bg.geoid);

        if (!parse_count(row[c_pop], bg.population)) {
            reject(bg.geoid, "unparseable population `" + row[c_pop] + "`");
            continue;
        }
        if (!parse_count(row[c_house], bg.housing_units)) {
            reject(bg.geoid, "unparseable housing_units `" + row[c_house] + "`");
            continue;
        }
        struct Field { const char* name; int col; double* dst; };
        const Field pct_fields[] = {
            {"perc_pov", c_pov, &bg.perc_pov},   {"perc_snap", c_snap, &bg.perc_snap},
            {"unemp", c_unemp, &bg.unemp},       {"perc_nohs", c_nohs, &bg.perc_nohs},
            {"perc_vac", c_vac, &bg.perc_vac},
        };
        bool ok = true;
        for (const auto& f : pct_fields) {
            if (!parse_double(row[f.col], *f.dst)) {
                reject(bg.geoid, std::string("unparseable ") + f.name + " `" + row[f.col] + "`");
                ok = false;
                break;
            }
            if (*f.dst < 0.0 || *f.dst > 100.0) {
                reject(bg.geoid, std::string(f.name) + " out of [0,100]: " + row[f.col]);
                ok = false;
                break;
            }
        }
        if (!ok) continue;

        for (std::size_t e = 0; e < extra_cols.size(); ++e) {
            const std::string& cell = row[extra_cols[e]];
            if (cell.empty()) continue;  // missing extra is fine
            double v;
            if (!parse_double(cell, v)) {
                reject(bg.geoid, "unparseable " + extra_names[e] + " `" + cell + "`");
                ok = false;
                break;
            }
            if (v < 0.0 || (extra_names[e] != "medval" && v > 100.0)) {
                reject(bg.geoid, extra_names[e] + " out of range: " + cell);
                ok = false;
                break;
            }
            bg.extras[extra_names[e]] = v;
        }
        if (!ok) continue;

        if (bg.population == 0 && log)
            log->warn("block group " + bg.geoid + " has population 0; kept, excluded from per-capita analyses");
        city.block_groups.push_back(std::move(bg));
    }

    std::sort(city.block_groups.begin(), city.block_groups.end(),
              [](const BlockGroup& a, const BlockGroup& b) { return a.geoid < b.geoid; });

    auto geoms = load_geometries(geom_path);

    std::vector<std::string> missing_geom, missing_attr;
    for (const auto& bg : city.block_groups)
        if (!geoms.count(bg.geoid)) missing_geom.push_back(bg.geoid);
    for (const auto& [geoid, mp] : geoms)
        if (!seen_geoids.count(geoid)) missing_attr.push_back(geoid);
    if (!missing_geom.empty() || !missing_attr.empty()) {
        auto list10 = [](const std::vector<std::string>& v) {
            std::string s;
            for (std::size_t i = 0; i < v.size() && i < 10; ++i) {
                if (i) s += ", ";
                s += v[i];
            }
            if (v.size() > 10) s += ", ...";
            return s;
        };
        std::string msg = "attribute/geometry join mismatch";
        if (!missing_geom.empty())
            msg += "; geoids without geometry: " + list10(missing_geom);
        if (!missing_attr.empty())
            msg += "; geometries without attributes: " + list10(missing_attr);
        throw data_error(msg);
    }

    city.geometries.reserve(city.block_groups.size());
    for (const auto& bg : city.block_groups)
        city.geometries.push_back(std::move(geoms.at(bg.geoid)));
    return city;
}

// ---------------------------------------------------------------------------
// Crime incidents

// Case-insensitive category aliases; anything else maps to `other`.
inline CrimeCategory parse_category(const std::string& raw) {
    std::string s;
    s.reserve(raw.size());
    for (char c : raw) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    static const std::map<std::string, CrimeCategory> aliases = {
        {"assault", CrimeCategory::assault},
        {"agg assault", CrimeCategory::assault},
        {"aggravated assault", CrimeCategory::assault},
        {"simple assault", CrimeCategory::assault},
        {"assault w/dangerous weapon", CrimeCategory::assault},
        {"burglary", CrimeCategory::burglary},
        {"burglary/breaking entering", CrimeCategory::burglary},
        {"breaking and entering", CrimeCategory::burglary},
        {"robbery", CrimeCategory::robbery},
        {"armed robbery", CrimeCategory::robbery},
        {"strongarm robbery", CrimeCategory::robbery},
    };
    auto it = aliases.find(s);
    return it == aliases.end() ? CrimeCategory::other : it->second;
}

struct CrimeLoadResult {
    std::vector<CrimeIncident> incidents;
    std::size_t excluded_count = 0;  // bad coordinates or unparseable rows
    std::size_t other_count = 0;     // rows kept with category `other`
};

inline CrimeLoadResult load_crimes(const std::string& path, Log* log = nullptr) {
    csv::Table table = csv::read_file(path);
    for (const char* col : {"id", "category", "lon", "lat"})
        if (table.column(col) < 0)
            throw data_error("crime file " + path +
                             " is missing required column: " + std::string(col));
    const int c_id = table.column("id");
    const int c_cat = table.column("category");
    const int c_lon = table.column("lon");
    const int c_lat = table.column("lat");
    const int c_date = table.column("date");

    CrimeLoadResult res;
    for (const auto& row : table.rows) {
        if (row.size() < table.header.size()) {
            ++res.excluded_count;
            continue;
        }
        CrimeIncident inc;
        inc.id = row[c_id];
        if (!parse_double(row[c_lon], inc.lon) || !parse_double(row[c_lat], inc.lat) ||
            inc.lon < -180.0 || inc.lon > 180.0 || inc.lat < -90.0 || inc.lat > 90.0) {
            ++res.excluded_count;
            if (log) log->warn("incident " + inc.id + " excluded: bad coordinates");
            continue;
        }
        inc.category = parse_category(row[c_cat]);
        if (inc.category == CrimeCategory::other) {
            ++res.other_count;
            if (log) log->warn("incident " + inc.id + ": category `" + row[c_cat] + "` mapped to other");
        }
        if (c_date >= 0 && !row[c_date].empty()) inc.date = row[c_date];
        res.incidents.push_back(std::move(inc));
    }
    return res;
}

inline std::vector<CrimeIncident> filter_abr(const std::vector<CrimeIncident>& incidents) {
    std::vector<CrimeIncident> out;
    out.reserve(incidents.size());
    for (const auto& inc : incidents)
        if (inc.category != CrimeCategory::other) out.push_back(inc);
    return out;
}

} // namespace atlas::ingest

#endif // ATLAS_INGEST_HPP
