#ifndef ATLAS_TYPES_HPP
#define ATLAS_TYPES_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atlas/geometry.hpp"

namespace atlas {

// One census block group with its socioeconomic attributes.
// Core percentages are validated to [0, 100] at ingest.
struct BlockGroup {
    std::string geoid;
    long long population = 0;
    long long housing_units = 0;
    double perc_pov = 0.0;
    double perc_snap = 0.0;
    double unemp = 0.0;
    double perc_nohs = 0.0;
    double perc_vac = 0.0;
    // Optional columns (medval, percblack, ...); absent keys mean the city
    // did not supply the variable.
    std::map<std::string, double> extras;
};

enum class CrimeCategory { assault, burglary, robbery, other };

struct CrimeIncident {
    std::string id;
    CrimeCategory category = CrimeCategory::other;
    double lon = 0.0;
    double lat = 0.0;
    std::optional<std::string> date;
};

// Block groups joined to geometries, sorted by geoid so every downstream
// artifact is reproducible.
struct CityDataset {
    std::string name;
    std::vector<BlockGroup> block_groups;
    std::vector<geo::MultiPolygon> geometries;  // aligned to block_groups
    std::size_t excluded_count = 0;

    std::size_t size() const { return block_groups.size(); }

    int index_of(const std::string& geoid) const {
        // block_groups sorted by geoid
        std::size_t lo = 0, hi = block_groups.size();
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (block_groups[mid].geoid < geoid) lo = mid + 1;
            else hi = mid;
        }
        if (lo < block_groups.size() && block_groups[lo].geoid == geoid)
            return static_cast<int>(lo);
        return -1;
    }
};

} // namespace atlas

#endif // ATLAS_TYPES_HPP
