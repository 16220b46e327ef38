#ifndef ATLAS_INDICES_HPP
#define ATLAS_INDICES_HPP

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "atlas/errors.hpp"
#include "atlas/spatial_join.hpp"
#include "atlas/stats.hpp"
#include "atlas/types.hpp"

namespace atlas::indices {

// Per-city standard deviations of the four deprivation components.
struct SigmaVector {
    std::string source_city;
    double sigma_pov = 0.0;
    double sigma_snap = 0.0;
    double sigma_unemp = 0.0;
    double sigma_nohs = 0.0;
};

inline SigmaVector compute_sigmas(const CityDataset& city) {
    if (city.size() < 2) throw numeric_error("compute_sigmas needs at least 2 block groups");
    std::vector<double> pov, snap, unemp, nohs;
    for (const auto& bg : city.block_groups) {
        pov.push_back(bg.perc_pov);
        snap.push_back(bg.perc_snap);
        unemp.push_back(bg.unemp);
        nohs.push_back(bg.perc_nohs);
    }
    SigmaVector s;
    s.source_city = city.name;
    struct Var { const char* name; const std::vector<double>* xs; double* dst; };
    const Var vars[] = {
        {"perc_pov", &pov, &s.sigma_pov},   {"perc_snap", &snap, &s.sigma_snap},
        {"unemp", &unemp, &s.sigma_unemp},  {"perc_nohs", &nohs, &s.sigma_nohs},
    };
    for (const auto& v : vars) {
        *v.dst = stats::std_dev(*v.xs);
        if (*v.dst == 0.0)
            throw numeric_error("compute_sigmas: zero-variance variable " + std::string(v.name) +
                                " in city " + city.name);
    }
    return s;
}

// DEP = POV/s1 + SNAP/s2 + UNEMP/s3 + NOHS/s4.
inline double deprivation_index(const BlockGroup& bg, const SigmaVector& s) {
    return bg.perc_pov / s.sigma_pov + bg.perc_snap / s.sigma_snap +
           bg.unemp / s.sigma_unemp + bg.perc_nohs / s.sigma_nohs;
}

// Per-capita rate; population-0 block groups are excluded by the caller.
inline std::optional<double> abr_per_capita(std::size_t abr_count, const BlockGroup& bg) {
    if (bg.population <= 0) return std::nullopt;
    return static_cast<double>(abr_count) / static_cast<double>(bg.population);
}

// All derived columns for one city, aligned to its eligible (population > 0)
// block groups.
struct IndexBundle {
    std::string city;
    std::string reference_city;
    std::vector<std::string> geoids;  // eligible, sorted (city order)
    std::vector<double> sd4own;
    std::vector<double> sd4det;
    std::vector<double> pca4;
    std::vector<double> abrpop;
    SigmaVector own_sigmas;
    SigmaVector reference_sigmas;
    std::size_t excluded_population_zero = 0;

    int index_of(const std::string& geoid) const {
        auto it = std::lower_bound(geoids.begin(), geoids.end(), geoid);
        if (it != geoids.end() && *it == geoid)
            return static_cast<int>(it - geoids.begin());
        return -1;
    }
};

// Sigma computation runs over all block groups (population-0 rows carry valid
// percentages); the per-block-group columns cover only eligible rows.
inline IndexBundle build_index_bundle(const CityDataset& city,
                                      const CityDataset& reference,
                                      const geo::JoinResult& join) {
    if (join.counts.size() != city.size())
        throw data_error("build_index_bundle: join result not aligned to city " + city.name);

    IndexBundle b;
    b.city = city.name;
    b.reference_city = reference.name;
    b.own_sigmas = compute_sigmas(city);
    b.reference_sigmas =
        city.name == reference.name ? b.own_sigmas : compute_sigmas(reference);

    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < city.size(); ++i) {
        if (city.block_groups[i].population > 0) eligible.push_back(i);
        else ++b.excluded_population_zero;
    }

    std::array<stats::VariableVector, 4> cols{
        stats::VariableVector{"perc_pov", {}}, stats::VariableVector{"perc_snap", {}},
        stats::VariableVector{"unemp", {}}, stats::VariableVector{"perc_nohs", {}}};
    for (std::size_t i : eligible) {
        const auto& bg = city.block_groups[i];
        cols[0].values.push_back(bg.perc_pov);
        cols[1].values.push_back(bg.perc_snap);
        cols[2].values.push_back(bg.unemp);
        cols[3].values.push_back(bg.perc_nohs);
    }
    stats::PcaResult pca = stats::pca_first_component(cols);

    for (std::size_t k = 0; k < eligible.size(); ++k) {
        std::size_t i = eligible[k];
        const auto& bg = city.block_groups[i];
        b.geoids.push_back(bg.geoid);
        b.sd4own.push_back(deprivation_index(bg, b.own_sigmas));
        b.sd4det.push_back(deprivation_index(bg, b.reference_sigmas));
        b.pca4.push_back(pca.scores[k]);
        b.abrpop.push_back(*abr_per_capita(join.counts[i], bg));
    }
    return b;
}

} // namespace atlas::indices

#endif // ATLAS_INDICES_HPP
