#ifndef ATLAS_SELECTION_HPP
#define ATLAS_SELECTION_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "atlas/errors.hpp"
#include "atlas/indices.hpp"
#include "atlas/stats.hpp"
#include "atlas/types.hpp"

namespace atlas::selection {

// Reference-city medians of the three criterion variables.
struct MedianTriple {
    std::string source_city;
    double med_snap = 0.0;
    double med_abr = 0.0;
    double med_vac = 0.0;
};

enum class SelectionKind { trivariate, top_fraction, top_n };

struct SelectionResult {
    SelectionKind kind = SelectionKind::trivariate;
    std::set<std::string> geoids;
    std::size_t n_selected = 0;
    std::size_t n_eligible = 0;

    double share() const {
        return n_eligible == 0 ? 0.0
                               : static_cast<double>(n_selected) / static_cast<double>(n_eligible);
    }
    bool contains(const std::string& geoid) const { return geoids.count(geoid) > 0; }
};

inline MedianTriple reference_medians(const indices::IndexBundle& ref_bundle,
                                      const CityDataset& ref_city) {
    if (ref_bundle.geoids.empty())
        throw data_error("reference city " + ref_city.name + " has no eligible block groups");
    std::vector<double> snap, vac;
    for (const auto& geoid : ref_bundle.geoids) {
        int i = ref_city.index_of(geoid);
        snap.push_back(ref_city.block_groups[i].perc_snap);
        vac.push_back(ref_city.block_groups[i].perc_vac);
    }
    MedianTriple m;
    m.source_city = ref_city.name;
    m.med_snap = stats::median(snap);
    m.med_abr = stats::median(ref_bundle.abrpop);
    m.med_vac = stats::median(vac);
    return m;
}

// Strict inequalities: a block group sitting exactly at a median is not
// "exceeding" it.
inline SelectionResult select_trivariate(const CityDataset& city,
                                         const indices::IndexBundle& bundle,
                                         const MedianTriple& m) {
    SelectionResult res;
    res.kind = SelectionKind::trivariate;
    res.n_eligible = bundle.geoids.size();
    for (std::size_t k = 0; k < bundle.geoids.size(); ++k) {
        int i = city.index_of(bundle.geoids[k]);
        const auto& bg = city.block_groups[i];
        if (bg.perc_snap > m.med_snap && bundle.abrpop[k] > m.med_abr &&
            bg.perc_vac > m.med_vac)
            res.geoids.insert(bg.geoid);
    }
    res.n_selected = res.geoids.size();
    return res;
}

struct TopMode {
    SelectionKind kind;  // top_fraction or top_n
    double fraction = 0.0;
    std::size_t count = 0;

    static TopMode by_fraction(double f) { return {SelectionKind::top_fraction, f, 0}; }
    static TopMode by_count(std::size_t n) { return {SelectionKind::top_n, 0.0, n}; }
};

// Highest-SD4DET block groups; ties at the cutoff go to the smaller geoid.
inline SelectionResult select_top_deprived(const CityDataset& city,
                                           const indices::IndexBundle& bundle,
                                           const TopMode& mode) {
    (void)city;
    const std::size_t n = bundle.geoids.size();
    std::size_t take;
    if (mode.kind == SelectionKind::top_fraction) {
        if (mode.fraction <= 0.0 || mode.fraction > 1.0)
            throw config_error("top fraction must be in (0, 1]");
        take = static_cast<std::size_t>(std::ceil(mode.fraction * static_cast<double>(n)));
    } else {
        if (mode.count > n)
            throw data_error("requested more block groups than eligible");
        take = mode.count;
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (bundle.sd4det[a] != bundle.sd4det[b]) return bundle.sd4det[a] > bundle.sd4det[b];
        return bundle.geoids[a] < bundle.geoids[b];
    });

    SelectionResult res;
    res.kind = mode.kind;
    res.n_eligible = n;
    for (std::size_t k = 0; k < take; ++k) res.geoids.insert(bundle.geoids[order[k]]);
    res.n_selected = res.geoids.size();
    return res;
}

// ---------------------------------------------------------------------------
// Variable lookup shared by the comparison tables

// Values aligned to the bundle's eligible geoids; nullopt when the variable is
// an extra the city does not fully supply.
inline std::optional<std::vector<double>> variable_values(const CityDataset& city,
                                                          const indices::IndexBundle& bundle,
                                                          const std::string& name) {
    if (name == "SD4OWN") return bundle.sd4own;
    if (name == "SD4DET") return bundle.sd4det;
    if (name == "PCA4") return bundle.pca4;
    if (name == "ABRPOP") return bundle.abrpop;

    auto core = [&](double BlockGroup::* field) {
        std::vector<double> out;
        out.reserve(bundle.geoids.size());
        for (const auto& geoid : bundle.geoids)
            out.push_back(city.block_groups[city.index_of(geoid)].*field);
        return out;
    };
    if (name == "PERCPOV") return core(&BlockGroup::perc_pov);
    if (name == "PERCSNAP") return core(&BlockGroup::perc_snap);
    if (name == "UNEMP") return core(&BlockGroup::unemp);
    if (name == "PERCNOHS") return core(&BlockGroup::perc_nohs);
    if (name == "PERCVAC") return core(&BlockGroup::perc_vac);

    // Extras use the lowercase CSV column name.
    std::string key;
    for (char c : name) key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    std::vector<double> out;
    for (const auto& geoid : bundle.geoids) {
        const auto& bg = city.block_groups[city.index_of(geoid)];
        auto it = bg.extras.find(key);
        if (it == bg.extras.end()) return std::nullopt;
        out.push_back(it->second);
    }
    return out;
}

inline const std::vector<std::string>& known_variables() {
    static const std::vector<std::string> vars = {
        "SD4OWN", "SD4DET", "PCA4", "ABRPOP", "PERCPOV", "PERCSNAP", "UNEMP",
        "PERCNOHS", "PERCVAC", "MEDVAL", "PERC40COMM", "PERCBLACK", "PERCHOUS30K",
        "PERCPUBTRA", "PERCRENT", "PERCWHITE", "REVCOMM"};
    return vars;
}

// ---------------------------------------------------------------------------
// Comparison tables

enum class Statistic { median, zscore, mean };

struct Cell {
    double value = 0.0;
    bool available = false;
    int flag = 0;  // zscore tables: 1 if |Z| > 1, 2 if |Z| > 2
};

// Variables as rows, groups as columns (the layout the serializer mirrors).
struct ComparisonTable {
    Statistic statistic = Statistic::median;
    std::string city;
    std::vector<std::string> variables;
    std::vector<std::string> groups;
    std::vector<std::size_t> group_sizes;
    std::vector<std::vector<Cell>> cells;  // [variable][group]
};

// A comparison group: a selection, or the whole (eligible) city.
struct Group {
    std::string label;
    std::optional<SelectionResult> sel;  // nullopt = whole city

    static Group whole_city(std::string label) { return {std::move(label), std::nullopt}; }
    static Group from_selection(std::string label, SelectionResult s) {
        return {std::move(label), std::move(s)};
    }
};

namespace detail {

inline std::vector<double> group_values(const std::vector<double>& aligned,
                                        const indices::IndexBundle& bundle,
                                        const Group& g) {
    if (!g.sel) return aligned;
    std::vector<double> out;
    for (std::size_t k = 0; k < bundle.geoids.size(); ++k)
        if (g.sel->contains(bundle.geoids[k])) out.push_back(aligned[k]);
    return out;
}

} // namespace detail

inline ComparisonTable median_table(const CityDataset& city,
                                    const indices::IndexBundle& bundle,
                                    const std::vector<Group>& groups,
                                    const std::vector<std::string>& vars) {
    ComparisonTable t;
    t.statistic = Statistic::median;
    t.city = city.name;
    t.variables = vars;
    for (const auto& g : groups) {
        t.groups.push_back(g.label);
        std::size_t size = g.sel ? g.sel->n_selected : bundle.geoids.size();
        if (size == 0) throw data_error("empty group `" + g.label + "` in median table");
        t.group_sizes.push_back(size);
    }
    for (const auto& var : vars) {
        auto aligned = variable_values(city, bundle, var);
        std::vector<Cell> row;
        for (const auto& g : groups) {
            Cell c;
            if (aligned) {
                c.value = stats::median(detail::group_values(*aligned, bundle, g));
                c.available = true;
            }
            row.push_back(c);
        }
        t.cells.push_back(std::move(row));
    }
    return t;
}

// Z = (selected mean - city mean) / city SD, per variable.
inline ComparisonTable zscore_table(const CityDataset& city,
                                    const indices::IndexBundle& bundle,
                                    const SelectionResult& sel,
                                    const std::vector<std::string>& vars) {
    if (sel.n_selected == 0) throw data_error("zscore_table: empty selection");
    ComparisonTable t;
    t.statistic = Statistic::zscore;
    t.city = city.name;
    t.variables = vars;
    t.groups = {"Selected"};
    t.group_sizes = {sel.n_selected};
    Group g = Group::from_selection("Selected", sel);
    for (const auto& var : vars) {
        auto aligned = variable_values(city, bundle, var);
        Cell c;
        if (aligned) {
            double city_sd = stats::std_dev(*aligned);
            if (city_sd > 0.0) {
                double z = stats::z_score(stats::mean(detail::group_values(*aligned, bundle, g)),
                                          stats::mean(*aligned), city_sd);
                c.value = z;
                c.available = true;
                if (std::abs(z) > 2.0) c.flag = 2;
                else if (std::abs(z) > 1.0) c.flag = 1;
            }
        }
        t.cells.push_back({c});
    }
    return t;
}

struct HigherLowerRow {
    std::string variable;
    std::string label;   // label_a, label_b, or "tie"
    bool starred = false;  // display metadata carried from the paper's table
};

inline std::vector<HigherLowerRow> higher_lower(const ComparisonTable& a,
                                                const ComparisonTable& b,
                                                const std::string& label_a,
                                                const std::string& label_b) {
    if (a.variables != b.variables)
        throw data_error("higher_lower: variable lists differ");
    if (a.statistic != Statistic::median || b.statistic != Statistic::median)
        throw data_error("higher_lower: tables must hold medians");
    std::vector<HigherLowerRow> rows;
    for (std::size_t v = 0; v < a.variables.size(); ++v) {
        HigherLowerRow row;
        row.variable = a.variables[v];
        row.starred = row.variable == "MEDVAL" || row.variable == "PERCWHITE";
        const Cell& ca = a.cells[v][0];
        const Cell& cb = b.cells[v][0];
        if (!ca.available || !cb.available) row.label = "unavailable";
        else if (ca.value > cb.value) row.label = label_a;
        else if (cb.value > ca.value) row.label = label_b;
        else row.label = "tie";
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace atlas::selection

#endif // ATLAS_SELECTION_HPP
