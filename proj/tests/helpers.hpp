#ifndef ATLAS_TEST_HELPERS_HPP
#define ATLAS_TEST_HELPERS_HPP

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "atlas/atlas.hpp"

namespace testutil {

inline std::string fixtures_dir() { return ATLAS_FIXTURES_DIR; }

inline std::string fixture(const std::string& name) {
    return (std::filesystem::path(ATLAS_FIXTURES_DIR) / name).string();
}

// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("atlas_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }

    std::string file(const std::string& name, const std::string& contents) const {
        auto p = path / name;
        std::ofstream out(p, std::ios::binary);
        out << contents;
        return p.string();
    }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

// Axis-aligned unit cell [x, x+1] x [y, y+1].
inline atlas::geo::MultiPolygon unit_cell(double x, double y, double size = 1.0) {
    atlas::geo::MultiPolygon mp;
    atlas::geo::Polygon poly;
    poly.rings.push_back({{x, y}, {x + size, y}, {x + size, y + size}, {x, y + size}, {x, y}});
    mp.polygons.push_back(std::move(poly));
    return mp;
}

// Grid city with one unit cell per block group; geoids G000, G001, ...
inline atlas::CityDataset grid_city(std::size_t cols, std::size_t rows,
                                    long long population = 100) {
    atlas::CityDataset city;
    city.name = "grid";
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            atlas::BlockGroup bg;
            char buf[16];
            std::snprintf(buf, sizeof(buf), "G%03zu", r * cols + c);
            bg.geoid = buf;
            bg.population = population;
            city.block_groups.push_back(bg);
            city.geometries.push_back(unit_cell(static_cast<double>(c), static_cast<double>(r)));
        }
    }
    return city;
}

// Naive all-pairs spatial join, the oracle for the indexed implementation.
inline atlas::geo::JoinResult naive_spatial_join(const std::vector<atlas::CrimeIncident>& incidents,
                                                 const atlas::CityDataset& city) {
    atlas::geo::JoinResult res;
    res.counts.assign(city.size(), 0);
    for (const auto& inc : incidents) {
        int hit = -1;
        for (std::size_t r = 0; r < city.size(); ++r) {
            if (atlas::geo::point_in_polygon({inc.lon, inc.lat}, city.geometries[r])) {
                hit = static_cast<int>(r);  // city sorted by geoid: first hit = smallest
                break;
            }
        }
        if (hit < 0) ++res.unassigned;
        else ++res.counts[static_cast<std::size_t>(hit)];
    }
    return res;
}

// Dense O(n^2) Moran's I, the brute-force oracle.
inline double naive_morans_i(const std::vector<double>& x,
                             const std::vector<std::vector<double>>& w_dense) {
    std::size_t n = x.size();
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(n);
    double s0 = 0.0, num = 0.0, denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        denom += (x[i] - m) * (x[i] - m);
        for (std::size_t j = 0; j < n; ++j) {
            s0 += w_dense[i][j];
            num += w_dense[i][j] * (x[i] - m) * (x[j] - m);
        }
    }
    return static_cast<double>(n) / s0 * num / denom;
}

inline std::vector<std::vector<double>> dense_weights(const atlas::geo::SpatialWeights& w) {
    std::vector<std::vector<double>> d(w.n, std::vector<double>(w.n, 0.0));
    for (std::size_t i = 0; i < w.n; ++i)
        for (const auto& nb : w.neighbors[i]) d[i][nb.index] = nb.weight;
    return d;
}

// Exhaustive minimal within-class SSD over all contiguous k-partitions.
inline double exhaustive_min_ssd(std::vector<double> xs, std::size_t k) {
    std::sort(xs.begin(), xs.end());
    std::size_t n = xs.size();
    auto ssd = [&](std::size_t i, std::size_t j) {  // inclusive
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t t = i; t <= j; ++t) {
            sum += xs[t];
            sum_sq += xs[t] * xs[t];
        }
        double cnt = static_cast<double>(j - i + 1);
        return sum_sq - sum * sum / cnt;
    };
    double best = std::numeric_limits<double>::infinity();
    // choose k-1 split points out of n-1 gaps
    std::vector<std::size_t> splits(k - 1);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t idx, std::size_t from) {
        if (idx == splits.size()) {
            double total = 0.0;
            std::size_t start = 0;
            for (std::size_t s : splits) {
                total += ssd(start, s);
                start = s + 1;
            }
            total += ssd(start, n - 1);
            best = std::min(best, total);
            return;
        }
        for (std::size_t s = from; s + (splits.size() - idx) < n; ++s) {
            splits[idx] = s;
            rec(idx + 1, s + 1);
        }
    };
    if (k == 1) return ssd(0, n - 1);
    rec(0, 0);
    return best;
}

// Loads a fixture city and derives its index bundle against the alpha
// reference.
struct FixtureAnalysis {
    atlas::CityDataset city;
    atlas::CityDataset reference;
    atlas::geo::JoinResult join;
    atlas::indices::IndexBundle bundle;
};

inline FixtureAnalysis load_fixture_analysis(const std::string& name = "alpha") {
    using namespace atlas;
    FixtureAnalysis fa;
    fa.reference = ingest::load_block_groups(fixture("alpha_attributes.csv"),
                                             fixture("alpha_geometry.geojson"), "alpha");
    if (name == "alpha") {
        fa.city = fa.reference;
    } else {
        fa.city = ingest::load_block_groups(fixture(name + "_attributes.csv"),
                                            fixture(name + "_geometry.geojson"), name);
    }
    auto crimes = ingest::load_crimes(fixture(name + "_crimes.csv"));
    auto abr = ingest::filter_abr(crimes.incidents);
    fa.join = geo::spatial_join(abr, fa.city);
    fa.bundle = indices::build_index_bundle(fa.city, fa.reference, fa.join);
    return fa;
}

} // namespace testutil

#endif // ATLAS_TEST_HELPERS_HPP
