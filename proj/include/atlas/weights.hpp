#ifndef ATLAS_WEIGHTS_HPP
#define ATLAS_WEIGHTS_HPP

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "atlas/geometry.hpp"
#include "atlas/types.hpp"

namespace atlas::geo {

enum class ContiguityScheme { queen, rook };

// Sparse spatial weights: per-region neighbor lists, sorted by neighbor index.
struct SpatialWeights {
    struct Neighbor {
        std::size_t index;
        double weight;
    };

    std::size_t n = 0;
    std::vector<std::vector<Neighbor>> neighbors;
    bool row_standardized = false;
    double s0 = 0.0;

    std::size_t island_count() const {
        std::size_t c = 0;
        for (const auto& row : neighbors)
            if (row.empty()) ++c;
        return c;
    }
};

// Queen: regions sharing any snapped boundary vertex are neighbors.
// Rook: regions sharing a snapped undirected edge (positive-length segment).
inline SpatialWeights contiguity_weights(const CityDataset& city, ContiguityScheme scheme) {
    using Key = std::pair<std::int64_t, std::int64_t>;
    using EdgeKey = std::pair<Key, Key>;

    const std::size_t n = city.size();
    std::map<Key, std::vector<std::size_t>> vertex_owners;
    std::map<EdgeKey, std::vector<std::size_t>> edge_owners;

    for (std::size_t r = 0; r < n; ++r) {
        for (const auto& poly : city.geometries[r].polygons) {
            for (const auto& ring : poly.rings) {
                std::size_t m = ring.size();
                if (m > 1 && ring.front() == ring.back()) --m;
                for (std::size_t i = 0; i < m; ++i) {
                    Key a = snap(ring[i]);
                    if (scheme == ContiguityScheme::queen) {
                        auto& owners = vertex_owners[a];
                        if (owners.empty() || owners.back() != r) owners.push_back(r);
                    } else {
                        Key b = snap(ring[(i + 1) % m]);
                        if (a == b) continue;
                        EdgeKey e = a < b ? EdgeKey{a, b} : EdgeKey{b, a};
                        auto& owners = edge_owners[e];
                        if (owners.empty() || owners.back() != r) owners.push_back(r);
                    }
                }
            }
        }
    }

    SpatialWeights w;
    w.n = n;
    w.neighbors.resize(n);
    std::map<std::pair<std::size_t, std::size_t>, bool> pair_seen;
    auto connect = [&](const std::vector<std::size_t>& owners) {
        for (std::size_t i = 0; i < owners.size(); ++i)
            for (std::size_t j = i + 1; j < owners.size(); ++j) {
                std::size_t a = owners[i], b = owners[j];
                if (a == b) continue;
                auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
                if (pair_seen.emplace(key, true).second) {
                    w.neighbors[a].push_back({b, 1.0});
                    w.neighbors[b].push_back({a, 1.0});
                }
            }
    };
    if (scheme == ContiguityScheme::queen)
        for (const auto& [k, owners] : vertex_owners) connect(owners);
    else
        for (const auto& [k, owners] : edge_owners) connect(owners);

    for (auto& row : w.neighbors) {
        std::sort(row.begin(), row.end(),
                  [](const SpatialWeights::Neighbor& a, const SpatialWeights::Neighbor& b) {
                      return a.index < b.index;
                  });
        w.s0 += static_cast<double>(row.size());
    }
    return w;
}

// Scales each nonempty row to sum 1; islands stay empty.
inline SpatialWeights row_standardize(SpatialWeights w) {
    w.s0 = 0.0;
    for (auto& row : w.neighbors) {
        double sum = 0.0;
        for (const auto& nb : row) sum += nb.weight;
        if (sum > 0.0)
            for (auto& nb : row) {
                nb.weight /= sum;
                w.s0 += nb.weight;
            }
    }
    w.row_standardized = true;
    return w;
}

} // namespace atlas::geo

#endif // ATLAS_WEIGHTS_HPP
