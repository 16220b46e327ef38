#ifndef ATLAS_SPATIAL_JOIN_HPP
#define ATLAS_SPATIAL_JOIN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <thread>
#include <vector>

#include "atlas/geometry.hpp"
#include "atlas/types.hpp"

namespace atlas::geo {

struct JoinResult {
    std::vector<std::size_t> counts;  // aligned to city.block_groups
    std::size_t unassigned = 0;

    std::size_t total() const {
        std::size_t t = unassigned;
        for (auto c : counts) t += c;
        return t;
    }
};

// Uniform-grid index over region bounding boxes. Candidate lists stay sorted
// by region index, so testing in order gives the smallest-geoid tie-break for
// free (regions are sorted by geoid).
class GridIndex {
public:
    explicit GridIndex(const std::vector<MultiPolygon>& regions) : regions_(&regions) {
        boxes_.reserve(regions.size());
        for (const auto& mp : regions) {
            boxes_.push_back(bounding_box(mp));
            extent_.expand({boxes_.back().min_lon, boxes_.back().min_lat});
            extent_.expand({boxes_.back().max_lon, boxes_.back().max_lat});
        }
        if (regions.empty()) return;
        std::size_t target = std::max<std::size_t>(1, regions.size());
        dim_ = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(target)))) * 2;
        cells_.resize(dim_ * dim_);
        for (std::size_t r = 0; r < boxes_.size(); ++r) {
            auto [i0, j0] = cell_of(boxes_[r].min_lon, boxes_[r].min_lat);
            auto [i1, j1] = cell_of(boxes_[r].max_lon, boxes_[r].max_lat);
            for (std::size_t i = i0; i <= i1; ++i)
                for (std::size_t j = j0; j <= j1; ++j)
                    cells_[i * dim_ + j].push_back(r);
        }
    }

    // Index of the containing region (smallest geoid wins), or -1.
    int locate(const Point& p) const {
        if (regions_->empty() || !extent_.contains(p)) return -1;
        auto [i, j] = cell_of(p.lon, p.lat);
        for (std::size_t r : cells_[i * dim_ + j])
            if (boxes_[r].contains(p) && point_in_polygon(p, (*regions_)[r]))
                return static_cast<int>(r);
        return -1;
    }

private:
    std::pair<std::size_t, std::size_t> cell_of(double lon, double lat) const {
        double w = extent_.max_lon - extent_.min_lon;
        double h = extent_.max_lat - extent_.min_lat;
        std::size_t i = w > 0.0
            ? std::min(dim_ - 1, static_cast<std::size_t>((lon - extent_.min_lon) / w * static_cast<double>(dim_)))
            : 0;
        std::size_t j = h > 0.0
            ? std::min(dim_ - 1, static_cast<std::size_t>((lat - extent_.min_lat) / h * static_cast<double>(dim_)))
            : 0;
        return {i, j};
    }

    const std::vector<MultiPolygon>* regions_;
    std::vector<BoundingBox> boxes_;
    BoundingBox extent_;
    std::size_t dim_ = 1;
    std::vector<std::vector<std::size_t>> cells_;
};

// Assigns each incident to at most one block group. Result is independent of
// the thread count: each incident's assignment is a pure point query and the
// per-thread tallies merge by addition.
inline JoinResult spatial_join(const std::vector<CrimeIncident>& incidents,
                               const CityDataset& city,
                               unsigned threads = 1) {
    GridIndex index(city.geometries);
    JoinResult res;
    res.counts.assign(city.size(), 0);

    if (threads <= 1 || incidents.size() < 1024) {
        for (const auto& inc : incidents) {
            int r = index.locate({inc.lon, inc.lat});
            if (r < 0) ++res.unassigned;
            else ++res.counts[static_cast<std::size_t>(r)];
        }
        return res;
    }

    std::vector<JoinResult> partial(threads);
    std::vector<std::thread> pool;
    std::size_t chunk = (incidents.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            partial[t].counts.assign(city.size(), 0);
            std::size_t lo = t * chunk;
            std::size_t hi = std::min(incidents.size(), lo + chunk);
            for (std::size_t i = lo; i < hi; ++i) {
                int r = index.locate({incidents[i].lon, incidents[i].lat});
                if (r < 0) ++partial[t].unassigned;
                else ++partial[t].counts[static_cast<std::size_t>(r)];
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& p : partial) {
        res.unassigned += p.unassigned;
        for (std::size_t i = 0; i < res.counts.size(); ++i) res.counts[i] += p.counts[i];
    }
    return res;
}

} // namespace atlas::geo

#endif // ATLAS_SPATIAL_JOIN_HPP
