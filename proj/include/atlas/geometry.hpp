#ifndef ATLAS_GEOMETRY_HPP
#define ATLAS_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "atlas/errors.hpp"

namespace atlas::geo {

struct Point {
    double lon = 0.0;
    double lat = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

// A linear ring; the closing vertex may or may not repeat the first one,
// both forms are accepted and treated as closed.
using Ring = std::vector<Point>;

// First ring is the outer boundary, the rest are holes.
struct Polygon {
    std::vector<Ring> rings;
};

// Polygon or MultiPolygon; GeoJSON collapses to a list of polygons either way.
struct MultiPolygon {
    std::vector<Polygon> polygons;
};

struct BoundingBox {
    double min_lon = std::numeric_limits<double>::infinity();
    double min_lat = std::numeric_limits<double>::infinity();
    double max_lon = -std::numeric_limits<double>::infinity();
    double max_lat = -std::numeric_limits<double>::infinity();

    void expand(const Point& p) {
        min_lon = std::min(min_lon, p.lon);
        min_lat = std::min(min_lat, p.lat);
        max_lon = std::max(max_lon, p.lon);
        max_lat = std::max(max_lat, p.lat);
    }
    bool contains(const Point& p) const {
        return p.lon >= min_lon && p.lon <= max_lon &&
               p.lat >= min_lat && p.lat <= max_lat;
    }
};

inline BoundingBox bounding_box(const MultiPolygon& mp) {
    BoundingBox bb;
    for (const auto& poly : mp.polygons)
        for (const auto& ring : poly.rings)
            for (const auto& p : ring) bb.expand(p);
    return bb;
}

inline std::size_t distinct_vertex_count(const Ring& ring) {
    Ring sorted = ring;
    if (sorted.size() > 1 && sorted.front() == sorted.back()) sorted.pop_back();
    std::sort(sorted.begin(), sorted.end(), [](const Point& a, const Point& b) {
        return a.lon < b.lon || (a.lon == b.lon && a.lat < b.lat);
    });
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    return sorted.size();
}

inline void validate(const MultiPolygon& mp) {
    if (mp.polygons.empty()) throw data_error("geometry has no polygons");
    for (const auto& poly : mp.polygons) {
        if (poly.rings.empty()) throw data_error("polygon has no rings");
        for (const auto& ring : poly.rings)
            if (distinct_vertex_count(ring) < 3)
                throw data_error("degenerate ring: fewer than 3 distinct vertices");
    }
}

// True when p lies on the closed segment ab.
inline bool on_segment(const Point& p, const Point& a, const Point& b) {
    double cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
    if (cross != 0.0) return false;
    return p.lon >= std::min(a.lon, b.lon) && p.lon <= std::max(a.lon, b.lon) &&
           p.lat >= std::min(a.lat, b.lat) && p.lat <= std::max(a.lat, b.lat);
}

namespace detail {

// Even-odd crossing count for one ring (boundary not handled here).
inline bool ring_crossings_odd(const Point& p, const Ring& ring) {
    bool inside = false;
    std::size_t n = ring.size();
    if (n > 1 && ring.front() == ring.back()) --n;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = ring[i];
        const Point& b = ring[j];
        if ((a.lat > p.lat) != (b.lat > p.lat)) {
            double x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
            if (p.lon < x) inside = !inside;
        }
    }
    return inside;
}

inline bool on_ring_boundary(const Point& p, const Ring& ring) {
    std::size_t n = ring.size();
    if (n > 1 && ring.front() == ring.back()) --n;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
        if (on_segment(p, ring[j], ring[i])) return true;
    return false;
}

} // namespace detail

// Even-odd semantics; a point exactly on any boundary (outer or hole) is inside.
inline bool point_in_polygon(const Point& p, const Polygon& poly) {
    if (poly.rings.empty()) throw data_error("polygon has no rings");
    for (const auto& ring : poly.rings) {
        if (distinct_vertex_count(ring) < 3)
            throw data_error("degenerate ring: fewer than 3 distinct vertices");
        if (detail::on_ring_boundary(p, ring)) return true;
    }
    bool inside = false;
    for (const auto& ring : poly.rings)
        if (detail::ring_crossings_odd(p, ring)) inside = !inside;
    return inside;
}

inline bool point_in_polygon(const Point& p, const MultiPolygon& mp) {
    for (const auto& poly : mp.polygons)
        if (point_in_polygon(p, poly)) return true;
    return false;
}

// Census shapes share vertices exactly; snapping guards float noise.
constexpr double kSnapGrid = 1e-9;

inline std::pair<std::int64_t, std::int64_t> snap(const Point& p) {
    return {static_cast<std::int64_t>(std::llround(p.lon / kSnapGrid)),
            static_cast<std::int64_t>(std::llround(p.lat / kSnapGrid))};
}

} // namespace atlas::geo

#endif // ATLAS_GEOMETRY_HPP
