#ifndef ATLAS_STATS_HPP
#define ATLAS_STATS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "atlas/errors.hpp"
#include "atlas/weights.hpp"

namespace atlas::stats {

// A named column aligned to a city's block-group order.
struct VariableVector {
    std::string name;
    std::vector<double> values;
};

inline double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw numeric_error("mean of empty vector");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

inline double median(std::vector<double> xs) {
    if (xs.empty()) throw numeric_error("median of empty vector");
    std::size_t n = xs.size();
    std::size_t mid = n / 2;
    std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
    double hi = xs[mid];
    if (n % 2 == 1) return hi;
    double lo = *std::max_element(xs.begin(), xs.begin() + mid);
    return (lo + hi) / 2.0;
}

// Sample standard deviation (divisor n-1).
inline double std_dev(const std::vector<double>& xs) {
    if (xs.size() < 2) throw numeric_error("std_dev needs at least 2 values");
    double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw numeric_error("pearson: length mismatch");
    if (x.size() < 3) throw numeric_error("pearson needs at least 3 values");
    double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw numeric_error("pearson: zero-variance input");
    return sxy / std::sqrt(sxx * syy);
}

inline double pearson(const VariableVector& x, const VariableVector& y) {
    return pearson(x.values, y.values);
}

// Average ranks; ties receive the mean of their rank span.
inline std::vector<double> average_ranks(const std::vector<double>& xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(xs.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
        double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw numeric_error("spearman: length mismatch");
    return pearson(average_ranks(x), average_ranks(y));
}

inline double spearman(const VariableVector& x, const VariableVector& y) {
    return spearman(x.values, y.values);
}

inline double z_score(double sel_mean, double city_mean, double city_sd) {
    if (city_sd <= 0.0) throw numeric_error("z_score: nonpositive standard deviation");
    return (sel_mean - city_mean) / city_sd;
}

// ---------------------------------------------------------------------------
// PCA first component over 4 standardized columns

struct PcaResult {
    std::array<double, 4> loadings;  // unit norm, POV loading >= 0
    std::vector<double> scores;      // standardized data x loadings, mean 0
    double eigenvalue = 0.0;
};

namespace detail {

// Cyclic Jacobi for a small symmetric matrix; deterministic sweep order.
template <std::size_t N>
inline void jacobi_eigen(std::array<std::array<double, N>, N> a,
                         std::array<double, N>& eigenvalues,
                         std::array<std::array<double, N>, N>& eigenvectors) {
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) eigenvectors[i][j] = (i == j) ? 1.0 : 0.0;

    const int max_sweeps = 10000;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t q = p + 1; q < N; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-12 * 1e-12) break;
        for (std::size_t p = 0; p < N; ++p) {
            for (std::size_t q = p + 1; q < N; ++q) {
                if (a[p][q] == 0.0) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < N; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < N; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < N; ++k) {
                    double vkp = eigenvectors[k][p], vkq = eigenvectors[k][q];
                    eigenvectors[k][p] = c * vkp - s * vkq;
                    eigenvectors[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if (sweep == max_sweeps) throw numeric_error("jacobi eigensolver did not converge");
    for (std::size_t i = 0; i < N; ++i) eigenvalues[i] = a[i][i];
}

} // namespace detail

// Columns in index order POV, SNAP, UNEMP, NOHS; the sign convention keys off
// column 0.
inline PcaResult pca_first_component(const std::array<VariableVector, 4>& columns) {
    const std::size_t n = columns[0].values.size();
    if (n < 5) throw numeric_error("pca_first_component needs at least 5 rows");
    for (const auto& col : columns)
        if (col.values.size() != n)
            throw numeric_error("pca_first_component: column length mismatch");

    // Standardize with sample mean/SD.
    std::array<std::vector<double>, 4> z;
    for (std::size_t c = 0; c < 4; ++c) {
        double m = mean(columns[c].values);
        double sd = std_dev(columns[c].values);
        if (sd == 0.0)
            throw numeric_error("pca_first_component: constant column " + columns[c].name);
        z[c].resize(n);
        for (std::size_t i = 0; i < n; ++i) z[c][i] = (columns[c].values[i] - m) / sd;
    }

    // 4x4 correlation matrix.
    std::array<std::array<double, 4>, 4> corr{};
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += z[a][i] * z[b][i];
            corr[a][b] = s / static_cast<double>(n - 1);
        }

    std::array<double, 4> evals;
    std::array<std::array<double, 4>, 4> evecs;
    detail::jacobi_eigen<4>(corr, evals, evecs);

    std::size_t top = 0;
    for (std::size_t i = 1; i < 4; ++i)
        if (evals[i] > evals[top]) top = i;

    PcaResult res;
    res.eigenvalue = evals[top];
    double norm = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        res.loadings[i] = evecs[i][top];
        norm += res.loadings[i] * res.loadings[i];
    }
    norm = std::sqrt(norm);
    double sign = res.loadings[0] < 0.0 ? -1.0 : 1.0;
    for (auto& l : res.loadings) l = l * sign / norm;

    res.scores.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < 4; ++c) s += z[c][i] * res.loadings[c];
        res.scores[i] = s;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Moran's I

// I = (n / S0) * sum_ij w_ij z_i z_j / sum_i z_i^2, z = x - mean(x).
inline double morans_i(const std::vector<double>& x, const geo::SpatialWeights& w) {
    if (x.size() != w.n) throw numeric_error("morans_i: length mismatch");
    if (x.size() < 2) throw numeric_error("morans_i needs at least 2 values");
    if (w.s0 <= 0.0) throw numeric_error("morans_i: weights have S0 = 0 (all islands)");
    double m = mean(x);
    double denom = 0.0;
    for (double v : x) denom += (v - m) * (v - m);
    if (denom == 0.0) throw numeric_error("morans_i: constant variable");
    double num = 0.0;
    for (std::size_t i = 0; i < w.n; ++i)
        for (const auto& nb : w.neighbors[i])
            num += nb.weight * (x[i] - m) * (x[nb.index] - m);
    return static_cast<double>(w.n) / w.s0 * num / denom;
}

inline double morans_i(const VariableVector& x, const geo::SpatialWeights& w) {
    return morans_i(x.values, w);
}

// ---------------------------------------------------------------------------
// Fisher-Jenks natural breaks (exact DP)

namespace detail {

// Within-class sum of squared deviations for sorted[i..j], via prefix sums.
struct SsdTable {
    std::vector<double> prefix, prefix_sq;

    explicit SsdTable(const std::vector<double>& sorted)
        : prefix(sorted.size() + 1, 0.0), prefix_sq(sorted.size() + 1, 0.0) {
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            prefix[i + 1] = prefix[i] + sorted[i];
            prefix_sq[i + 1] = prefix_sq[i] + sorted[i] * sorted[i];
        }
    }
    double operator()(std::size_t i, std::size_t j) const {  // inclusive range
        double sum = prefix[j + 1] - prefix[i];
        double sum_sq = prefix_sq[j + 1] - prefix_sq[i];
        double cnt = static_cast<double>(j - i + 1);
        return sum_sq - sum * sum / cnt;
    }
};

} // namespace detail

// Breaks are the maximum value of each class except the last (k-1 values).
// Ties between equal-SSD partitions resolve toward the smallest first class.
inline std::vector<double> jenks_breaks(std::vector<double> xs, std::size_t k) {
    if (k < 1) throw numeric_error("jenks_breaks: k must be >= 1");
    std::sort(xs.begin(), xs.end());
    std::size_t distinct = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (i == 0 || xs[i] != xs[i - 1]) ++distinct;
    if (distinct < k)
        throw numeric_error("jenks_breaks: fewer distinct values than classes");

    const std::size_t n = xs.size();
    detail::SsdTable ssd(xs);

    // suffix[c][i]: optimal SSD partitioning xs[i..n-1] into c classes.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> suffix(k + 1, std::vector<double>(n + 1, inf));
    for (std::size_t i = 0; i < n; ++i) suffix[1][i] = ssd(i, n - 1);
    for (std::size_t c = 2; c <= k; ++c)
        for (std::size_t i = 0; i + c <= n; ++i) {
            double best = inf;
            for (std::size_t j = i; j + c - 1 < n; ++j) {
                double cost = ssd(i, j) + suffix[c - 1][j + 1];
                if (cost < best) best = cost;
            }
            suffix[c][i] = best;
        }

    // Reconstruct left to right, taking the shortest class achieving the
    // optimum at each step.
    std::vector<double> breaks;
    std::size_t start = 0;
    for (std::size_t c = k; c > 1; --c) {
        for (std::size_t j = start; j + c - 1 < n; ++j) {
            if (ssd(start, j) + suffix[c - 1][j + 1] == suffix[c][start]) {
                breaks.push_back(xs[j]);
                start = j + 1;
                break;
            }
        }
    }
    return breaks;
}

inline double jenks_total_ssd(std::vector<double> xs, const std::vector<double>& breaks) {
    std::sort(xs.begin(), xs.end());
    detail::SsdTable ssd(xs);
    double total = 0.0;
    std::size_t start = 0;
    for (double b : breaks) {
        std::size_t end = start;
        while (end + 1 < xs.size() && xs[end + 1] <= b) ++end;
        // classes are contiguous; the break is the class maximum
        while (end + 1 < xs.size() && xs[end + 1] == b) ++end;
        total += ssd(start, end);
        start = end + 1;
    }
    if (start < xs.size()) total += ssd(start, xs.size() - 1);
    return total;
}

} // namespace atlas::stats

#endif // ATLAS_STATS_HPP
