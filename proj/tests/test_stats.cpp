#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include "helpers.hpp"

using namespace atlas;
using namespace atlas::stats;
using Catch::Approx;

TEST_CASE("median basics") {
    CHECK(median({5.0}) == 5.0);
    CHECK(median({1.0, 2.0, 3.0, 4.0}) == 2.5);
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK_THROWS_AS(median({}), numeric_error);
}

TEST_CASE("median matches full-sort oracle on random data") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> xs(1000);
    for (auto& x : xs) x = u(rng);

    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    double oracle = (sorted[499] + sorted[500]) / 2.0;
    CHECK(median(xs) == oracle);

    xs.push_back(u(rng));
    sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    CHECK(median(xs) == sorted[500]);
}

TEST_CASE("std_dev uses the n-1 divisor") {
    CHECK(std_dev({1.0, 1.0, 1.0}) == 0.0);
    CHECK(std_dev({0.0, 2.0}) == Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std_dev({2, 4, 4, 4, 5, 5, 7, 9}) == Approx(std::sqrt(32.0 / 7.0)).epsilon(1e-12));
    CHECK_THROWS_AS(std_dev({1.0}), numeric_error);
}

TEST_CASE("pearson") {
    std::vector<double> x = {1, 2, 3};
    CHECK(pearson(x, x) == Approx(1.0).margin(1e-12));
    CHECK(pearson(x, {1, 4, 9}) == Approx(8.0 / std::sqrt(2.0 * 294.0 / 9.0)).margin(1e-12));
    CHECK(pearson(x, {-1, -2, -3}) == Approx(-1.0).margin(1e-12));
    CHECK_THROWS_AS(pearson(x, {2, 2, 2}), numeric_error);
    CHECK_THROWS_AS(pearson({1, 2}, {1, 2}), numeric_error);
}

TEST_CASE("pearson is invariant under positive affine maps") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::vector<double> x(40), y(40);
    for (std::size_t i = 0; i < 40; ++i) {
        x[i] = u(rng);
        y[i] = 0.5 * x[i] + u(rng);
    }
    double base = pearson(x, y);
    std::vector<double> xs = x;
    for (auto& v : xs) v = 3.25 * v + 17.0;
    CHECK(pearson(xs, y) == Approx(base).margin(1e-12));
}

TEST_CASE("spearman") {
    std::vector<double> x = {1, 2, 3};
    CHECK(spearman(x, {1, 4, 9}) == Approx(1.0).margin(1e-12));
    // ties: ranks x = (1.5, 1.5, 3), y = (1, 3, 2); pearson of those ranks is
    // exactly 0 (cross products 0.5 - 0.5 + 0), confirmed by scipy.stats.spearmanr
    CHECK(spearman({1, 1, 2}, {3, 5, 4}) == Approx(0.0).margin(1e-12));
}

TEST_CASE("spearman is invariant under strictly monotone maps") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    std::vector<double> x(30), y(30);
    for (std::size_t i = 0; i < 30; ++i) {
        x[i] = u(rng);
        y[i] = u(rng);
    }
    double base = spearman(x, y);
    std::vector<double> xc = x;
    for (auto& v : xc) v = std::exp(v);
    CHECK(spearman(xc, y) == Approx(base).margin(1e-12));
}

TEST_CASE("z_score") {
    CHECK(z_score(4.0, 4.0, 1.0) == 0.0);
    CHECK(z_score(10.0, 4.0, 3.0) == 2.0);
    CHECK(z_score(1.0, 4.0, 3.0) == -1.0);
    CHECK_THROWS_AS(z_score(1.0, 2.0, 0.0), numeric_error);
}

namespace {

std::array<VariableVector, 4> make_columns(const std::vector<std::vector<double>>& cols) {
    return {VariableVector{"c0", cols[0]}, VariableVector{"c1", cols[1]},
            VariableVector{"c2", cols[2]}, VariableVector{"c3", cols[3]}};
}

} // namespace

TEST_CASE("pca: four identical columns") {
    std::vector<double> x = {1, 2, 3, 4, 5, 9};
    auto res = pca_first_component(make_columns({x, x, x, x}));
    CHECK(res.eigenvalue == Approx(4.0).margin(1e-10));
    for (double l : res.loadings) CHECK(l == Approx(0.5).margin(1e-10));
    double sum = 0.0;
    for (double s : res.scores) sum += s;
    CHECK(sum == Approx(0.0).margin(1e-9));
}

TEST_CASE("pca: two orthogonal pairs concentrate on one pair") {
    // x symmetric around 0, y = x^2: sample covariance is exactly 0
    std::vector<double> x = {-2, -1, 0, 0, 1, 2};
    std::vector<double> y = {4, 1, 0, 0, 1, 4};
    auto res = pca_first_component(make_columns({x, x, y, y}));
    CHECK(res.eigenvalue == Approx(2.0).margin(1e-10));
    double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    bool first_pair = std::abs(std::abs(res.loadings[0]) - inv_sqrt2) < 1e-9 &&
                      std::abs(std::abs(res.loadings[1]) - inv_sqrt2) < 1e-9 &&
                      std::abs(res.loadings[2]) < 1e-9 && std::abs(res.loadings[3]) < 1e-9;
    bool second_pair = std::abs(std::abs(res.loadings[2]) - inv_sqrt2) < 1e-9 &&
                       std::abs(std::abs(res.loadings[3]) - inv_sqrt2) < 1e-9 &&
                       std::abs(res.loadings[0]) < 1e-9 && std::abs(res.loadings[1]) < 1e-9;
    CHECK((first_pair || second_pair));
}

TEST_CASE("pca matches dense eigensolver oracle on random matrices") {
    std::mt19937 rng(123);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<double>> cols(4, std::vector<double>(50));
        for (std::size_t i = 0; i < 50; ++i) {
            double f = g(rng);
            for (int c = 0; c < 4; ++c) cols[c][i] = 0.7 * f + g(rng);
        }
        auto res = pca_first_component(make_columns(cols));

        // oracle: standardize, correlation matrix, Eigen's solver
        Eigen::MatrixXd z(50, 4);
        for (int c = 0; c < 4; ++c) {
            double m = mean(cols[c]);
            double sd = std_dev(cols[c]);
            for (int i = 0; i < 50; ++i) z(i, c) = (cols[c][i] - m) / sd;
        }
        Eigen::Matrix4d corr = z.transpose() * z / 49.0;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(corr);
        double top_eval = es.eigenvalues()(3);
        Eigen::Vector4d top_evec = es.eigenvectors().col(3);
        if (top_evec(0) < 0) top_evec = -top_evec;

        CHECK(res.eigenvalue == Approx(top_eval).margin(1e-8));
        for (int c = 0; c < 4; ++c)
            CHECK(res.loadings[c] == Approx(top_evec(c)).margin(1e-8));
        CHECK(res.loadings[0] >= 0.0);
        CHECK(std_dev(res.scores) * std_dev(res.scores) == Approx(res.eigenvalue).margin(1e-8));
    }
}

TEST_CASE("pca loadings are permutation-consistent") {
    std::mt19937 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::vector<double>> cols(4, std::vector<double>(30));
    for (std::size_t i = 0; i < 30; ++i) {
        double f = g(rng);
        for (int c = 0; c < 4; ++c) cols[c][i] = f + 0.5 * g(rng);
    }
    auto base = pca_first_component(make_columns(cols));
    auto permuted = pca_first_component(make_columns({cols[2], cols[0], cols[3], cols[1]}));
    // map permuted loadings back: permuted order was (2,0,3,1)
    std::array<double, 4> back = {permuted.loadings[1], permuted.loadings[3],
                                  permuted.loadings[0], permuted.loadings[2]};
    double sign = back[0] * base.loadings[0] < 0 ? -1.0 : 1.0;
    for (int c = 0; c < 4; ++c)
        CHECK(back[c] * sign == Approx(base.loadings[c]).margin(1e-9));
}

TEST_CASE("pca rejects constant columns and short input") {
    std::vector<double> x = {1, 2, 3, 4, 5, 6};
    std::vector<double> c(6, 3.0);
    CHECK_THROWS_AS(pca_first_component(make_columns({x, x, x, c})), numeric_error);
    std::vector<double> s = {1, 2, 3, 4};
    CHECK_THROWS_AS(pca_first_component(make_columns({s, s, s, s})), numeric_error);
}

TEST_CASE("morans_i: 2x2 rook checkerboard is -1") {
    auto city = testutil::grid_city(2, 2);
    auto w = geo::row_standardize(geo::contiguity_weights(city, geo::ContiguityScheme::rook));
    CHECK(morans_i({1.0, 0.0, 0.0, 1.0}, w) == Approx(-1.0).margin(1e-12));
}

TEST_CASE("morans_i affine invariance") {
    auto city = testutil::grid_city(4, 4);
    auto w = geo::row_standardize(geo::contiguity_weights(city, geo::ContiguityScheme::queen));
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::vector<double> x(16);
    for (auto& v : x) v = u(rng);
    double base = morans_i(x, w);
    for (int t = 0; t < 50; ++t) {
        double a = u(rng);
        if (a == 0.0) a = 1.0;
        double c = u(rng);
        std::vector<double> y = x;
        for (auto& v : y) v = a * v + c;
        CHECK(morans_i(y, w) == Approx(base).margin(1e-10));
    }
}

TEST_CASE("morans_i matches naive double-sum oracle on 6x6 queen lattice") {
    auto city = testutil::grid_city(6, 6);
    auto w = geo::row_standardize(geo::contiguity_weights(city, geo::ContiguityScheme::queen));
    auto dense = testutil::dense_weights(w);
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(36);
        for (auto& v : x) v = u(rng);
        CHECK(morans_i(x, w) == Approx(testutil::naive_morans_i(x, dense)).margin(1e-10));
    }
}

TEST_CASE("morans_i permutation mean approximates -1/(n-1)") {
    auto city = testutil::grid_city(5, 5);
    auto w = geo::row_standardize(geo::contiguity_weights(city, geo::ContiguityScheme::queen));
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(25);
    for (auto& v : x) v = u(rng);

    const int trials = 10000;
    double sum = 0.0, sum_sq = 0.0;
    std::vector<double> perm = x;
    for (int t = 0; t < trials; ++t) {
        std::shuffle(perm.begin(), perm.end(), rng);
        double i = morans_i(perm, w);
        sum += i;
        sum_sq += i * i;
    }
    double m = sum / trials;
    double sd = std::sqrt((sum_sq - sum * sum / trials) / (trials - 1));
    double se = sd / std::sqrt(static_cast<double>(trials));
    CHECK(std::abs(m - (-1.0 / 24.0)) < 3.0 * se);
}

TEST_CASE("morans_i error paths") {
    auto city = testutil::grid_city(2, 2);
    auto w = geo::contiguity_weights(city, geo::ContiguityScheme::rook);
    CHECK_THROWS_AS(morans_i({1.0, 1.0, 1.0, 1.0}, w), numeric_error);
    geo::SpatialWeights empty;
    empty.n = 4;
    empty.neighbors.resize(4);
    CHECK_THROWS_AS(morans_i({1.0, 2.0, 3.0, 4.0}, empty), numeric_error);
}

TEST_CASE("jenks: trivial and worked cases") {
    CHECK(jenks_breaks({1, 2, 3}, 1).empty());
    auto b = jenks_breaks({1, 2, 3, 10, 11, 12}, 2);
    REQUIRE(b.size() == 1);
    CHECK(b[0] == 3.0);
    CHECK_THROWS_AS(jenks_breaks({1, 1, 2}, 3), numeric_error);
}

TEST_CASE("jenks equals exhaustive-partition minimum") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::uniform_int_distribution<std::size_t> nd(4, 12), kd(1, 4);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = nd(rng);
        std::size_t k = std::min(kd(rng), n);
        std::vector<double> xs(n);
        for (auto& x : xs) x = u(rng);
        auto breaks = jenks_breaks(xs, k);
        REQUIRE(breaks.size() == k - 1);
        CHECK(jenks_total_ssd(xs, breaks) ==
              Approx(testutil::exhaustive_min_ssd(xs, k)).margin(1e-9));
    }
}

TEST_CASE("jenks local optimality: shifting a boundary never helps") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    std::vector<double> xs(40);
    for (auto& x : xs) x = u(rng);
    std::sort(xs.begin(), xs.end());
    const std::size_t k = 5;
    auto breaks = jenks_breaks(xs, k);
    double best = jenks_total_ssd(xs, breaks);

    // class end positions in the sorted array
    std::vector<std::size_t> ends;
    std::size_t pos = 0;
    for (double b : breaks) {
        while (pos + 1 < xs.size() && xs[pos + 1] <= b) ++pos;
        ends.push_back(pos);
        ++pos;
    }
    auto ssd_of = [&](const std::vector<std::size_t>& e) {
        std::vector<double> bb;
        for (std::size_t i : e) bb.push_back(xs[i]);
        return jenks_total_ssd(xs, bb);
    };
    for (std::size_t bi = 0; bi < ends.size(); ++bi) {
        for (int delta : {-1, 1}) {
            auto moved = ends;
            long long ni = static_cast<long long>(moved[bi]) + delta;
            if (ni < 0 || ni + 1 >= static_cast<long long>(xs.size())) continue;
            moved[bi] = static_cast<std::size_t>(ni);
            bool valid = true;
            for (std::size_t i = 1; i < moved.size(); ++i)
                if (moved[i] <= moved[i - 1]) valid = false;
            if (!valid) continue;
            CHECK(ssd_of(moved) >= best - 1e-9);
        }
    }
}

TEST_CASE("kernels are deterministic") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> xs(200);
    for (auto& x : xs) x = u(rng);
    CHECK(median(xs) == median(xs));
    CHECK(std_dev(xs) == std_dev(xs));
    CHECK(jenks_breaks(xs, 5) == jenks_breaks(xs, 5));
}
