#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fabricvision/clustering.hpp"
#include "fixtures.hpp"

using namespace fabricvision;

namespace {

FeatureMatrix matrix_1d(const std::vector<double>& values) {
    FeatureMatrix X;
    X.n = static_cast<int>(values.size());
    X.d = 1;
    X.width = X.n;
    X.height = 1;
    X.values = values;
    return X;
}

FeatureMatrix random_matrix(int n, int d, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    FeatureMatrix X;
    X.n = n;
    X.d = d;
    X.width = n;
    X.height = 1;
    X.values.resize(static_cast<std::size_t>(n) * d);
    for (double& v : X.values) v = dist(gen);
    return X;
}

std::vector<int> hard_labels(const ClusterModel& model) {
    return labels_from_membership(model, model.samples, 1).labels;
}

const std::vector<double> kTwoBlobs = {0.0, 0.0, 0.0, 10.0, 10.0, 10.0};

FcmConfig two_blob_config() {
    FcmConfig cfg;
    cfg.clusters = 2;
    cfg.fuzzifier = 2.0;
    cfg.epsilon = 1e-6;
    cfg.max_iter = 200;
    cfg.seed = 3;
    return cfg;
}

}  // namespace

TEST_CASE("extract_features: constant image standardizes to zeros") {
    const FeatureMatrix X = extract_features(GrayImage(6, 4, 200.0), FeatureMode::intensity);
    CHECK(X.d == 1);
    CHECK(X.n == 24);
    for (double v : X.values) CHECK(v == 0.0);
}

TEST_CASE("extract_features: two-pixel image maps to -1 and +1") {
    GrayImage img(2, 1);
    img.at(0, 0) = 0.0;
    img.at(1, 0) = 255.0;
    const FeatureMatrix X = extract_features(img, FeatureMode::intensity);
    CHECK(X.at(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(X.at(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("extract_features: sample index maps row-major to pixels") {
    GrayImage img(3, 2);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 3; ++x) img.at(x, y) = 10.0 * y + x;
    const FeatureMatrix X = extract_features(img, FeatureMode::intensity);
    // Standardization is affine and increasing, so ordering identifies pixels.
    for (int k = 1; k < X.n; ++k) {
        const int x0 = (k - 1) % X.width, y0 = (k - 1) / X.width;
        const int x1 = k % X.width, y1 = k / X.width;
        CHECK((img.at(x1, y1) > img.at(x0, y0)) == (X.at(k, 0) > X.at(k - 1, 0)));
    }
}

TEST_CASE("extract_features: local-stats mode has three dimensions") {
    const FeatureMatrix X =
        extract_features(fixtures::random_image(8, 8, 17), FeatureMode::intensity_local_stats);
    CHECK(X.d == 3);
    CHECK(X.n == 64);
    for (double v : X.values) CHECK(std::isfinite(v));
}

TEST_CASE("fcm separates two blobs") {
    const FeatureMatrix X = matrix_1d(kTwoBlobs);
    const ClusterModel model = fcm_fit(X, two_blob_config());

    const double c0 = model.center_at(0, 0);
    const double c1 = model.center_at(1, 0);
    const double lo = std::min(c0, c1), hi = std::max(c0, c1);
    CHECK(std::abs(lo - 0.0) <= 1e-3);
    CHECK(std::abs(hi - 10.0) <= 1e-3);

    const std::vector<int> labels = hard_labels(model);
    CHECK(labels[0] == labels[1]);
    CHECK(labels[1] == labels[2]);
    CHECK(labels[3] == labels[4]);
    CHECK(labels[4] == labels[5]);
    CHECK(labels[0] != labels[3]);

    // Fixed-point verification: recomputing the center update from the final
    // memberships moves the centers by at most the stopping slack.
    for (int i = 0; i < 2; ++i) {
        double num = 0.0, den = 0.0;
        for (int k = 0; k < X.n; ++k) {
            const double w = model.u(i, k) * model.u(i, k);
            num += w * X.at(k, 0);
            den += w;
        }
        CHECK(std::abs(num / den - model.center_at(i, 0)) <= 1e-3);
    }
}

TEST_CASE("kfcm recovers the same partition on the two blobs") {
    const FeatureMatrix X = matrix_1d(kTwoBlobs);
    const ClusterModel classic = fcm_fit(X, two_blob_config());
    const ClusterModel kernel = kfcm_fit(X, two_blob_config(), KernelSpec{5.0});

    const std::vector<int> a = hard_labels(classic);
    const std::vector<int> b = hard_labels(kernel);
    const bool same = std::equal(a.begin(), a.end(), b.begin());
    const bool flipped = std::equal(a.begin(), a.end(), b.begin(),
                                    [](int x, int y) { return x == 1 - y; });
    CHECK((same || flipped));
}

TEST_CASE("kfcm with a huge bandwidth approaches the classic partition") {
    const FeatureMatrix X = matrix_1d(kTwoBlobs);
    const ClusterModel classic = fcm_fit(X, two_blob_config());
    const ClusterModel kernel = kfcm_fit(X, two_blob_config(), KernelSpec{1e6});

    const std::vector<int> a = hard_labels(classic);
    const std::vector<int> b = hard_labels(kernel);
    const bool same = std::equal(a.begin(), a.end(), b.begin());
    const bool flipped = std::equal(a.begin(), a.end(), b.begin(),
                                    [](int x, int y) { return x == 1 - y; });
    CHECK((same || flipped));
}

TEST_CASE("coincident sample and center triggers the singularity rule") {
    const FeatureMatrix X = matrix_1d({0.0, 10.0});
    FcmConfig cfg = two_blob_config();
    cfg.max_iter = 1;

    // Crisp initial memberships put the centers exactly on the samples.
    const std::vector<double> init = {1.0, 0.0, 0.0, 1.0};
    const ClusterModel classic = fcm_fit_with_init(X, cfg, init);
    CHECK(classic.u(0, 0) == 1.0);
    CHECK(classic.u(1, 0) == 0.0);
    CHECK(classic.u(1, 1) == 1.0);

    const ClusterModel kernel = kfcm_fit_with_init(X, cfg, KernelSpec{3.0}, init);
    CHECK(kernel.u(0, 0) == 1.0);  // K(x, v) = 1 means 1 - K below the floor
    CHECK(kernel.u(1, 1) == 1.0);
}

TEST_CASE("membership columns stay stochastic at every iteration") {
    const FeatureMatrix X = random_matrix(40, 2, 5);
    FcmConfig cfg;
    cfg.clusters = 3;
    cfg.epsilon = 1e-9;
    cfg.max_iter = 30;

    const IterationObserver check_columns = [&](const FitIteration& it) {
        for (int k = 0; k < X.n; ++k) {
            double sum = 0.0;
            for (int i = 0; i < cfg.clusters; ++i) {
                const double u = (*it.membership)[static_cast<std::size_t>(i) * X.n + k];
                CHECK(u >= 0.0);
                CHECK(u <= 1.0);
                sum += u;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-9);
        }
    };
    fcm_fit(X, cfg, check_columns);
    kfcm_fit(X, cfg, KernelSpec{1.0}, check_columns);
}

TEST_CASE("objective history is non-increasing over 20 seeds") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const FeatureMatrix X = random_matrix(60, 2, 1000 + seed);
        FcmConfig cfg;
        cfg.clusters = 3;
        cfg.epsilon = 1e-7;
        cfg.max_iter = 60;
        cfg.seed = seed;

        for (const bool kernelized : {false, true}) {
            const ClusterModel model = kernelized ? kfcm_fit(X, cfg, KernelSpec{1.0})
                                                  : fcm_fit(X, cfg);
            for (std::size_t t = 1; t < model.objective_history.size(); ++t) {
                CHECK(model.objective_history[t] <= model.objective_history[t - 1] + 1e-9);
            }
        }
    }
}

TEST_CASE("fits are deterministic for a fixed seed") {
    const FeatureMatrix X = random_matrix(50, 2, 77);
    FcmConfig cfg;
    cfg.clusters = 4;
    cfg.seed = 9;

    const ClusterModel a = fcm_fit(X, cfg);
    const ClusterModel b = fcm_fit(X, cfg);
    CHECK(a.iterations_used == b.iterations_used);
    CHECK(a.centers == b.centers);
    CHECK(a.membership == b.membership);
    CHECK(a.objective_history == b.objective_history);

    const ClusterModel ka = kfcm_fit(X, cfg, KernelSpec{1.0});
    const ClusterModel kb = kfcm_fit(X, cfg, KernelSpec{1.0});
    CHECK(ka.centers == kb.centers);
    CHECK(ka.membership == kb.membership);
}

TEST_CASE("permuting the initial memberships permutes the clusters") {
    const FeatureMatrix X = random_matrix(30, 2, 13);
    FcmConfig cfg;
    cfg.clusters = 2;
    cfg.epsilon = 1e-8;
    cfg.max_iter = 100;

    const std::vector<double> init = random_membership(2, X.n, 21);
    std::vector<double> swapped(init.size());
    for (int k = 0; k < X.n; ++k) {
        swapped[static_cast<std::size_t>(0) * X.n + k] = init[static_cast<std::size_t>(1) * X.n + k];
        swapped[static_cast<std::size_t>(1) * X.n + k] = init[static_cast<std::size_t>(0) * X.n + k];
    }

    const ClusterModel a = fcm_fit_with_init(X, cfg, init);
    const ClusterModel b = fcm_fit_with_init(X, cfg, swapped);
    for (int k = 0; k < X.n; ++k) {
        CHECK(a.u(0, k) == doctest::Approx(b.u(1, k)).epsilon(1e-9));
        CHECK(a.u(1, k) == doctest::Approx(b.u(0, k)).epsilon(1e-9));
    }

    const std::vector<int> la = hard_labels(a);
    const std::vector<int> lb = hard_labels(b);
    for (int k = 0; k < X.n; ++k) CHECK(la[static_cast<std::size_t>(k)] == 1 - lb[static_cast<std::size_t>(k)]);
}

TEST_CASE("labels_from_membership argmax and tie handling") {
    ClusterModel model;
    model.clusters = 2;
    model.dim = 1;
    model.samples = 3;
    model.centers = {0.0, 1.0};
    // Columns: (0.7, 0.3), (0.5, 0.5), (0.2, 0.8).
    model.membership = {0.7, 0.5, 0.2, 0.3, 0.5, 0.8};

    const LabelMap map = labels_from_membership(model, 3, 1);
    CHECK(map.labels[0] == 0);
    CHECK(map.labels[1] == 0);  // tie goes to the smaller index
    CHECK(map.labels[2] == 1);

    // Identical columns give a constant map.
    model.membership = {0.6, 0.6, 0.6, 0.4, 0.4, 0.4};
    const LabelMap constant = labels_from_membership(model, 3, 1);
    for (int v : constant.labels) CHECK(v == 0);

    CHECK_THROWS_AS(labels_from_membership(model, 2, 2), ArgumentError);
}

TEST_CASE("configuration validation") {
    const FeatureMatrix X = matrix_1d({1.0, 2.0, 3.0});
    FcmConfig cfg;
    cfg.clusters = 4;
    CHECK_THROWS_AS(fcm_fit(X, cfg), ArgumentError);  // n < c

    cfg.clusters = 2;
    cfg.fuzzifier = 1.0;
    CHECK_THROWS_AS(fcm_fit(X, cfg), ArgumentError);

    cfg = FcmConfig{};
    cfg.clusters = 2;
    CHECK_THROWS_AS(kfcm_fit(X, cfg, KernelSpec{0.0}), ArgumentError);
}
