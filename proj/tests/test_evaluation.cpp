#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fabricvision/evaluation.hpp"
#include "oracles.hpp"

using namespace fabricvision;

namespace {

ConfusionMatrix make_cm(int classes, std::vector<long long> counts) {
    ConfusionMatrix cm;
    cm.classes = classes;
    cm.counts = std::move(counts);
    cm.total = 0;
    for (long long v : cm.counts) cm.total += v;
    return cm;
}

LabelMap map_from(int width, int height, const std::vector<int>& labels) {
    LabelMap m(width, height);
    m.labels = labels;
    return m;
}

}  // namespace

TEST_CASE("confusion counts") {
    const LabelMap truth = map_from(5, 2, {0, 0, 0, 0, 0, 1, 1, 1, 1, 1});

    const ConfusionMatrix same = confusion(truth, truth, 2);
    CHECK(same.at(0, 0) == 5);
    CHECK(same.at(1, 1) == 5);
    CHECK(same.at(0, 1) == 0);
    CHECK(same.at(1, 0) == 0);

    LabelMap inverted = truth;
    for (int& v : inverted.labels) v = 1 - v;
    const ConfusionMatrix crossed = confusion(inverted, truth, 2);
    CHECK(crossed.at(0, 0) == 0);
    CHECK(crossed.at(0, 1) == 5);
    CHECK(crossed.at(1, 0) == 5);
    CHECK(crossed.at(1, 1) == 0);

    // Hand-tallied 10-pixel, 3-class case.
    const LabelMap t = map_from(5, 2, {0, 0, 1, 1, 2, 2, 0, 1, 2, 0});
    const LabelMap p = map_from(5, 2, {0, 1, 1, 1, 2, 0, 0, 2, 2, 0});
    const ConfusionMatrix cm = confusion(p, t, 3);
    CHECK(cm.at(0, 0) == 3);
    CHECK(cm.at(0, 1) == 1);
    CHECK(cm.at(0, 2) == 0);
    CHECK(cm.at(1, 0) == 0);
    CHECK(cm.at(1, 1) == 2);
    CHECK(cm.at(1, 2) == 1);
    CHECK(cm.at(2, 0) == 1);
    CHECK(cm.at(2, 1) == 0);
    CHECK(cm.at(2, 2) == 2);
    CHECK(cm.total == 10);
}

TEST_CASE("kappa and car hand values") {
    const ConfusionMatrix perfect = make_cm(2, {5, 0, 0, 5});
    CHECK(kappa(perfect) == 100.0);
    CHECK(car(perfect) == 100.0);

    const ConfusionMatrix inverted = make_cm(2, {0, 5, 5, 0});
    CHECK(kappa(inverted) == -100.0);
    CHECK(car(inverted) == 0.0);

    const ConfusionMatrix mixed = make_cm(2, {40, 10, 5, 45});
    CHECK(kappa(mixed) == doctest::Approx(70.0).epsilon(1e-12));
    CHECK(car(mixed) == doctest::Approx(85.0).epsilon(1e-12));
}

TEST_CASE("degenerate single-cell table") {
    CHECK(kappa(make_cm(1, {7})) == 100.0);
    CHECK(car(make_cm(1, {7})) == 100.0);
    CHECK_THROWS_AS(kappa(make_cm(2, {0, 0, 0, 0})), ArgumentError);
    CHECK_THROWS_AS(car(make_cm(2, {0, 0, 0, 0})), ArgumentError);
}

TEST_CASE("kappa/car equal the literal formula on random tables") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 2 + static_cast<int>(gen() % 3);
        std::vector<long long> counts(static_cast<std::size_t>(m) * m);
        for (long long& v : counts) v = static_cast<long long>(gen() % 60);
        if (std::accumulate(counts.begin(), counts.end(), 0LL) == 0) counts[0] = 1;
        const ConfusionMatrix cm = make_cm(m, counts);
        CHECK(kappa(cm) == doctest::Approx(oracles::kappa_literal(cm)).epsilon(1e-12));
        CHECK(car(cm) == doctest::Approx(oracles::car_literal(cm)).epsilon(1e-12));
    }
}

TEST_CASE("metrics are invariant under a simultaneous class permutation") {
    std::mt19937_64 gen(17);
    LabelMap truth(16, 16), pred(16, 16);
    for (auto& v : truth.labels) v = static_cast<int>(gen() % 3);
    for (auto& v : pred.labels) v = static_cast<int>(gen() % 3);

    const ConfusionMatrix base = confusion(pred, truth, 3);
    const int perm[3] = {2, 0, 1};
    LabelMap truth_p = truth, pred_p = pred;
    for (int& v : truth_p.labels) v = perm[v];
    for (int& v : pred_p.labels) v = perm[v];
    const ConfusionMatrix permuted = confusion(pred_p, truth_p, 3);

    CHECK(kappa(base) == doctest::Approx(kappa(permuted)).epsilon(1e-12));
    CHECK(car(base) == doctest::Approx(car(permuted)).epsilon(1e-12));
}

TEST_CASE("kappa concentrates near zero for independent labelings") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::mt19937_64 gen(900 + seed);
        LabelMap truth(100, 100), pred(100, 100);
        for (auto& v : truth.labels) v = static_cast<int>(gen() % 2);
        for (auto& v : pred.labels) v = static_cast<int>(gen() % 2);
        CHECK(std::abs(kappa(confusion(pred, truth, 2))) < 5.0);
    }
}

TEST_CASE("align_labels: identity, swap, exhaustive optimality") {
    const LabelMap truth = map_from(4, 2, {0, 0, 1, 1, 2, 2, 0, 1});

    const LabelMap same = align_labels(truth, truth, 3);
    CHECK(same.labels == truth.labels);

    LabelMap swapped = truth;
    for (int& v : swapped.labels) v = v == 0 ? 1 : (v == 1 ? 0 : v);
    const LabelMap restored = align_labels(swapped, truth, 3);
    CHECK(restored.labels == truth.labels);

    // Random 3-class pair: the chosen permutation's trace must beat or tie
    // every permutation, checked exhaustively on the raw confusion counts.
    std::mt19937_64 gen(5);
    LabelMap t(16, 16), p(16, 16);
    for (auto& v : t.labels) v = static_cast<int>(gen() % 3);
    for (auto& v : p.labels) v = static_cast<int>(gen() % 3);

    const LabelMap aligned = align_labels(p, t, 3);
    long long aligned_trace = 0;
    {
        const ConfusionMatrix cm = confusion(aligned, t, 3);
        for (int i = 0; i < 3; ++i) aligned_trace += cm.at(i, i);
    }
    const ConfusionMatrix raw = confusion(p, t, 3);
    std::vector<int> perm = {0, 1, 2};
    do {
        long long trace = 0;
        for (int old_label = 0; old_label < 3; ++old_label) {
            trace += raw.at(perm[static_cast<std::size_t>(old_label)], old_label);
        }
        CHECK(aligned_trace >= trace);
    } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("align_labels ties resolve to the lexicographically smallest permutation") {
    // pred constant 0, truth split 0/1: permutations (0,1) and (1,0) tie.
    const LabelMap truth = map_from(2, 1, {0, 1});
    const LabelMap pred = map_from(2, 1, {0, 0});
    const LabelMap aligned = align_labels(pred, truth, 2);
    CHECK(aligned.labels == std::vector<int>{0, 0});
}

TEST_CASE("evaluation argument errors") {
    const LabelMap a(4, 4, 0);
    const LabelMap b(5, 4, 0);
    CHECK_THROWS_AS(confusion(a, b, 2), ArgumentError);
    CHECK_THROWS_AS(align_labels(a, b, 2), ArgumentError);

    LabelMap out_of_range(4, 4, 0);
    out_of_range.labels[3] = 7;
    CHECK_THROWS_AS(confusion(out_of_range, a, 2), ArgumentError);

    const LabelMap wide(4, 4, 0);
    CHECK_THROWS_AS(align_labels(wide, wide, 9), ArgumentError);
}
