#pragma once

#include <vector>

#include "fabricvision/image.hpp"

namespace fabricvision {

// Pixel-count cross tabulation: rows index the truth class, columns the
// predicted class.
struct ConfusionMatrix {
    int classes = 0;
    std::vector<long long> counts;  // classes * classes, row-major
    long long total = 0;

    long long at(int truth, int pred) const {
        return counts[static_cast<std::size_t>(truth) * classes + pred];
    }
};

// Relabels `pred` with the permutation of 0..M-1 that maximizes agreement
// with `truth` (sum of confusion diagonal), found by exhaustive search; ties
// resolve to the lexicographically smallest permutation. Cluster ids are
// arbitrary, truth classes are not, so scoring aligns first. M <= 8.
LabelMap align_labels(const LabelMap& pred, const LabelMap& truth, int classes);

ConfusionMatrix confusion(const LabelMap& pred, const LabelMap& truth, int classes);

// Kappa coefficient as a percentage:
//   KC = (N * sum_i N_ii - sum_i N_i+ * N_+i) / (N^2 - sum_i N_i+ * N_+i) * 100
// A single-class degenerate table (zero denominator) scores 100 when the
// diagonal holds every pixel, else 0.
double kappa(const ConfusionMatrix& cm);

// Classification accuracy ratio: percentage of diagonal pixels.
double car(const ConfusionMatrix& cm);

}  // namespace fabricvision
