#include "fabricvision/evaluation.hpp"

#include <algorithm>
#include <numeric>

namespace fabricvision {

namespace {

constexpr int kMaxAlignClasses = 8;  // exhaustive search bound

void check_pair(const LabelMap& pred, const LabelMap& truth, int classes) {
    if (pred.width != truth.width || pred.height != truth.height) {
        throw ArgumentError("label maps have different dimensions");
    }
    if (classes < 1) throw ArgumentError("class count must be >= 1");
    for (int v : pred.labels) {
        if (v < 0 || v >= classes) throw ArgumentError("prediction label out of range");
    }
    for (int v : truth.labels) {
        if (v < 0 || v >= classes) throw ArgumentError("truth label out of range");
    }
}

}  // namespace

ConfusionMatrix confusion(const LabelMap& pred, const LabelMap& truth, int classes) {
    check_pair(pred, truth, classes);
    ConfusionMatrix cm;
    cm.classes = classes;
    cm.counts.assign(static_cast<std::size_t>(classes) * classes, 0);
    for (std::size_t k = 0; k < pred.labels.size(); ++k) {
        ++cm.counts[static_cast<std::size_t>(truth.labels[k]) * classes + pred.labels[k]];
    }
    cm.total = static_cast<long long>(pred.labels.size());
    return cm;
}

LabelMap align_labels(const LabelMap& pred, const LabelMap& truth, int classes) {
    check_pair(pred, truth, classes);
    if (classes > kMaxAlignClasses) {
        throw ArgumentError("align_labels: more than 8 classes not supported");
    }

    const ConfusionMatrix cm = confusion(pred, truth, classes);

    // perm[old_pred_label] = new label. next_permutation enumerates in
    // lexicographic order, so keeping only strictly better trace values
    // retains the lexicographically smallest maximizer.
    std::vector<int> perm(static_cast<std::size_t>(classes));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    long long best_trace = -1;
    do {
        long long trace = 0;
        for (int p = 0; p < classes; ++p) {
            trace += cm.at(perm[static_cast<std::size_t>(p)], p);
        }
        if (trace > best_trace) {
            best_trace = trace;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    LabelMap out = pred;
    for (int& v : out.labels) v = best[static_cast<std::size_t>(v)];
    return out;
}

double kappa(const ConfusionMatrix& cm) {
    if (cm.total <= 0) throw ArgumentError("kappa: empty confusion matrix");
    const double n = static_cast<double>(cm.total);

    double diagonal = 0.0;
    double marginal = 0.0;
    for (int i = 0; i < cm.classes; ++i) {
        diagonal += static_cast<double>(cm.at(i, i));
        double row = 0.0, col = 0.0;
        for (int j = 0; j < cm.classes; ++j) {
            row += static_cast<double>(cm.at(i, j));
            col += static_cast<double>(cm.at(j, i));
        }
        marginal += row * col;
    }

    const double denom = n * n - marginal;
    if (denom == 0.0) {
        // All mass in one row/column pair: perfect if it sits on the diagonal.
        return diagonal == n ? 100.0 : 0.0;
    }
    return (n * diagonal - marginal) / denom * 100.0;
}

double car(const ConfusionMatrix& cm) {
    if (cm.total <= 0) throw ArgumentError("car: empty confusion matrix");
    double diagonal = 0.0;
    for (int i = 0; i < cm.classes; ++i) diagonal += static_cast<double>(cm.at(i, i));
    return diagonal / static_cast<double>(cm.total) * 100.0;
}

}  // namespace fabricvision
