#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fabricvision/image.hpp"

namespace fabricvision {

// Per-pixel feature vectors in row-major (sample, dimension) layout.
// Sample k maps back to pixel (k mod width, k div width).
struct FeatureMatrix {
    int n = 0;  // sample count == width * height
    int d = 0;  // feature dimension
    int width = 0;
    int height = 0;
    std::vector<double> values;  // n * d

    double at(int k, int j) const { return values[static_cast<std::size_t>(k) * d + j]; }
};

enum class FeatureMode {
    intensity,             // d = 1: pixel value
    intensity_local_stats  // d = 3: value, 3x3 mean, 3x3 std (replicate borders)
};

// Gaussian RBF kernel K(x, y) = exp(-||x - y||^2 / sigma^2); K(x, x) = 1.
// The default bandwidth is sized for standardized features, whose between-
// cluster distances are O(1): much smaller values saturate 1 - K toward 1
// for every far sample, which flattens memberships and slows convergence.
struct KernelSpec {
    double sigma = 3.0;  // bandwidth in (standardized) feature units
};

struct FcmConfig {
    int clusters = 3;
    double fuzzifier = 2.0;      // m > 1
    double epsilon = 0.01;       // stop when max |delta U| < epsilon
    int max_iter = 100;
    std::uint64_t seed = 0;      // membership initialization seed
};

struct ClusterModel {
    int clusters = 0;
    int dim = 0;
    int samples = 0;
    std::vector<double> centers;     // clusters * dim, row-major
    std::vector<double> membership;  // clusters * samples, row-major (u[i*n + k])
    int iterations_used = 0;
    std::vector<double> objective_history;  // J after each membership update
    bool converged = false;

    double center_at(int i, int j) const { return centers[static_cast<std::size_t>(i) * dim + j]; }
    double u(int i, int k) const { return membership[static_cast<std::size_t>(i) * samples + k]; }
};

// Progress callback, invoked once per iteration after the membership update.
struct FitIteration {
    int iter = 0;                           // 1-based
    double objective = 0.0;
    double max_delta_u = 0.0;
    const std::vector<double>* membership;  // clusters * samples snapshot
    const std::vector<double>* centers;
};
using IterationObserver = std::function<void(const FitIteration&)>;

// Builds per-pixel features and standardizes each dimension to zero mean and
// unit (population) variance; dimensions with no spread are left at 0.
FeatureMatrix extract_features(const GrayImage& img, FeatureMode mode);

// Classic Euclidean fuzzy-c-means. Memberships are initialized uniformly at
// random (seeded) and column-normalized; centers come from the first center
// update. Deterministic for a fixed seed.
ClusterModel fcm_fit(const FeatureMatrix& X, const FcmConfig& cfg,
                     const IterationObserver& observer = nullptr);

// Kernelized fuzzy-c-means: minimizes sum_ik u_ik^m (1 - K(x_k, v_i)) with
// the RBF kernel; the center update is the kernel-weighted mean evaluated at
// the previous centers. Same stopping rule and determinism as fcm_fit.
ClusterModel kfcm_fit(const FeatureMatrix& X, const FcmConfig& cfg, const KernelSpec& kernel,
                      const IterationObserver& observer = nullptr);

// Variants taking an explicit initial membership matrix (clusters * n,
// column-stochastic). Used by the seeded entry points and by tests probing
// permutation equivariance.
ClusterModel fcm_fit_with_init(const FeatureMatrix& X, const FcmConfig& cfg,
                               std::vector<double> initial_membership,
                               const IterationObserver& observer = nullptr);
ClusterModel kfcm_fit_with_init(const FeatureMatrix& X, const FcmConfig& cfg,
                                const KernelSpec& kernel, std::vector<double> initial_membership,
                                const IterationObserver& observer = nullptr);

// Seeded random column-stochastic membership matrix, as used by the fits.
std::vector<double> random_membership(int clusters, int samples, std::uint64_t seed);

// Hard assignment: per-pixel argmax over memberships, ties toward the
// smallest cluster index.
LabelMap labels_from_membership(const ClusterModel& model, int width, int height);

}  // namespace fabricvision
