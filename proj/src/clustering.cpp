#include "fabricvision/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fabricvision {

namespace {

constexpr double kSingularity = 1e-12;  // squared-distance / (1-K) floor
constexpr double kStdFloor = 1e-9;      // below this a feature dim is constant

void validate(const FeatureMatrix& X, const FcmConfig& cfg) {
    if (cfg.clusters < 2) throw ArgumentError("fcm: clusters must be >= 2");
    if (cfg.fuzzifier <= 1.0) throw ArgumentError("fcm: fuzzifier must be > 1");
    if (cfg.epsilon <= 0.0) throw ArgumentError("fcm: epsilon must be > 0");
    if (cfg.max_iter < 1) throw ArgumentError("fcm: max_iter must be >= 1");
    if (X.n < cfg.clusters) throw ArgumentError("fcm: need at least `clusters` samples");
    if (X.d < 1 || static_cast<std::size_t>(X.n) * X.d != X.values.size()) {
        throw ArgumentError("fcm: inconsistent feature matrix");
    }
    for (double v : X.values) {
        if (!std::isfinite(v)) throw ArgumentError("fcm: non-finite feature value");
    }
}

double sq_dist(const FeatureMatrix& X, int k, const std::vector<double>& centers, int i) {
    double s = 0.0;
    for (int j = 0; j < X.d; ++j) {
        const double diff = X.at(k, j) - centers[static_cast<std::size_t>(i) * X.d + j];
        s += diff * diff;
    }
    return s;
}

// v_i = sum_k w_ik x_k / sum_k w_ik
void weighted_centers(const FeatureMatrix& X, const std::vector<double>& weights, int c,
                      std::vector<double>& centers) {
    const int d = X.d;
    centers.assign(static_cast<std::size_t>(c) * d, 0.0);
    for (int i = 0; i < c; ++i) {
        double wsum = 0.0;
        for (int k = 0; k < X.n; ++k) {
            const double w = weights[static_cast<std::size_t>(i) * X.n + k];
            wsum += w;
            for (int j = 0; j < d; ++j) {
                centers[static_cast<std::size_t>(i) * d + j] += w * X.at(k, j);
            }
        }
        if (wsum > 0.0) {
            for (int j = 0; j < d; ++j) centers[static_cast<std::size_t>(i) * d + j] /= wsum;
        }
    }
}

// Shared alternating-update driver. `distance(k, i, centers)` is the
// dissimilarity entering both the membership update and the objective
// (||x-v||^2 classic, 1-K(x,v) kernelized); `update_centers(U, centers)`
// refreshes the center matrix in place from the current memberships.
template <typename DistanceFn, typename CenterFn>
ClusterModel run_fcm(const FeatureMatrix& X, const FcmConfig& cfg, std::vector<double> U,
                     DistanceFn&& distance, CenterFn&& update_centers,
                     const IterationObserver& observer) {
    const int c = cfg.clusters;
    const int n = X.n;
    const double exponent = 1.0 / (cfg.fuzzifier - 1.0);

    ClusterModel model;
    model.clusters = c;
    model.dim = X.d;
    model.samples = n;
    model.membership = std::move(U);
    if (model.membership.size() != static_cast<std::size_t>(c) * n) {
        throw ArgumentError("fcm: initial membership has wrong shape");
    }

    update_centers(model.membership, model.centers);

    std::vector<double> next(model.membership.size());
    std::vector<double> dist(static_cast<std::size_t>(c));
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        double max_delta = 0.0;
        double objective = 0.0;
        for (int k = 0; k < n; ++k) {
            int coincident = -1;
            for (int i = 0; i < c; ++i) {
                dist[static_cast<std::size_t>(i)] = distance(k, i, model.centers);
                if (coincident < 0 && dist[static_cast<std::size_t>(i)] < kSingularity) {
                    coincident = i;
                }
            }
            if (coincident >= 0) {
                for (int i = 0; i < c; ++i) {
                    next[static_cast<std::size_t>(i) * n + k] = i == coincident ? 1.0 : 0.0;
                }
            } else {
                double norm = 0.0;
                for (int i = 0; i < c; ++i) {
                    const double p = std::pow(1.0 / dist[static_cast<std::size_t>(i)], exponent);
                    next[static_cast<std::size_t>(i) * n + k] = p;
                    norm += p;
                }
                for (int i = 0; i < c; ++i) next[static_cast<std::size_t>(i) * n + k] /= norm;
            }
            for (int i = 0; i < c; ++i) {
                const std::size_t idx = static_cast<std::size_t>(i) * n + k;
                max_delta = std::max(max_delta, std::abs(next[idx] - model.membership[idx]));
                objective += std::pow(next[idx], cfg.fuzzifier) * dist[static_cast<std::size_t>(i)];
            }
        }

        model.membership.swap(next);
        model.objective_history.push_back(objective);
        model.iterations_used = iter;
        if (observer) {
            observer(FitIteration{iter, objective, max_delta, &model.membership, &model.centers});
        }
        if (max_delta < cfg.epsilon) {
            model.converged = true;
            break;
        }
        update_centers(model.membership, model.centers);
    }
    return model;
}

}  // namespace

FeatureMatrix extract_features(const GrayImage& img, FeatureMode mode) {
    if (img.empty()) throw ArgumentError("extract_features: empty image");

    FeatureMatrix X;
    X.width = img.width();
    X.height = img.height();
    X.n = img.width() * img.height();
    X.d = mode == FeatureMode::intensity ? 1 : 3;
    X.values.resize(static_cast<std::size_t>(X.n) * X.d);

    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const int k = y * img.width() + x;
            X.values[static_cast<std::size_t>(k) * X.d] = img.at(x, y);
            if (mode == FeatureMode::intensity_local_stats) {
                double sum = 0.0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) sum += img.at_clamped(x + dx, y + dy);
                const double mean = sum / 9.0;
                double ss = 0.0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const double d = img.at_clamped(x + dx, y + dy) - mean;
                        ss += d * d;
                    }
                X.values[static_cast<std::size_t>(k) * X.d + 1] = mean;
                X.values[static_cast<std::size_t>(k) * X.d + 2] = std::sqrt(ss / 9.0);
            }
        }
    }

    // Standardize each dimension; constant dimensions collapse to 0.
    for (int j = 0; j < X.d; ++j) {
        double mean = 0.0;
        for (int k = 0; k < X.n; ++k) mean += X.at(k, j);
        mean /= X.n;
        double var = 0.0;
        for (int k = 0; k < X.n; ++k) {
            const double d = X.at(k, j) - mean;
            var += d * d;
        }
        const double std_dev = std::sqrt(var / X.n);
        for (int k = 0; k < X.n; ++k) {
            double& v = X.values[static_cast<std::size_t>(k) * X.d + j];
            v = std_dev < kStdFloor ? 0.0 : (v - mean) / std_dev;
        }
    }
    return X;
}

std::vector<double> random_membership(int clusters, int samples, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    const auto unit = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };

    std::vector<double> U(static_cast<std::size_t>(clusters) * samples);
    for (int k = 0; k < samples; ++k) {
        double sum = 0.0;
        for (int i = 0; i < clusters; ++i) {
            const double v = unit();
            U[static_cast<std::size_t>(i) * samples + k] = v;
            sum += v;
        }
        if (sum == 0.0) {
            for (int i = 0; i < clusters; ++i) {
                U[static_cast<std::size_t>(i) * samples + k] = 1.0 / clusters;
            }
        } else {
            for (int i = 0; i < clusters; ++i) {
                U[static_cast<std::size_t>(i) * samples + k] /= sum;
            }
        }
    }
    return U;
}

ClusterModel fcm_fit_with_init(const FeatureMatrix& X, const FcmConfig& cfg,
                               std::vector<double> initial_membership,
                               const IterationObserver& observer) {
    validate(X, cfg);
    const double m = cfg.fuzzifier;

    std::vector<double> weights(static_cast<std::size_t>(cfg.clusters) * X.n);
    const auto update_centers = [&](const std::vector<double>& U, std::vector<double>& centers) {
        for (std::size_t idx = 0; idx < U.size(); ++idx) weights[idx] = std::pow(U[idx], m);
        weighted_centers(X, weights, cfg.clusters, centers);
    };
    const auto distance = [&X](int k, int i, const std::vector<double>& centers) {
        return sq_dist(X, k, centers, i);
    };
    return run_fcm(X, cfg, std::move(initial_membership), distance, update_centers, observer);
}

ClusterModel kfcm_fit_with_init(const FeatureMatrix& X, const FcmConfig& cfg,
                                const KernelSpec& kernel, std::vector<double> initial_membership,
                                const IterationObserver& observer) {
    validate(X, cfg);
    if (kernel.sigma <= 0.0) throw ArgumentError("kfcm: kernel sigma must be > 0");
    const double m = cfg.fuzzifier;
    const double inv_sigma_sq = 1.0 / (kernel.sigma * kernel.sigma);

    const auto kval = [&](int k, int i, const std::vector<double>& centers) {
        return std::exp(-sq_dist(X, k, centers, i) * inv_sigma_sq);
    };

    std::vector<double> weights(static_cast<std::size_t>(cfg.clusters) * X.n);
    const auto update_centers = [&](const std::vector<double>& U, std::vector<double>& centers) {
        if (centers.empty()) {
            // No centers yet for the kernel weight; seed with the classic
            // u^m-weighted mean.
            for (std::size_t idx = 0; idx < U.size(); ++idx) weights[idx] = std::pow(U[idx], m);
        } else {
            for (int i = 0; i < cfg.clusters; ++i) {
                for (int k = 0; k < X.n; ++k) {
                    const std::size_t idx = static_cast<std::size_t>(i) * X.n + k;
                    weights[idx] = std::pow(U[idx], m) * kval(k, i, centers);
                }
            }
        }
        weighted_centers(X, weights, cfg.clusters, centers);
    };
    const auto distance = [&](int k, int i, const std::vector<double>& centers) {
        return 1.0 - kval(k, i, centers);
    };
    return run_fcm(X, cfg, std::move(initial_membership), distance, update_centers, observer);
}

ClusterModel fcm_fit(const FeatureMatrix& X, const FcmConfig& cfg,
                     const IterationObserver& observer) {
    validate(X, cfg);
    return fcm_fit_with_init(X, cfg, random_membership(cfg.clusters, X.n, cfg.seed), observer);
}

ClusterModel kfcm_fit(const FeatureMatrix& X, const FcmConfig& cfg, const KernelSpec& kernel,
                      const IterationObserver& observer) {
    validate(X, cfg);
    return kfcm_fit_with_init(X, cfg, kernel, random_membership(cfg.clusters, X.n, cfg.seed),
                              observer);
}

LabelMap labels_from_membership(const ClusterModel& model, int width, int height) {
    if (width * height != model.samples) {
        throw ArgumentError("labels_from_membership: shape does not match sample count");
    }
    LabelMap map(width, height);
    for (int k = 0; k < model.samples; ++k) {
        int best = 0;
        double best_u = model.u(0, k);
        for (int i = 1; i < model.clusters; ++i) {
            if (model.u(i, k) > best_u) {  // strict: ties keep the smaller index
                best_u = model.u(i, k);
                best = i;
            }
        }
        map.labels[static_cast<std::size_t>(k)] = best;
    }
    return map;
}

}  // namespace fabricvision
