#include "fabricvision/filters.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace fabricvision {

namespace {

void check_image(const GrayImage& img, const char* op) {
    if (img.empty()) throw ArgumentError(std::string(op) + ": empty image");
}

// Spatial weight table exp(-(dx^2 + dy^2) / (2 sigma^2)) over the window,
// row-major in (dy, dx). The normalization constant of the continuous
// Gaussian cancels in the weighted average, so it is omitted.
std::vector<double> spatial_weights(double sigma, int radius) {
    const int side = 2 * radius + 1;
    std::vector<double> w(static_cast<std::size_t>(side) * side);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            w[static_cast<std::size_t>(dy + radius) * side + (dx + radius)] =
                std::exp(-(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy) * inv);
        }
    }
    return w;
}

}  // namespace

GrayImage gaussian_filter(const GrayImage& img, const GaussianParams& p) {
    check_image(img, "gaussian_filter");
    if (p.sigma_s <= 0.0) throw ArgumentError("gaussian_filter: sigma_s must be > 0");
    if (p.radius < 1) throw ArgumentError("gaussian_filter: radius must be >= 1");

    const int side = 2 * p.radius + 1;
    const std::vector<double> w = spatial_weights(p.sigma_s, p.radius);

    GrayImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            double num = 0.0, den = 0.0;
            double lo = img.at_clamped(x - p.radius, y - p.radius);
            double hi = lo;
            for (int dy = -p.radius; dy <= p.radius; ++dy) {
                for (int dx = -p.radius; dx <= p.radius; ++dx) {
                    const double v = img.at_clamped(x + dx, y + dy);
                    const double wt = w[static_cast<std::size_t>(dy + p.radius) * side + (dx + p.radius)];
                    num += wt * v;
                    den += wt;
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
            // The quotient is a convex combination of window values; the
            // clamp removes the last-ulp rounding drift so constant regions
            // stay bit-exact.
            out.at(x, y) = std::clamp(num / den, lo, hi);
        }
    }
    return out;
}

GrayImage bilateral_filter(const GrayImage& img, const BilateralParams& p) {
    check_image(img, "bilateral_filter");
    if (p.delta_s <= 0.0) throw ArgumentError("bilateral_filter: delta_s must be > 0");
    if (p.delta_g <= 0.0) throw ArgumentError("bilateral_filter: delta_g must be > 0");
    if (p.radius < 1) throw ArgumentError("bilateral_filter: radius must be >= 1");

    const int side = 2 * p.radius + 1;
    const std::vector<double> spatial = spatial_weights(p.delta_s, p.radius);
    const double range_inv = 1.0 / (2.0 * p.delta_g * p.delta_g);

    GrayImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const double center = img.at(x, y);
            double num = 0.0, den = 0.0;
            double lo = img.at_clamped(x - p.radius, y - p.radius);
            double hi = lo;
            for (int dy = -p.radius; dy <= p.radius; ++dy) {
                for (int dx = -p.radius; dx <= p.radius; ++dx) {
                    const double v = img.at_clamped(x + dx, y + dy);
                    const double diff = v - center;
                    const double wt =
                        spatial[static_cast<std::size_t>(dy + p.radius) * side + (dx + p.radius)] *
                        std::exp(-diff * diff * range_inv);
                    num += wt * v;
                    den += wt;
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
            out.at(x, y) = std::clamp(num / den, lo, hi);
        }
    }
    return out;
}

GrayImage wiener_filter(const GrayImage& img, const WienerParams& p) {
    check_image(img, "wiener_filter");
    if (p.window < 3 || p.window % 2 == 0) {
        throw ArgumentError("wiener_filter: window must be odd and >= 3");
    }
    if (p.noise_variance && *p.noise_variance < 0.0) {
        throw ArgumentError("wiener_filter: noise_variance must be >= 0");
    }

    // nu = 0 turns the gain into var/var = 1 everywhere, i.e. the identity.
    if (p.noise_variance && *p.noise_variance == 0.0) return img;

    const int r = p.window / 2;
    const int w = img.width(), h = img.height();
    const double count = static_cast<double>(p.window) * p.window;

    std::vector<double> means(img.size());
    std::vector<double> vars(img.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double sum = 0.0;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx) sum += img.at_clamped(x + dx, y + dy);
            const double mu = sum / count;
            double ss = 0.0;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx) {
                    const double d = img.at_clamped(x + dx, y + dy) - mu;
                    ss += d * d;
                }
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            means[i] = mu;
            vars[i] = ss / count;
        }
    }

    double nu;
    if (p.noise_variance) {
        nu = *p.noise_variance;
    } else {
        double acc = 0.0;
        for (double v : vars) acc += v;
        nu = acc / static_cast<double>(vars.size());
    }

    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const double center = img.at(x, y);

            // Exact passthrough for locally constant windows; avoids the
            // roundoff of reconstructing the constant through mu.
            bool flat = true;
            for (int dy = -r; dy <= r && flat; ++dy)
                for (int dx = -r; dx <= r && flat; ++dx)
                    flat = img.at_clamped(x + dx, y + dy) == center;
            if (flat) {
                out.at(x, y) = center;
                continue;
            }

            const double denom = std::max(vars[i], nu);
            const double gain = denom > 0.0 ? std::max(vars[i] - nu, 0.0) / denom : 0.0;
            out.at(x, y) = means[i] + gain * (center - means[i]);
        }
    }
    return out;
}

}  // namespace fabricvision
