#pragma once

#include <optional>

#include "fabricvision/image.hpp"

namespace fabricvision {

struct GaussianParams {
    double sigma_s = 1.0;  // spatial standard deviation, pixels
    int radius = 3;        // kernel half-window; radius >= ceil(2*sigma_s) recommended
};

struct BilateralParams {
    double delta_s = 3.0;   // spatial sigma, pixels
    double delta_g = 30.0;  // range sigma, intensity units
    int radius = 5;         // window half-extent
};

struct WienerParams {
    int window = 3;  // odd side length >= 3
    // Fixed noise variance, or nullopt to estimate it as the mean of all
    // local window variances.
    std::optional<double> noise_variance;
};

// Truncated-Gaussian smoothing. The kernel is the sampled spatial Gaussian
// renormalized to sum 1 over the window; borders replicate edge pixels.
// Constant images are fixed points; outputs stay within the local window
// value range.
GrayImage gaussian_filter(const GrayImage& img, const GaussianParams& p);

// Edge-preserving smoothing: each output pixel is the window average
// weighted by the product of a spatial Gaussian and a range Gaussian on the
// intensity difference to the center pixel. Borders replicate edge pixels.
GrayImage bilateral_filter(const GrayImage& img, const BilateralParams& p);

// Locally adaptive Wiener filter. Per pixel, with local window mean mu and
// variance var and noise variance nu (given or estimated):
//
//   out = mu + max(var - nu, 0) / max(var, nu) * (x - mu)
//
// with out = mu when the denominator is zero. var is the two-pass population
// variance over the replicate-border window.
GrayImage wiener_filter(const GrayImage& img, const WienerParams& p);

}  // namespace fabricvision
