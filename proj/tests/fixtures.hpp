// Shared synthetic fixtures for the unit and acceptance suites.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fabricvision/image.hpp"

namespace fixtures {

// Three horizontal texture bands. Band boundaries sit on multiples of 4 so
// a two-level wavelet approximation aligns exactly with the truth map.
inline constexpr int kBandRows[3] = {44, 44, 40};  // 128 rows total
inline constexpr double kBandGray[3] = {60.0, 128.0, 200.0};

inline fabricvision::GrayImage band_image(int width = 128, int height = 128) {
    fabricvision::GrayImage img(width, height);
    const int b0 = height * kBandRows[0] / 128;
    const int b1 = height * (kBandRows[0] + kBandRows[1]) / 128;
    for (int y = 0; y < height; ++y) {
        const double v = y < b0 ? kBandGray[0] : (y < b1 ? kBandGray[1] : kBandGray[2]);
        for (int x = 0; x < width; ++x) img.at(x, y) = v;
    }
    return img;
}

inline fabricvision::LabelMap band_truth(int width = 128, int height = 128) {
    fabricvision::LabelMap map(width, height);
    const int b0 = height * kBandRows[0] / 128;
    const int b1 = height * (kBandRows[0] + kBandRows[1]) / 128;
    for (int y = 0; y < height; ++y) {
        const int label = y < b0 ? 0 : (y < b1 ? 1 : 2);
        for (int x = 0; x < width; ++x) map.at(x, y) = label;
    }
    return map;
}

inline fabricvision::GrayImage noisy_band_image(double sigma = 10.0, std::uint64_t seed = 42,
                                                int width = 128, int height = 128) {
    return fabricvision::add_gaussian_noise(band_image(width, height),
                                            fabricvision::NoiseSpec{sigma, seed});
}

// Uniform [0, 255) random raster for oracle comparisons.
inline fabricvision::GrayImage random_image(int width, int height, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(0.0, 255.0);
    fabricvision::GrayImage img(width, height);
    for (double& v : img.data()) v = dist(gen);
    return img;
}

inline double max_abs_diff(const fabricvision::GrayImage& a, const fabricvision::GrayImage& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(a.data()[i] - b.data()[i]);
        if (d > worst) worst = d;
    }
    return worst;
}

}  // namespace fixtures
