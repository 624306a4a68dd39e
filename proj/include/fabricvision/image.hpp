#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fabricvision/errors.hpp"

namespace fabricvision {

// 2-D grayscale raster, row-major, double-valued.
//
// Pixels are stored as real numbers so filter and wavelet arithmetic loses
// no precision; loaders produce values in [0, 255] and quantization happens
// only at save time. Intermediate processing may exceed the nominal range.
class GrayImage {
public:
    GrayImage() = default;

    GrayImage(int width, int height, double fill = 0.0)
        : width_(width), height_(height) {
        if (width < 1 || height < 1) {
            throw ArgumentError("GrayImage: dimensions must be >= 1");
        }
        data_.assign(static_cast<std::size_t>(width) * height, fill);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return data_.empty(); }
    std::size_t size() const { return data_.size(); }

    double& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    double at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    // Replicate-border access: coordinates outside the raster are clamped
    // to the nearest edge pixel.
    double at_clamped(int x, int y) const {
        if (x < 0) x = 0;
        if (x >= width_) x = width_ - 1;
        if (y < 0) y = 0;
        if (y >= height_) y = height_ - 1;
        return at(x, y);
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

// Per-pixel class id raster produced by clustering and consumed by scoring.
struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<int> labels;  // row-major, values in 0..M-1

    LabelMap() = default;
    LabelMap(int w, int h, int fill = 0)
        : width(w), height(h), labels(static_cast<std::size_t>(w) * h, fill) {
        if (w < 1 || h < 1) {
            throw ArgumentError("LabelMap: dimensions must be >= 1");
        }
    }

    int at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
    int& at(int x, int y) { return labels[static_cast<std::size_t>(y) * width + x]; }
};

// Additive white Gaussian noise parameters.
struct NoiseSpec {
    double sigma = 0.0;       // standard deviation, intensity units
    std::uint64_t seed = 0;   // reproducibility seed
};

// Loads a PGM (P2/P5, maxval 255) or BMP (uncompressed, 8-bit gray-palette
// or 24-bit RGB) file. RGB is reduced to luma 0.299 R + 0.587 G + 0.114 B.
GrayImage load_image(const std::string& path);

// Writes a P5 PGM; values are rounded half-away-from-zero and clamped to
// [0, 255]. load(save(x)) round-trips within +-0.5 per pixel.
void save_image(const GrayImage& img, const std::string& path);

// Returns img + n with n i.i.d. normal(0, sigma^2), generated by Box-Muller
// over a seeded mt19937_64. Output is intentionally NOT clamped so the
// additive noise model stays exact for filter tests. Deterministic per seed.
GrayImage add_gaussian_noise(const GrayImage& img, const NoiseSpec& spec);

// Streaming normal(0,1) sampler: Box-Muller transform over uniform doubles
// drawn from a seeded mt19937_64. The algorithm is fixed so outputs are
// reproducible for a given seed.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : gen_(seed) {}

    double next();

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace fabricvision
