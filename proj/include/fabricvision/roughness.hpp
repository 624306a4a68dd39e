#pragma once

#include <string>
#include <vector>

#include "fabricvision/image.hpp"

namespace fabricvision {

// Height field derived from a scanned fabric image. Heights are millimeters
// in [0, thickness]; gray 255 maps to the full fabric thickness.
struct SurfaceProfile {
    int width = 0;
    int height = 0;
    std::vector<double> heights;  // row-major, mm
    double thickness = 0.0;       // mm
    double dpi = 600.0;

    double at(int x, int y) const { return heights[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return heights[static_cast<std::size_t>(y) * width + x]; }
};

// Doubly periodic loop-lattice reference surface:
//   h(x, y) = t/2 * (1 + sin(2 pi x / course_period) * sin(2 pi y / wale_period))
// The default periods sit off the pixel lattice: integer multiples of 4 put
// every crest exactly on a sample, all peak grays coincide, and the peak-CV
// criterion of the rendered ideal degenerates to zero.
struct IdealSurfaceSpec {
    double thickness = 0.8;     // mm
    double wale_period = 8.5;   // pixels, >= 2
    double course_period = 8.5; // pixels, >= 2
};

struct Peak {
    int x = 0;  // representative pixel (plateau member nearest the centroid)
    int y = 0;
    double height = 0.0;  // mm
    double gray = 0.0;    // source gray level at the peak
};

// Raw surface criteria before comparison with the ideal surface.
struct RawSurfaceStats {
    int peak_count = 0;             // n
    double distance_variance = 0.0; // v: population variance of peak distances to (0,0), px^2
    double volume = 0.0;            // s: sum of heights * unit pixel area, mm*px^2
    double dispersion = 0.0;        // a: gray variance / gray mean
    double peak_cv_percent = 0.0;   // g: 100 * std / mean of gray at peaks
    bool mean_gray_zero = false;    // a undefined
    bool no_peaks = false;          // v, g defaulted to 0
};

// Five relative deviations of the ideal against the real profile plus the
// combined index kt = (k1 + ... + k5) / divisor.
struct RoughnessCriteria {
    RawSurfaceStats real;
    double k1 = 0.0, k2 = 0.0, k3 = 0.0, k4 = 0.0, k5 = 0.0;
    double kt = 0.0;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r = 0.0;  // Pearson correlation, in [-1, 1]
};

// height = gray / 255 * thickness, gray clamped to [0, 255] first so the
// profile honors its range invariant on synthetic inputs.
SurfaceProfile image_to_profile(const GrayImage& img, double thickness_mm);

// Inverse map: gray = height / thickness * 255. Used to score the rendered
// ideal surface with the same gray-level criteria as real scans.
GrayImage profile_to_image(const SurfaceProfile& profile);

SurfaceProfile ideal_surface(const IdealSurfaceSpec& spec, int width, int height);

// A peak is a pixel strictly higher than all its existing 8-neighbors; a
// plateau of equal-height local maxima counts once and is represented by the
// member pixel nearest its centroid. A constant profile yields no peaks.
std::vector<Peak> detect_peaks(const SurfaceProfile& profile, const GrayImage& source_gray);

enum class VolumeMode {
    total,       // sum of all heights
    above_mean   // sum of max(height - mean height, 0)
};

RawSurfaceStats surface_stats(const SurfaceProfile& profile, const GrayImage& source_gray,
                              VolumeMode volume_mode = VolumeMode::total);

// k_i = (ideal_i - real_i) / ideal_i per criterion; every ideal stat must be
// nonzero. The divisor for kt defaults to 1000.
RoughnessCriteria roughness_index(const RawSurfaceStats& real, const RawSurfaceStats& ideal,
                                  double kt_divisor = 1000.0);

// Ordinary least squares y = slope * x + intercept with Pearson r.
LinearFit linear_regress(const std::vector<std::pair<double, double>>& pairs);

// Reads (sample_id, smd_avg, kt_avg) rows; header line optional. Returns
// (smd, kt) pairs for regression.
std::vector<std::pair<double, double>> read_smd_kt_csv(const std::string& path);

// One CSV row per image: name,n,v,s,a,g,k1,k2,k3,k4,k5,kt
void write_criteria_csv(const std::vector<std::pair<std::string, RoughnessCriteria>>& rows,
                        const std::string& path);

}  // namespace fabricvision
