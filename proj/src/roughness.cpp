#include "fabricvision/roughness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fabricvision/csv.hpp"

namespace fabricvision {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_profile(const SurfaceProfile& p) {
    if (p.width < 1 || p.height < 1 ||
        p.heights.size() != static_cast<std::size_t>(p.width) * p.height) {
        throw ArgumentError("SurfaceProfile: inconsistent dimensions");
    }
    if (p.thickness <= 0.0) throw ArgumentError("SurfaceProfile: thickness must be > 0");
}

double population_variance(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double mean = 0.0;
    for (double v : xs) mean += v;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double v : xs) {
        const double d = v - mean;
        ss += d * d;
    }
    return ss / static_cast<double>(xs.size());
}

}  // namespace

SurfaceProfile image_to_profile(const GrayImage& img, double thickness_mm) {
    if (img.empty()) throw ArgumentError("image_to_profile: empty image");
    if (thickness_mm <= 0.0) throw ArgumentError("image_to_profile: thickness must be > 0");

    SurfaceProfile p;
    p.width = img.width();
    p.height = img.height();
    p.thickness = thickness_mm;
    p.heights.resize(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double gray = std::max(0.0, std::min(255.0, img.data()[i]));
        p.heights[i] = gray / 255.0 * thickness_mm;
    }
    return p;
}

GrayImage profile_to_image(const SurfaceProfile& profile) {
    check_profile(profile);
    GrayImage img(profile.width, profile.height);
    for (std::size_t i = 0; i < img.size(); ++i) {
        img.data()[i] = profile.heights[i] / profile.thickness * 255.0;
    }
    return img;
}

SurfaceProfile ideal_surface(const IdealSurfaceSpec& spec, int width, int height) {
    if (width < 1 || height < 1) throw ArgumentError("ideal_surface: dimensions must be >= 1");
    if (spec.thickness <= 0.0) throw ArgumentError("ideal_surface: thickness must be > 0");
    if (spec.wale_period < 2.0 || spec.course_period < 2.0) {
        throw ArgumentError("ideal_surface: periods must be >= 2 pixels");
    }

    SurfaceProfile p;
    p.width = width;
    p.height = height;
    p.thickness = spec.thickness;
    p.heights.resize(static_cast<std::size_t>(width) * height);
    const double half = spec.thickness / 2.0;
    for (int y = 0; y < height; ++y) {
        const double sy = std::sin(2.0 * kPi * y / spec.wale_period);
        for (int x = 0; x < width; ++x) {
            const double sx = std::sin(2.0 * kPi * x / spec.course_period);
            p.at(x, y) = half * (1.0 + sx * sy);
        }
    }
    return p;
}

std::vector<Peak> detect_peaks(const SurfaceProfile& profile, const GrayImage& source_gray) {
    check_profile(profile);
    if (source_gray.width() != profile.width || source_gray.height() != profile.height) {
        throw ArgumentError("detect_peaks: gray image does not match profile");
    }

    const int w = profile.width, h = profile.height;
    std::vector<char> visited(static_cast<std::size_t>(w) * h, 0);
    std::vector<Peak> peaks;

    std::vector<std::pair<int, int>> component;
    std::vector<std::pair<int, int>> stack;
    for (int y0 = 0; y0 < h; ++y0) {
        for (int x0 = 0; x0 < w; ++x0) {
            const std::size_t i0 = static_cast<std::size_t>(y0) * w + x0;
            if (visited[i0]) continue;

            // Flood the equal-height component, tracking whether any
            // outside neighbor reaches or exceeds the plateau height.
            const double level = profile.at(x0, y0);
            bool dominated = false;
            bool has_lower_neighbor = false;
            component.clear();
            stack.assign(1, {x0, y0});
            visited[i0] = 1;
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                component.push_back({cx, cy});
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                        const double nv = profile.at(nx, ny);
                        if (nv == level) {
                            const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
                            if (!visited[ni]) {
                                visited[ni] = 1;
                                stack.push_back({nx, ny});
                            }
                        } else if (nv > level) {
                            dominated = true;
                        } else {
                            has_lower_neighbor = true;
                        }
                    }
                }
            }
            if (dominated || !has_lower_neighbor) continue;  // constant image: no peaks

            double cx_sum = 0.0, cy_sum = 0.0;
            for (const auto& [px, py] : component) {
                cx_sum += px;
                cy_sum += py;
            }
            const double cx = cx_sum / static_cast<double>(component.size());
            const double cy = cy_sum / static_cast<double>(component.size());
            std::pair<int, int> rep = component.front();
            double best = std::numeric_limits<double>::max();
            for (const auto& [px, py] : component) {
                const double d = (px - cx) * (px - cx) + (py - cy) * (py - cy);
                if (d < best) {
                    best = d;
                    rep = {px, py};
                }
            }
            peaks.push_back(Peak{rep.first, rep.second, level, source_gray.at(rep.first, rep.second)});
        }
    }
    return peaks;
}

RawSurfaceStats surface_stats(const SurfaceProfile& profile, const GrayImage& source_gray,
                              VolumeMode volume_mode) {
    check_profile(profile);
    if (source_gray.width() != profile.width || source_gray.height() != profile.height) {
        throw ArgumentError("surface_stats: gray image does not match profile");
    }

    RawSurfaceStats stats;
    const std::vector<Peak> peaks = detect_peaks(profile, source_gray);
    stats.peak_count = static_cast<int>(peaks.size());

    if (peaks.empty()) {
        stats.no_peaks = true;
    } else {
        std::vector<double> distances, grays;
        distances.reserve(peaks.size());
        grays.reserve(peaks.size());
        for (const Peak& p : peaks) {
            distances.push_back(std::sqrt(static_cast<double>(p.x) * p.x +
                                          static_cast<double>(p.y) * p.y));
            grays.push_back(p.gray);
        }
        stats.distance_variance = population_variance(distances);

        double gmean = 0.0;
        for (double g : grays) gmean += g;
        gmean /= static_cast<double>(grays.size());
        stats.peak_cv_percent =
            gmean != 0.0 ? 100.0 * std::sqrt(population_variance(grays)) / gmean : 0.0;
    }

    double vol = 0.0;
    if (volume_mode == VolumeMode::total) {
        for (double hgt : profile.heights) vol += hgt;
    } else {
        double hmean = 0.0;
        for (double hgt : profile.heights) hmean += hgt;
        hmean /= static_cast<double>(profile.heights.size());
        for (double hgt : profile.heights) vol += std::max(hgt - hmean, 0.0);
    }
    stats.volume = vol;  // unit pixel area

    double mean = 0.0;
    for (double g : source_gray.data()) mean += g;
    mean /= static_cast<double>(source_gray.size());
    if (mean == 0.0) {
        stats.mean_gray_zero = true;
    } else {
        stats.dispersion = population_variance(source_gray.data()) / mean;
    }
    return stats;
}

RoughnessCriteria roughness_index(const RawSurfaceStats& real, const RawSurfaceStats& ideal,
                                  double kt_divisor) {
    if (kt_divisor <= 0.0) throw ArgumentError("roughness_index: divisor must be > 0");
    if (ideal.peak_count == 0 || ideal.distance_variance == 0.0 || ideal.volume == 0.0 ||
        ideal.dispersion == 0.0 || ideal.peak_cv_percent == 0.0) {
        throw ArgumentError("roughness_index: every ideal criterion must be nonzero");
    }
    if (real.mean_gray_zero) throw ArgumentError("roughness_index: real dispersion undefined");

    RoughnessCriteria out;
    out.real = real;
    out.k1 = (static_cast<double>(ideal.peak_count) - real.peak_count) / ideal.peak_count;
    out.k2 = (ideal.distance_variance - real.distance_variance) / ideal.distance_variance;
    out.k3 = (ideal.volume - real.volume) / ideal.volume;
    out.k4 = (ideal.dispersion - real.dispersion) / ideal.dispersion;
    out.k5 = (ideal.peak_cv_percent - real.peak_cv_percent) / ideal.peak_cv_percent;
    out.kt = (out.k1 + out.k2 + out.k3 + out.k4 + out.k5) / kt_divisor;
    return out;
}

LinearFit linear_regress(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 2) throw ArgumentError("linear_regress: need at least 2 pairs");

    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pairs) {
        mx += x;
        my += y;
    }
    const double n = static_cast<double>(pairs.size());
    mx /= n;
    my /= n;

    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const auto& [x, y] : pairs) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0) throw NumericError("linear_regress: x values are constant");

    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r = syy == 0.0 ? 0.0 : std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    return fit;
}

std::vector<std::pair<double, double>> read_smd_kt_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    std::vector<std::pair<double, double>> pairs;
    for (const auto& row : table.rows) {
        if (row.size() < 3) throw FormatError("smd/kt csv: expected 3 columns in " + path);
        pairs.emplace_back(parse_double(row[1], path), parse_double(row[2], path));
    }
    if (pairs.empty()) throw FormatError("smd/kt csv: no data rows in " + path);
    return pairs;
}

void write_criteria_csv(const std::vector<std::pair<std::string, RoughnessCriteria>>& rows,
                        const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "image,n,v,s,a,g,k1,k2,k3,k4,k5,kt\n";
    out.precision(12);
    for (const auto& [name, c] : rows) {
        out << name << ',' << c.real.peak_count << ',' << c.real.distance_variance << ','
            << c.real.volume << ',' << c.real.dispersion << ',' << c.real.peak_cv_percent << ','
            << c.k1 << ',' << c.k2 << ',' << c.k3 << ',' << c.k4 << ',' << c.k5 << ',' << c.kt
            << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace fabricvision
