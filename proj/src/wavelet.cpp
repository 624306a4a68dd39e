#include "fabricvision/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

namespace fabricvision {

namespace {

constexpr double kOrthoTol = 1e-9;

// y_k = sum_t f_t x_{2k+t}, periodic wraparound for banks longer than the
// signal tail (never triggered by Haar).
void analyze_1d(const std::vector<double>& x, const std::vector<double>& h,
                const std::vector<double>& g, std::vector<double>& low,
                std::vector<double>& high) {
    const std::size_t n = x.size();
    const std::size_t half = n / 2;
    low.resize(half);
    high.resize(half);
    for (std::size_t k = 0; k < half; ++k) {
        double a = 0.0, d = 0.0;
        for (std::size_t t = 0; t < h.size(); ++t) {
            const double v = x[(2 * k + t) % n];
            a += h[t] * v;
            d += g[t] * v;
        }
        low[k] = a;
        high[k] = d;
    }
}

// x_{2k+t} += h_t a_k + g_t d_k — adjoint of analyze_1d.
void synthesize_1d(const std::vector<double>& low, const std::vector<double>& high,
                   const std::vector<double>& h, const std::vector<double>& g,
                   std::vector<double>& x) {
    const std::size_t n = 2 * low.size();
    x.assign(n, 0.0);
    for (std::size_t k = 0; k < low.size(); ++k) {
        for (std::size_t t = 0; t < h.size(); ++t) {
            x[(2 * k + t) % n] += h[t] * low[k] + g[t] * high[k];
        }
    }
}

struct SplitPair {
    GrayImage low;
    GrayImage high;
};

SplitPair analyze_rows(const GrayImage& in, const FilterBank& bank) {
    const int half = in.width() / 2;
    SplitPair out{GrayImage(half, in.height()), GrayImage(half, in.height())};
    std::vector<double> row(in.width()), lo, hi;
    for (int y = 0; y < in.height(); ++y) {
        for (int x = 0; x < in.width(); ++x) row[x] = in.at(x, y);
        analyze_1d(row, bank.lowpass, bank.highpass, lo, hi);
        for (int x = 0; x < half; ++x) {
            out.low.at(x, y) = lo[x];
            out.high.at(x, y) = hi[x];
        }
    }
    return out;
}

SplitPair analyze_cols(const GrayImage& in, const FilterBank& bank) {
    const int half = in.height() / 2;
    SplitPair out{GrayImage(in.width(), half), GrayImage(in.width(), half)};
    std::vector<double> col(in.height()), lo, hi;
    for (int x = 0; x < in.width(); ++x) {
        for (int y = 0; y < in.height(); ++y) col[y] = in.at(x, y);
        analyze_1d(col, bank.lowpass, bank.highpass, lo, hi);
        for (int y = 0; y < half; ++y) {
            out.low.at(x, y) = lo[y];
            out.high.at(x, y) = hi[y];
        }
    }
    return out;
}

GrayImage synthesize_cols(const GrayImage& low, const GrayImage& high, const FilterBank& bank) {
    GrayImage out(low.width(), low.height() * 2);
    std::vector<double> lo(low.height()), hi(low.height()), col;
    for (int x = 0; x < low.width(); ++x) {
        for (int y = 0; y < low.height(); ++y) {
            lo[y] = low.at(x, y);
            hi[y] = high.at(x, y);
        }
        synthesize_1d(lo, hi, bank.lowpass, bank.highpass, col);
        for (int y = 0; y < out.height(); ++y) out.at(x, y) = col[y];
    }
    return out;
}

GrayImage synthesize_rows(const GrayImage& low, const GrayImage& high, const FilterBank& bank) {
    GrayImage out(low.width() * 2, low.height());
    std::vector<double> lo(low.width()), hi(low.width()), row;
    for (int y = 0; y < low.height(); ++y) {
        for (int x = 0; x < low.width(); ++x) {
            lo[x] = low.at(x, y);
            hi[x] = high.at(x, y);
        }
        synthesize_1d(lo, hi, bank.lowpass, bank.highpass, row);
        for (int x = 0; x < out.width(); ++x) out.at(x, y) = row[x];
    }
    return out;
}

double image_energy(const GrayImage& img) {
    double e = 0.0;
    for (double v : img.data()) e += v * v;
    return e;
}

}  // namespace

FilterBank FilterBank::haar() {
    const double s = 1.0 / std::sqrt(2.0);
    return FilterBank{{s, s}, {s, -s}, "haar"};
}

void FilterBank::validate() const {
    if (lowpass.size() < 2 || lowpass.size() != highpass.size()) {
        throw ArgumentError("FilterBank: lowpass/highpass must have equal length >= 2");
    }
    double hh = 0.0, gg = 0.0, hg = 0.0;
    for (std::size_t i = 0; i < lowpass.size(); ++i) {
        hh += lowpass[i] * lowpass[i];
        gg += highpass[i] * highpass[i];
        hg += lowpass[i] * highpass[i];
    }
    if (std::abs(hh - 1.0) > kOrthoTol || std::abs(gg - 1.0) > kOrthoTol ||
        std::abs(hg) > kOrthoTol) {
        throw ArgumentError("FilterBank '" + name + "': not orthonormal");
    }
}

double WaveletPyramid::coefficient_energy() const {
    double e = image_energy(final_ll);
    for (const SubbandLevel& lvl : details) {
        e += image_energy(lvl.hl) + image_energy(lvl.lh) + image_energy(lvl.hh);
    }
    return e;
}

GrayImage symmetric_extend(const GrayImage& img, int new_width, int new_height) {
    if (new_width < img.width() || new_height < img.height()) {
        throw ArgumentError("symmetric_extend: target smaller than source");
    }
    // Half-sample symmetric periodization: ... c b a | a b c | c b a ...
    const auto reflect = [](int i, int n) {
        const int period = 2 * n;
        int j = i % period;
        return j < n ? j : period - 1 - j;
    };
    GrayImage out(new_width, new_height);
    for (int y = 0; y < new_height; ++y) {
        const int sy = reflect(y, img.height());
        for (int x = 0; x < new_width; ++x) {
            out.at(x, y) = img.at(reflect(x, img.width()), sy);
        }
    }
    return out;
}

WaveletPyramid decompose(const GrayImage& img, int levels, const FilterBank& bank) {
    if (levels < 1) throw ArgumentError("decompose: levels must be >= 1");
    if (img.empty()) throw ArgumentError("decompose: empty image");
    bank.validate();

    const int unit = 1 << levels;
    const auto round_up = [unit](int v) { return ((v + unit - 1) / unit) * unit; };

    WaveletPyramid pyr;
    pyr.levels = levels;
    pyr.original_width = img.width();
    pyr.original_height = img.height();
    pyr.padded_width = round_up(img.width());
    pyr.padded_height = round_up(img.height());

    GrayImage ll = symmetric_extend(img, pyr.padded_width, pyr.padded_height);
    for (int n = 0; n < levels; ++n) {
        const SplitPair rows = analyze_rows(ll, bank);
        const SplitPair lo_cols = analyze_cols(rows.low, bank);
        const SplitPair hi_cols = analyze_cols(rows.high, bank);
        pyr.details.push_back(SubbandLevel{hi_cols.low, lo_cols.high, hi_cols.high});
        ll = lo_cols.low;
    }
    pyr.final_ll = ll;
    return pyr;
}

GrayImage reconstruct(const WaveletPyramid& pyr, const FilterBank& bank) {
    bank.validate();
    if (pyr.levels < 1 || static_cast<int>(pyr.details.size()) != pyr.levels) {
        throw StructureError("reconstruct: level count does not match stored subbands");
    }

    GrayImage ll = pyr.final_ll;
    for (int n = pyr.levels - 1; n >= 0; --n) {
        const SubbandLevel& lvl = pyr.details[static_cast<std::size_t>(n)];
        if (lvl.hl.width() != ll.width() || lvl.hl.height() != ll.height() ||
            lvl.lh.width() != ll.width() || lvl.lh.height() != ll.height() ||
            lvl.hh.width() != ll.width() || lvl.hh.height() != ll.height()) {
            throw StructureError("reconstruct: subband dimensions disagree at level " +
                                 std::to_string(n + 1));
        }
        const GrayImage low_band = synthesize_cols(ll, lvl.lh, bank);
        const GrayImage high_band = synthesize_cols(lvl.hl, lvl.hh, bank);
        ll = synthesize_rows(low_band, high_band, bank);
    }

    if (ll.width() != pyr.padded_width || ll.height() != pyr.padded_height) {
        throw StructureError("reconstruct: padded size mismatch");
    }
    GrayImage out(pyr.original_width, pyr.original_height);
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x) out.at(x, y) = ll.at(x, y);
    return out;
}

GrayImage approximation(const WaveletPyramid& pyr) {
    const double scale = std::ldexp(1.0, -pyr.levels);  // 2^-levels
    GrayImage out = pyr.final_ll;
    for (double& v : out.data()) v *= scale;
    return out;
}

std::vector<std::string> dump_subbands(const WaveletPyramid& pyr, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    const auto normalize = [](const GrayImage& band) {
        const auto [lo, hi] = std::minmax_element(band.data().begin(), band.data().end());
        GrayImage out = band;
        const double span = *hi - *lo;
        for (double& v : out.data()) v = span > 0.0 ? (v - *lo) / span * 255.0 : 0.0;
        return out;
    };

    std::vector<std::string> paths;
    const auto write = [&](const GrayImage& band, const std::string& stem) {
        const std::string path = (fs::path(dir) / (stem + ".pgm")).string();
        save_image(normalize(band), path);
        paths.push_back(path);
    };
    for (int n = 0; n < pyr.levels; ++n) {
        const SubbandLevel& lvl = pyr.details[static_cast<std::size_t>(n)];
        const std::string tag = "level" + std::to_string(n + 1);
        write(lvl.hl, tag + "_hl");
        write(lvl.lh, tag + "_lh");
        write(lvl.hh, tag + "_hh");
    }
    write(pyr.final_ll, "level" + std::to_string(pyr.levels) + "_ll");
    return paths;
}

}  // namespace fabricvision
