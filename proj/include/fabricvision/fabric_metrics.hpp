#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "fabricvision/image.hpp"

namespace fabricvision {

// Yarn description. Exactly one of the count systems is supplied; the other
// is derived (tex = 590.5 / Ne).
struct YarnSpec {
    double count_ne = 0.0;
    double count_tex = 0.0;
    double twist_tpm = 0.0;
    std::vector<std::pair<std::string, double>> blend;  // (fiber, fraction), sums to 1

    static YarnSpec from_ne(double ne, double twist_tpm = 0.0,
                            std::vector<std::pair<std::string, double>> blend = {});
    static YarnSpec from_tex(double tex, double twist_tpm = 0.0,
                             std::vector<std::pair<std::string, double>> blend = {});
};

struct FabricSpec {
    std::string structure;
    double stitch_length_mm = 0.0;  // l_c per structural repeat, > 0
    int needles = 1;                // active needles per repeat, >= 1
    double thickness_mm = 0.0;
    double weight_gsm = 0.0;
};

// English cotton count to tex: tex = 590.5 / ne.
double ne_to_tex(double ne);

// TF = sqrt(tex) * needles / stitch_length.
double tightness_factor(double tex, double needles, double stitch_length_mm);
double tightness_factor(const YarnSpec& yarn, const FabricSpec& fabric);

// Residual bagging height model, evaluated exactly as printed:
//   B(%) = 69.5 - 5.56 P + 0.31 TF + 9.32 TF^2
// with P the polyester fraction in [0, 1].
double bagging_residual_model(double p_polyester, double tf);

struct BlendRow {
    double p_polyester = 0.0;
    double tf = 0.0;
    double residual_bagging_pct = 0.0;
};

struct BaggingFit {
    std::array<double, 4> coefficients{};  // c0 + c1 P + c2 TF + c3 TF^2
    double r = 0.0;                        // multiple correlation coefficient
};

// Least squares fit of B = c0 + c1 P + c2 TF + c3 TF^2 via Householder QR.
BaggingFit fit_bagging_model(const std::vector<BlendRow>& rows);

// All q-tuples with coordinates in {0, 1/m, ..., 1} summing to 1, in
// lexicographic order. Size is C(m + q - 1, q - 1).
std::vector<std::vector<double>> simplex_lattice(int components, int degree);

// Fraction of pixels darker than the threshold (dark = void).
double porosity(const GrayImage& img, double threshold);

// Otsu's between-class-variance threshold on the 0..255 histogram; offered
// as the automatic alternative to a fixed porosity threshold.
double otsu_threshold(const GrayImage& img);

// Residual bagging height from dome curves sampled along a diameter:
//   residual% = 100 * max(residual - baseline) / max(loaded - baseline)
// clamped to 0 when the residual curve never exceeds the baseline.
double bagging_height_from_curve(const std::vector<double>& residual_mm,
                                 const std::vector<double>& baseline_mm,
                                 const std::vector<double>& loaded_mm);

// blends.csv: sample,p_polyester,tf,residual_bagging_pct
std::vector<BlendRow> read_blends_csv(const std::string& path);

struct BaggingCurves {
    std::vector<double> position_mm;
    std::vector<double> baseline_mm;
    std::vector<double> loaded_mm;
    std::vector<double> residual_mm;
};

// curves.csv: position_mm,baseline_mm,loaded_mm,residual_mm
BaggingCurves read_curves_csv(const std::string& path);

}  // namespace fabricvision
