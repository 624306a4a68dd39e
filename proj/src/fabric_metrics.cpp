#include "fabricvision/fabric_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "fabricvision/csv.hpp"

namespace fabricvision {

namespace {

constexpr double kNePerTex = 590.5;
constexpr double kBlendSumTol = 1e-9;

void check_blend(const std::vector<std::pair<std::string, double>>& blend) {
    if (blend.empty()) return;
    double sum = 0.0;
    for (const auto& [name, frac] : blend) {
        if (frac < 0.0) throw ArgumentError("YarnSpec: blend fraction must be >= 0");
        sum += frac;
    }
    if (std::abs(sum - 1.0) > kBlendSumTol) {
        throw ArgumentError("YarnSpec: blend fractions must sum to 1");
    }
}

// Householder QR least squares for a dense column-major A (rows x cols).
// Returns x minimizing ||A x - b||; throws on rank deficiency (pivot below
// 1e-12 of the matrix scale).
std::vector<double> qr_solve(std::vector<double> a, std::vector<double> b, int rows, int cols) {
    if (rows < cols) throw NumericError("least squares: fewer rows than unknowns");
    const auto at = [&a, rows](int r, int c) -> double& {
        return a[static_cast<std::size_t>(c) * rows + r];
    };

    double frobenius = 0.0;
    for (double v : a) frobenius += v * v;
    frobenius = std::sqrt(frobenius);
    const double pivot_floor = 1e-12 * frobenius;

    for (int c = 0; c < cols; ++c) {
        double norm = 0.0;
        for (int r = c; r < rows; ++r) norm += at(r, c) * at(r, c);
        norm = std::sqrt(norm);
        if (norm <= pivot_floor) {
            throw NumericError("least squares: rank-deficient design matrix");
        }
        if (at(c, c) > 0.0) norm = -norm;

        // Householder vector stored in place of the eliminated column.
        at(c, c) -= norm;
        double vnorm_sq = 0.0;
        for (int r = c; r < rows; ++r) vnorm_sq += at(r, c) * at(r, c);
        if (vnorm_sq == 0.0) throw NumericError("least squares: rank-deficient design matrix");

        for (int cc = c + 1; cc < cols; ++cc) {
            double dot = 0.0;
            for (int r = c; r < rows; ++r) dot += at(r, c) * at(r, cc);
            const double scale = 2.0 * dot / vnorm_sq;
            for (int r = c; r < rows; ++r) at(r, cc) -= scale * at(r, c);
        }
        double dot = 0.0;
        for (int r = c; r < rows; ++r) dot += at(r, c) * b[static_cast<std::size_t>(r)];
        const double scale = 2.0 * dot / vnorm_sq;
        for (int r = c; r < rows; ++r) b[static_cast<std::size_t>(r)] -= scale * at(r, c);

        at(c, c) = norm;  // diagonal of R
    }

    std::vector<double> x(static_cast<std::size_t>(cols));
    for (int c = cols - 1; c >= 0; --c) {
        double v = b[static_cast<std::size_t>(c)];
        for (int cc = c + 1; cc < cols; ++cc) {
            v -= at(c, cc) * x[static_cast<std::size_t>(cc)];
        }
        x[static_cast<std::size_t>(c)] = v / at(c, c);
    }
    return x;
}

}  // namespace

YarnSpec YarnSpec::from_ne(double ne, double twist_tpm,
                           std::vector<std::pair<std::string, double>> blend) {
    if (ne <= 0.0) throw ArgumentError("YarnSpec: Ne must be > 0");
    check_blend(blend);
    YarnSpec y;
    y.count_ne = ne;
    y.count_tex = kNePerTex / ne;
    y.twist_tpm = twist_tpm;
    y.blend = std::move(blend);
    return y;
}

YarnSpec YarnSpec::from_tex(double tex, double twist_tpm,
                            std::vector<std::pair<std::string, double>> blend) {
    if (tex <= 0.0) throw ArgumentError("YarnSpec: tex must be > 0");
    check_blend(blend);
    YarnSpec y;
    y.count_tex = tex;
    y.count_ne = kNePerTex / tex;
    y.twist_tpm = twist_tpm;
    y.blend = std::move(blend);
    return y;
}

double ne_to_tex(double ne) {
    if (ne <= 0.0) throw ArgumentError("ne_to_tex: Ne must be > 0");
    return kNePerTex / ne;
}

double tightness_factor(double tex, double needles, double stitch_length_mm) {
    if (tex <= 0.0) throw ArgumentError("tightness_factor: tex must be > 0");
    if (needles < 1.0) throw ArgumentError("tightness_factor: needles must be >= 1");
    if (stitch_length_mm <= 0.0) throw ArgumentError("tightness_factor: stitch length must be > 0");
    return std::sqrt(tex) * needles / stitch_length_mm;
}

double tightness_factor(const YarnSpec& yarn, const FabricSpec& fabric) {
    return tightness_factor(yarn.count_tex, fabric.needles, fabric.stitch_length_mm);
}

double bagging_residual_model(double p_polyester, double tf) {
    if (p_polyester < 0.0 || p_polyester > 1.0) {
        throw ArgumentError("bagging_residual_model: polyester fraction must be in [0, 1]");
    }
    return 69.5 - 5.56 * p_polyester + 0.31 * tf + 9.32 * tf * tf;
}

BaggingFit fit_bagging_model(const std::vector<BlendRow>& rows) {
    const int n = static_cast<int>(rows.size());
    if (n < 4) throw ArgumentError("fit_bagging_model: need at least 4 rows");

    std::vector<double> a(static_cast<std::size_t>(n) * 4);
    std::vector<double> b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        a[static_cast<std::size_t>(0) * n + i] = 1.0;
        a[static_cast<std::size_t>(1) * n + i] = rows[static_cast<std::size_t>(i)].p_polyester;
        a[static_cast<std::size_t>(2) * n + i] = rows[static_cast<std::size_t>(i)].tf;
        a[static_cast<std::size_t>(3) * n + i] =
            rows[static_cast<std::size_t>(i)].tf * rows[static_cast<std::size_t>(i)].tf;
        b[static_cast<std::size_t>(i)] = rows[static_cast<std::size_t>(i)].residual_bagging_pct;
    }

    const std::vector<double> coeffs = qr_solve(std::move(a), b, n, 4);

    BaggingFit fit;
    std::copy(coeffs.begin(), coeffs.end(), fit.coefficients.begin());

    double mean = 0.0;
    for (const BlendRow& row : rows) mean += row.residual_bagging_pct;
    mean /= n;
    double ss_tot = 0.0, ss_res = 0.0;
    for (const BlendRow& row : rows) {
        const double pred = fit.coefficients[0] + fit.coefficients[1] * row.p_polyester +
                            fit.coefficients[2] * row.tf + fit.coefficients[3] * row.tf * row.tf;
        ss_res += (row.residual_bagging_pct - pred) * (row.residual_bagging_pct - pred);
        ss_tot += (row.residual_bagging_pct - mean) * (row.residual_bagging_pct - mean);
    }
    if (ss_tot == 0.0) throw NumericError("fit_bagging_model: response has no variance");
    fit.r = std::sqrt(std::max(0.0, 1.0 - ss_res / ss_tot));
    return fit;
}

std::vector<std::vector<double>> simplex_lattice(int components, int degree) {
    if (components < 2) throw ArgumentError("simplex_lattice: components must be >= 2");
    if (degree < 1) throw ArgumentError("simplex_lattice: degree must be >= 1");

    std::vector<std::vector<double>> points;
    std::vector<int> units(static_cast<std::size_t>(components), 0);

    // Lexicographic recursion over integer unit allocations summing to m.
    const auto emit = [&](const auto& self, int index, int remaining) -> void {
        if (index == components - 1) {
            units[static_cast<std::size_t>(index)] = remaining;
            std::vector<double> point(static_cast<std::size_t>(components));
            for (int j = 0; j < components; ++j) {
                point[static_cast<std::size_t>(j)] =
                    static_cast<double>(units[static_cast<std::size_t>(j)]) / degree;
            }
            points.push_back(std::move(point));
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            units[static_cast<std::size_t>(index)] = k;
            self(self, index + 1, remaining - k);
        }
    };
    emit(emit, 0, degree);
    return points;
}

double porosity(const GrayImage& img, double threshold) {
    if (img.empty()) throw ArgumentError("porosity: empty image");
    if (threshold < 0.0 || threshold > 255.0) {
        throw ArgumentError("porosity: threshold must be in [0, 255]");
    }
    std::size_t voids = 0;
    for (double v : img.data()) {
        if (v < threshold) ++voids;
    }
    return static_cast<double>(voids) / static_cast<double>(img.size());
}

double otsu_threshold(const GrayImage& img) {
    if (img.empty()) throw ArgumentError("otsu_threshold: empty image");

    std::array<double, 256> hist{};
    for (double v : img.data()) {
        const int bin = static_cast<int>(std::max(0.0, std::min(255.0, std::round(v))));
        hist[static_cast<std::size_t>(bin)] += 1.0;
    }
    const double total = static_cast<double>(img.size());

    double sum_all = 0.0;
    for (int i = 0; i < 256; ++i) sum_all += i * hist[static_cast<std::size_t>(i)];

    double best_threshold = 0.0, best_between = -1.0;
    double w0 = 0.0, sum0 = 0.0;
    for (int t = 0; t < 256; ++t) {
        w0 += hist[static_cast<std::size_t>(t)];
        if (w0 == 0.0) continue;
        const double w1 = total - w0;
        if (w1 == 0.0) break;
        sum0 += t * hist[static_cast<std::size_t>(t)];
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (between > best_between) {
            best_between = between;
            best_threshold = t + 1.0;  // "< threshold" keeps bins 0..t in the void class
        }
    }
    return best_threshold;
}

double bagging_height_from_curve(const std::vector<double>& residual_mm,
                                 const std::vector<double>& baseline_mm,
                                 const std::vector<double>& loaded_mm) {
    if (residual_mm.size() != baseline_mm.size() || loaded_mm.size() != baseline_mm.size()) {
        throw ArgumentError("bagging_height_from_curve: curves must have equal length");
    }
    if (residual_mm.size() < 3) {
        throw ArgumentError("bagging_height_from_curve: need at least 3 samples");
    }

    double residual_dome = 0.0, loaded_dome = 0.0;
    for (std::size_t i = 0; i < residual_mm.size(); ++i) {
        residual_dome = std::max(residual_dome, residual_mm[i] - baseline_mm[i]);
        loaded_dome = std::max(loaded_dome, loaded_mm[i] - baseline_mm[i]);
    }
    if (loaded_dome <= 0.0) {
        throw NumericError("bagging_height_from_curve: zero reference dome height");
    }
    return 100.0 * residual_dome / loaded_dome;
}

std::vector<BlendRow> read_blends_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    std::vector<BlendRow> rows;
    for (const auto& row : table.rows) {
        if (row.size() < 4) throw FormatError("blends csv: expected 4 columns in " + path);
        rows.push_back(BlendRow{parse_double(row[1], path), parse_double(row[2], path),
                                parse_double(row[3], path)});
    }
    if (rows.empty()) throw FormatError("blends csv: no data rows in " + path);
    return rows;
}

BaggingCurves read_curves_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    BaggingCurves curves;
    for (const auto& row : table.rows) {
        if (row.size() < 4) throw FormatError("curves csv: expected 4 columns in " + path);
        curves.position_mm.push_back(parse_double(row[0], path));
        curves.baseline_mm.push_back(parse_double(row[1], path));
        curves.loaded_mm.push_back(parse_double(row[2], path));
        curves.residual_mm.push_back(parse_double(row[3], path));
    }
    if (curves.position_mm.empty()) throw FormatError("curves csv: no data rows in " + path);
    return curves;
}

}  // namespace fabricvision
