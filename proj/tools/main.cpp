#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fabricvision/fabric_metrics.hpp"
#include "fabricvision/pipeline.hpp"
#include "fabricvision/wavelet.hpp"

namespace fv = fabricvision;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit codes: 0 success, 2 config error, 3 input error, 4 numerical failure.
constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;
constexpr int kExitNumeric = 4;

struct SegmentArgs {
    std::string input;
    std::string output_dir = ".";
    std::string config_path;
    std::string truth_path;
    std::string report_path;
    std::string trace_path;
    std::string variant = "hybrid";
    int clusters = 3;
    int levels = 2;
    bool levels_given = false;
    std::uint64_t seed = 0;
    double kernel_sigma = 3.0;
    double fuzzifier = 2.0;
    double epsilon = 0.01;
    int max_iter = 100;
    std::string feature_mode = "intensity";
    double bilateral_delta_s = 3.0;
    double bilateral_delta_g = 30.0;
    int bilateral_radius = 5;
    double gaussian_sigma = 1.5;
    int gaussian_radius = 3;
    bool dump_subbands = false;
};

void apply_json_config(const std::string& path, SegmentArgs& args) {
    std::ifstream in(path);
    if (!in) throw fv::IoError("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw fv::ArgumentError("config parse error in " + path + ": " + e.what());
    }
    const auto get = [&j](const char* key, auto& slot) {
        if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
    };
    get("variant", args.variant);
    get("clusters", args.clusters);
    if (j.contains("wavelet_levels")) {
        args.levels = j.at("wavelet_levels").get<int>();
        args.levels_given = true;
    }
    get("seed", args.seed);
    get("kernel_sigma", args.kernel_sigma);
    get("fuzzifier", args.fuzzifier);
    get("epsilon", args.epsilon);
    get("max_iter", args.max_iter);
    get("feature_mode", args.feature_mode);
    get("bilateral_delta_s", args.bilateral_delta_s);
    get("bilateral_delta_g", args.bilateral_delta_g);
    get("bilateral_radius", args.bilateral_radius);
    get("gaussian_sigma", args.gaussian_sigma);
    get("gaussian_radius", args.gaussian_radius);
}

fv::PipelineConfig build_config(const SegmentArgs& args) {
    fv::PipelineConfig cfg;
    cfg.variant = fv::variant_from_string(args.variant);
    cfg.fcm.clusters = args.clusters;
    cfg.fcm.fuzzifier = args.fuzzifier;
    cfg.fcm.epsilon = args.epsilon;
    cfg.fcm.max_iter = args.max_iter;
    cfg.fcm.seed = args.seed;
    cfg.kernel.sigma = args.kernel_sigma;
    cfg.bilateral = {args.bilateral_delta_s, args.bilateral_delta_g, args.bilateral_radius};
    cfg.gaussian = {args.gaussian_sigma, args.gaussian_radius};

    if (args.feature_mode == "intensity") {
        cfg.feature_mode = fv::FeatureMode::intensity;
    } else if (args.feature_mode == "intensity+local-stats") {
        cfg.feature_mode = fv::FeatureMode::intensity_local_stats;
    } else {
        throw fv::ArgumentError("unknown feature mode '" + args.feature_mode + "'");
    }

    if (cfg.variant == fv::Variant::fcm2) {
        if (args.levels_given && args.levels > 0) {
            throw fv::ArgumentError("fcm2 runs without the wavelet stage; --levels must be 0");
        }
        cfg.wavelet_levels = 0;
    } else {
        cfg.wavelet_levels = args.levels;
    }
    return cfg;
}

int run_segment(const SegmentArgs& args) {
    fv::PipelineConfig cfg = build_config(args);

    const fv::GrayImage img = fv::load_image(args.input);
    if (!args.truth_path.empty()) {
        cfg.truth = fv::load_label_map(args.truth_path, cfg.fcm.clusters);
        if (cfg.truth->width != img.width() || cfg.truth->height != img.height()) {
            throw fv::ArgumentError("truth map dimensions do not match the input image");
        }
    }

    fs::create_directories(args.output_dir);

    std::ofstream trace;
    fv::IterationObserver observer;
    if (!args.trace_path.empty()) {
        trace.open(args.trace_path);
        if (!trace) throw fv::IoError("cannot open trace file: " + args.trace_path);
        trace << "iter,objective,max_delta_u\n";
        trace.precision(12);
        observer = [&trace](const fv::FitIteration& it) {
            trace << it.iter << ',' << it.objective << ',' << it.max_delta_u << '\n';
        };
    }

    if (args.dump_subbands && cfg.variant != fv::Variant::fcm2) {
        const fv::GrayImage filtered = fv::bilateral_filter(img, cfg.bilateral);
        fv::dump_subbands(fv::decompose(filtered, cfg.wavelet_levels),
                          (fs::path(args.output_dir) / "subbands").string());
    }

    const auto [labels, report] = fv::run_segmentation(cfg, img, observer);

    const std::string label_path = (fs::path(args.output_dir) / "labels.pgm").string();
    fv::save_label_map(labels, cfg.fcm.clusters, label_path);

    const json report_json = fv::report_to_json(report);
    const std::string report_path =
        args.report_path.empty() ? (fs::path(args.output_dir) / "report.json").string()
                                 : args.report_path;
    fv::emit_report(report_json, report_path);

    std::cout << "variant " << report.variant << ": " << report.iterations_used
              << " iterations, objective " << report.objective_final;
    if (report.car_percent) {
        std::cout << ", CAR " << *report.car_percent << "%, KC " << *report.kc_percent << "%";
    }
    std::cout << "\nlabels:  " << label_path << "\nreport:  " << report_path << "\n";
    return 0;
}

int dispatch(const std::function<int()>& fn) {
    try {
        return fn();
    } catch (const fv::ArgumentError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const fv::IoError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const fv::FormatError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const fv::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fabricvision - knit-fabric image analysis toolkit"};
    app.require_subcommand(1);

    // ---- segment ----------------------------------------------------------
    SegmentArgs seg;
    CLI::App* segment = app.add_subcommand("segment", "Texture segmentation (hybrid/fcm1/fcm2)");
    segment->add_option("--input", seg.input, "input image (PGM or BMP)")->required();
    segment->add_option("--output-dir", seg.output_dir, "directory for labels.pgm and report.json");
    segment->add_option("--config", seg.config_path, "JSON config file (flags override)");
    segment->add_option("--truth", seg.truth_path, "ground-truth PGM with class ids as pixels");
    segment->add_option("--report", seg.report_path, "report JSON path");
    segment->add_option("--trace", seg.trace_path, "iteration trace CSV (iter,J,max|dU|)");
    segment->add_option("--variant", seg.variant, "hybrid|fcm1|fcm2");
    segment->add_option("--clusters", seg.clusters, "cluster count (>= 2)");
    CLI::Option* levels_opt = segment->add_option("--levels", seg.levels, "wavelet levels");
    segment->add_option("--seed", seg.seed, "clustering initialization seed");
    segment->add_option("--kernel-sigma", seg.kernel_sigma, "RBF kernel bandwidth (hybrid)");
    segment->add_option("--fuzzifier", seg.fuzzifier, "FCM fuzzifier m > 1");
    segment->add_option("--epsilon", seg.epsilon, "terminal condition on max |dU|");
    segment->add_option("--max-iter", seg.max_iter, "iteration cap");
    segment->add_option("--feature-mode", seg.feature_mode, "intensity|intensity+local-stats");
    segment->add_option("--bilateral-delta-s", seg.bilateral_delta_s, "bilateral spatial sigma");
    segment->add_option("--bilateral-delta-g", seg.bilateral_delta_g, "bilateral range sigma");
    segment->add_option("--bilateral-radius", seg.bilateral_radius, "bilateral window radius");
    segment->add_option("--gaussian-sigma", seg.gaussian_sigma, "gaussian sigma (fcm2)");
    segment->add_option("--gaussian-radius", seg.gaussian_radius, "gaussian radius (fcm2)");
    segment->add_flag("--dump-subbands", seg.dump_subbands, "write normalized subband PGMs");

    // ---- roughness --------------------------------------------------------
    std::vector<std::string> rough_inputs;
    std::string rough_csv, rough_report, rough_smd_csv;
    double rough_thickness = 0.8, rough_wale = 8.5, rough_course = 8.5, rough_divisor = 1000.0;
    bool rough_above_mean = false, rough_wiener = false;
    double rough_gaussian_sigma = 0.0;
    CLI::App* roughness = app.add_subcommand("roughness", "Surface roughness criteria and kt");
    roughness->add_option("--input", rough_inputs, "image file(s)");
    roughness->add_option("--thickness", rough_thickness, "fabric thickness, mm");
    roughness->add_option("--wale-period", rough_wale, "ideal surface wale period, px");
    roughness->add_option("--course-period", rough_course, "ideal surface course period, px");
    roughness->add_option("--kt-divisor", rough_divisor, "divisor in kt (default 1000)");
    roughness->add_option("--csv", rough_csv, "write per-image criteria CSV");
    roughness->add_option("--report", rough_report, "write JSON report");
    roughness->add_flag("--volume-above-mean", rough_above_mean,
                        "volume criterion above the mean plane instead of total");
    roughness->add_flag("--wiener", rough_wiener, "Wiener-denoise inputs first (3x3)");
    roughness->add_option("--gaussian", rough_gaussian_sigma,
                          "Gaussian-smooth inputs first with this sigma");
    roughness->add_option("--smd-csv", rough_smd_csv,
                          "regress kt against instrument SMD pairs (sample,smd_avg,kt_avg)");

    // ---- porosity ---------------------------------------------------------
    std::string poro_input;
    double poro_threshold = 128.0;
    bool poro_otsu = false;
    CLI::App* poro = app.add_subcommand("porosity", "Void fraction under an intensity threshold");
    poro->add_option("--input", poro_input, "image file")->required();
    poro->add_option("--threshold", poro_threshold, "void/solid threshold (default 128)");
    poro->add_flag("--otsu", poro_otsu, "derive the threshold with Otsu's method");

    // ---- metrics ----------------------------------------------------------
    CLI::App* metrics = app.add_subcommand("metrics", "Scalar fabric computations");
    metrics->require_subcommand(1);

    double tf_tex = 0.0, tf_ne = 0.0, tf_needles = 1.0, tf_stitch = 1.0;
    CLI::App* tightness = metrics->add_subcommand("tightness", "TF = sqrt(tex) * needles / stitch");
    tightness->add_option("--tex", tf_tex, "yarn count, tex");
    tightness->add_option("--ne", tf_ne, "yarn count, English cotton (converted to tex)");
    tightness->add_option("--needles", tf_needles, "active needles per repeat")->required();
    tightness->add_option("--stitch-length", tf_stitch, "stitch length, mm")->required();

    double bag_p = 0.0, bag_tf = 0.0;
    CLI::App* bagging = metrics->add_subcommand("bagging", "Residual bagging height model");
    bagging->add_option("--polyester", bag_p, "polyester fraction [0, 1]")->required();
    bagging->add_option("--tf", bag_tf, "tightness factor")->required();

    std::string fit_csv;
    CLI::App* bagging_fit = metrics->add_subcommand(
        "bagging-fit", "Refit B = c0 + c1 P + c2 TF + c3 TF^2 from blends CSV");
    bagging_fit->add_option("--csv", fit_csv, "blends.csv (sample,p_polyester,tf,residual%)")
        ->required();

    int simplex_q = 2, simplex_m = 4;
    CLI::App* simplex = metrics->add_subcommand("simplex", "Simplex-lattice design points");
    simplex->add_option("--components", simplex_q, "mixture components q >= 2");
    simplex->add_option("--degree", simplex_m, "lattice degree m >= 1");

    // ---- bagging-curve ----------------------------------------------------
    std::string curve_csv;
    CLI::App* curve = app.add_subcommand("bagging-curve", "Residual height % from dome curves");
    curve->add_option("--csv", curve_csv,
                      "curves.csv (position_mm,baseline_mm,loaded_mm,residual_mm)")
        ->required();

    CLI11_PARSE(app, argc, argv);

    if (segment->parsed()) {
        return dispatch([&] {
            if (seg.config_path.empty()) {
                seg.levels_given = levels_opt->count() > 0;
                return run_segment(seg);
            }
            // Precedence: built-in defaults < config file < explicit flags.
            SegmentArgs merged;
            merged.input = seg.input;
            merged.output_dir = seg.output_dir;
            merged.truth_path = seg.truth_path;
            merged.report_path = seg.report_path;
            merged.trace_path = seg.trace_path;
            merged.dump_subbands = seg.dump_subbands;
            apply_json_config(seg.config_path, merged);

            const auto given = [segment](const std::string& name) {
                return segment->count(name) > 0;
            };
            if (given("--variant")) merged.variant = seg.variant;
            if (given("--clusters")) merged.clusters = seg.clusters;
            if (given("--levels")) {
                merged.levels = seg.levels;
                merged.levels_given = true;
            }
            if (given("--seed")) merged.seed = seg.seed;
            if (given("--kernel-sigma")) merged.kernel_sigma = seg.kernel_sigma;
            if (given("--fuzzifier")) merged.fuzzifier = seg.fuzzifier;
            if (given("--epsilon")) merged.epsilon = seg.epsilon;
            if (given("--max-iter")) merged.max_iter = seg.max_iter;
            if (given("--feature-mode")) merged.feature_mode = seg.feature_mode;
            if (given("--bilateral-delta-s")) merged.bilateral_delta_s = seg.bilateral_delta_s;
            if (given("--bilateral-delta-g")) merged.bilateral_delta_g = seg.bilateral_delta_g;
            if (given("--bilateral-radius")) merged.bilateral_radius = seg.bilateral_radius;
            if (given("--gaussian-sigma")) merged.gaussian_sigma = seg.gaussian_sigma;
            if (given("--gaussian-radius")) merged.gaussian_radius = seg.gaussian_radius;
            return run_segment(merged);
        });
    }

    if (roughness->parsed()) {
        return dispatch([&]() -> int {
            if (!rough_smd_csv.empty()) {
                const auto pairs = fv::read_smd_kt_csv(rough_smd_csv);
                const fv::LinearFit fit = fv::linear_regress(pairs);
                std::cout << "pairs: " << pairs.size() << "\nslope: " << fit.slope
                          << "\nintercept: " << fit.intercept << "\npearson_r: " << fit.r << "\n";
                if (!rough_report.empty()) {
                    json j;
                    j["schema"] = "fabricvision/1";
                    j["kind"] = "smd-correlation";
                    j["pairs"] = pairs.size();
                    j["slope"] = fv::round_sig(fit.slope, 6);
                    j["intercept"] = fv::round_sig(fit.intercept, 6);
                    j["pearson_r"] = fv::round_sig(fit.r, 6);
                    fv::emit_report(j, rough_report);
                }
                return 0;
            }

            if (rough_inputs.empty()) {
                throw fv::ArgumentError("roughness: provide --input images or --smd-csv");
            }
            std::vector<std::pair<std::string, fv::GrayImage>> images;
            for (const std::string& path : rough_inputs) {
                fv::GrayImage img = fv::load_image(path);
                if (rough_wiener) img = fv::wiener_filter(img, fv::WienerParams{});
                if (rough_gaussian_sigma > 0.0) {
                    img = fv::gaussian_filter(
                        img, fv::GaussianParams{rough_gaussian_sigma,
                                                std::max(1, static_cast<int>(std::ceil(
                                                                 2.0 * rough_gaussian_sigma)))});
                }
                images.emplace_back(fs::path(path).filename().string(), std::move(img));
            }
            const fv::IdealSurfaceSpec ideal{rough_thickness, rough_wale, rough_course};
            const fv::RoughnessBatch batch = fv::run_roughness(
                images, ideal, rough_thickness, rough_divisor,
                rough_above_mean ? fv::VolumeMode::above_mean : fv::VolumeMode::total);

            for (const auto& [name, c] : batch.rows) {
                std::cout << name << ": n=" << c.real.peak_count << " kt=" << c.kt << "\n";
            }
            std::cout << "mean_kt: " << batch.mean_kt << "\n";
            if (!rough_csv.empty()) fv::write_criteria_csv(batch.rows, rough_csv);
            if (!rough_report.empty()) fv::emit_report(fv::report_to_json(batch), rough_report);
            return 0;
        });
    }

    if (poro->parsed()) {
        return dispatch([&]() -> int {
            const fv::GrayImage img = fv::load_image(poro_input);
            const double threshold = poro_otsu ? fv::otsu_threshold(img) : poro_threshold;
            std::cout << "threshold: " << threshold
                      << "\nporosity: " << fv::porosity(img, threshold) << "\n";
            return 0;
        });
    }

    if (tightness->parsed()) {
        return dispatch([&]() -> int {
            if ((tf_tex > 0.0) == (tf_ne > 0.0)) {
                throw fv::ArgumentError("tightness: give exactly one of --tex or --ne");
            }
            const double tex = tf_tex > 0.0 ? tf_tex : fv::ne_to_tex(tf_ne);
            std::cout << "tex: " << tex
                      << "\ntightness_factor: " << fv::tightness_factor(tex, tf_needles, tf_stitch)
                      << "\n";
            return 0;
        });
    }

    if (bagging->parsed()) {
        return dispatch([&]() -> int {
            std::cout << "residual_bagging_pct: " << fv::bagging_residual_model(bag_p, bag_tf)
                      << "\n";
            return 0;
        });
    }

    if (bagging_fit->parsed()) {
        return dispatch([&]() -> int {
            const fv::BaggingFit fit = fv::fit_bagging_model(fv::read_blends_csv(fit_csv));
            std::cout << "c0: " << fit.coefficients[0] << "\nc1_p: " << fit.coefficients[1]
                      << "\nc2_tf: " << fit.coefficients[2] << "\nc3_tf2: " << fit.coefficients[3]
                      << "\nr: " << fit.r << "\n";
            return 0;
        });
    }

    if (simplex->parsed()) {
        return dispatch([&]() -> int {
            for (const auto& point : fv::simplex_lattice(simplex_q, simplex_m)) {
                for (std::size_t j = 0; j < point.size(); ++j) {
                    std::cout << (j ? "," : "") << point[j];
                }
                std::cout << "\n";
            }
            return 0;
        });
    }

    if (curve->parsed()) {
        return dispatch([&]() -> int {
            const fv::BaggingCurves curves = fv::read_curves_csv(curve_csv);
            const double pct = fv::bagging_height_from_curve(curves.residual_mm,
                                                             curves.baseline_mm, curves.loaded_mm);
            std::cout << "residual_height_pct: " << pct << "\n";
            return 0;
        });
    }

    return 0;
}
