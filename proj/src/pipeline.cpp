#include "fabricvision/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "fabricvision/wavelet.hpp"

namespace fabricvision {

namespace {

using nlohmann::json;

LabelMap upsample_labels(const LabelMap& coarse, int factor, int width, int height) {
    LabelMap out(width, height);
    for (int y = 0; y < height; ++y) {
        const int sy = std::min(y / factor, coarse.height - 1);
        for (int x = 0; x < width; ++x) {
            const int sx = std::min(x / factor, coarse.width - 1);
            out.at(x, y) = coarse.at(sx, sy);
        }
    }
    return out;
}

json config_to_json(const PipelineConfig& cfg) {
    json j;
    j["variant"] = to_string(cfg.variant);
    j["wavelet_levels"] = cfg.wavelet_levels;
    j["feature_mode"] =
        cfg.feature_mode == FeatureMode::intensity ? "intensity" : "intensity+local-stats";
    j["clusters"] = cfg.fcm.clusters;
    j["fuzzifier"] = cfg.fcm.fuzzifier;
    j["epsilon"] = cfg.fcm.epsilon;
    j["max_iter"] = cfg.fcm.max_iter;
    j["seed"] = cfg.fcm.seed;
    if (cfg.variant == Variant::fcm2) {
        j["gaussian_sigma"] = cfg.gaussian.sigma_s;
        j["gaussian_radius"] = cfg.gaussian.radius;
    } else {
        j["bilateral_delta_s"] = cfg.bilateral.delta_s;
        j["bilateral_delta_g"] = cfg.bilateral.delta_g;
        j["bilateral_radius"] = cfg.bilateral.radius;
    }
    if (cfg.variant == Variant::hybrid) j["kernel_sigma"] = cfg.kernel.sigma;
    return j;
}

}  // namespace

std::string to_string(Variant v) {
    switch (v) {
        case Variant::hybrid: return "hybrid";
        case Variant::fcm1: return "fcm1";
        case Variant::fcm2: return "fcm2";
    }
    return "hybrid";
}

Variant variant_from_string(const std::string& name) {
    if (name == "hybrid") return Variant::hybrid;
    if (name == "fcm1") return Variant::fcm1;
    if (name == "fcm2") return Variant::fcm2;
    throw ArgumentError("unknown variant '" + name + "' (hybrid|fcm1|fcm2)");
}

void PipelineConfig::validate() const {
    if (variant == Variant::fcm2 && wavelet_levels > 0) {
        throw ArgumentError("config: fcm2 runs at full resolution; wavelet_levels must be 0");
    }
    if (variant != Variant::fcm2 && wavelet_levels < 1) {
        throw ArgumentError("config: hybrid/fcm1 need wavelet_levels >= 1");
    }
    if (variant == Variant::hybrid && kernel.sigma <= 0.0) {
        throw ArgumentError("config: hybrid needs a kernel sigma > 0");
    }
    if (fcm.clusters < 2) throw ArgumentError("config: clusters must be >= 2");
}

std::pair<LabelMap, SegmentationReport> run_segmentation(const PipelineConfig& cfg,
                                                         const GrayImage& img,
                                                         const IterationObserver& observer) {
    cfg.validate();
    if (img.empty()) throw ArgumentError("run_segmentation: empty image");
    const int factor = 1 << cfg.wavelet_levels;
    if (cfg.wavelet_levels > 0 && (img.width() < factor || img.height() < factor)) {
        throw ArgumentError("run_segmentation: image smaller than 2^levels per axis");
    }

    SegmentationReport report;
    report.variant = to_string(cfg.variant);
    report.clusters = cfg.fcm.clusters;
    report.config_echo = config_to_json(cfg);

    GrayImage working;
    if (cfg.variant == Variant::fcm2) {
        working = gaussian_filter(img, cfg.gaussian);
        report.stages.push_back("gaussian");
    } else {
        working = bilateral_filter(img, cfg.bilateral);
        report.stages.push_back("bilateral");
        const WaveletPyramid pyr = decompose(working, cfg.wavelet_levels);
        report.stages.push_back("wavelet");
        working = approximation(pyr);
        report.stages.push_back("approximation");
    }

    const FeatureMatrix features = extract_features(working, cfg.feature_mode);
    report.stages.push_back("features");

    const auto started = std::chrono::steady_clock::now();
    ClusterModel model;
    if (cfg.variant == Variant::hybrid) {
        model = kfcm_fit(features, cfg.fcm, cfg.kernel, observer);
        report.stages.push_back("kfcm");
    } else {
        model = fcm_fit(features, cfg.fcm, observer);
        report.stages.push_back("fcm");
    }
    const auto finished = std::chrono::steady_clock::now();
    report.runtime_seconds = std::chrono::duration<double>(finished - started).count();

    report.iterations_used = model.iterations_used;
    report.converged = model.converged;
    report.objective_final =
        model.objective_history.empty() ? 0.0 : model.objective_history.back();

    LabelMap labels = labels_from_membership(model, working.width(), working.height());
    report.stages.push_back("labels");
    if (cfg.wavelet_levels > 0) {
        labels = upsample_labels(labels, factor, img.width(), img.height());
        report.stages.push_back("upsample");
    }

    if (cfg.truth) {
        const LabelMap aligned = align_labels(labels, *cfg.truth, cfg.fcm.clusters);
        const ConfusionMatrix cm = confusion(aligned, *cfg.truth, cfg.fcm.clusters);
        report.kc_percent = kappa(cm);
        report.car_percent = car(cm);
        labels = aligned;
        report.stages.push_back("score");
    }
    return {std::move(labels), std::move(report)};
}

RoughnessBatch run_roughness(const std::vector<std::pair<std::string, GrayImage>>& images,
                             const IdealSurfaceSpec& ideal, double thickness_mm,
                             double kt_divisor, VolumeMode volume_mode) {
    if (images.empty()) throw ArgumentError("run_roughness: need at least one image");

    RoughnessBatch batch;
    double kt_sum = 0.0;
    for (const auto& [name, img] : images) {
        const SurfaceProfile profile = image_to_profile(img, thickness_mm);
        const RawSurfaceStats real = surface_stats(profile, img, volume_mode);

        // The reference is scored through the same gray -> profile path as
        // the scanned image, so an input equal to the rendered ideal scores
        // exactly zero on every criterion.
        const GrayImage reference_gray =
            profile_to_image(ideal_surface(ideal, img.width(), img.height()));
        const RawSurfaceStats ideal_stats = surface_stats(
            image_to_profile(reference_gray, thickness_mm), reference_gray, volume_mode);

        const RoughnessCriteria criteria = roughness_index(real, ideal_stats, kt_divisor);
        kt_sum += criteria.kt;
        batch.rows.emplace_back(name, criteria);
    }
    batch.mean_kt = kt_sum / static_cast<double>(batch.rows.size());
    return batch;
}

double round_sig(double value, int digits) {
    if (value == 0.0 || !std::isfinite(value)) return value;
    const double magnitude = std::floor(std::log10(std::abs(value)));
    const double scale = std::pow(10.0, digits - 1 - magnitude);
    return std::round(value * scale) / scale;
}

nlohmann::json report_to_json(const SegmentationReport& report) {
    json j;
    j["schema"] = "fabricvision/1";
    j["kind"] = "segmentation";
    j["variant"] = report.variant;
    j["clusters"] = report.clusters;
    j["iterations_used"] = report.iterations_used;
    j["converged"] = report.converged;
    j["runtime_seconds"] = round_sig(report.runtime_seconds, 6);
    j["objective_final"] = round_sig(report.objective_final, 6);
    if (report.kc_percent) j["kc_percent"] = round_sig(*report.kc_percent, 6);
    if (report.car_percent) j["car_percent"] = round_sig(*report.car_percent, 6);
    j["stages"] = report.stages;
    j["config"] = report.config_echo;
    return j;
}

nlohmann::json report_to_json(const RoughnessBatch& batch) {
    json j;
    j["schema"] = "fabricvision/1";
    j["kind"] = "roughness";
    json rows = json::array();
    for (const auto& [name, c] : batch.rows) {
        json row;
        row["image"] = name;
        row["n"] = c.real.peak_count;
        row["v"] = round_sig(c.real.distance_variance, 6);
        row["s"] = round_sig(c.real.volume, 6);
        row["a"] = round_sig(c.real.dispersion, 6);
        row["g"] = round_sig(c.real.peak_cv_percent, 6);
        row["k1"] = round_sig(c.k1, 6);
        row["k2"] = round_sig(c.k2, 6);
        row["k3"] = round_sig(c.k3, 6);
        row["k4"] = round_sig(c.k4, 6);
        row["k5"] = round_sig(c.k5, 6);
        row["kt"] = round_sig(c.kt, 6);
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    j["mean_kt"] = round_sig(batch.mean_kt, 6);
    return j;
}

void emit_report(const nlohmann::json& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << report.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

void save_label_map(const LabelMap& map, int classes, const std::string& path) {
    if (classes < 2) throw ArgumentError("save_label_map: need at least 2 classes");
    GrayImage img(map.width, map.height);
    for (std::size_t i = 0; i < map.labels.size(); ++i) {
        img.data()[i] = std::floor(255.0 * map.labels[i] / (classes - 1));
    }
    save_image(img, path);
}

LabelMap load_label_map(const std::string& path, int classes) {
    const GrayImage img = load_image(path);
    LabelMap map(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const int label = static_cast<int>(std::lround(img.data()[i]));
        if (label < 0 || label >= classes) {
            throw ArgumentError("truth map: label " + std::to_string(label) +
                                " outside 0.." + std::to_string(classes - 1));
        }
        map.labels[i] = label;
    }
    return map;
}

}  // namespace fabricvision
