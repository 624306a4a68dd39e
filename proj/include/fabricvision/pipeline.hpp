#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fabricvision/clustering.hpp"
#include "fabricvision/evaluation.hpp"
#include "fabricvision/filters.hpp"
#include "fabricvision/image.hpp"
#include "fabricvision/roughness.hpp"

namespace fabricvision {

// Segmentation presets:
//   hybrid - bilateral filter, wavelet approximation, kernel FCM
//   fcm1   - bilateral filter, wavelet approximation, classic FCM
//   fcm2   - Gaussian filter, classic FCM at full resolution (no wavelet)
enum class Variant { hybrid, fcm1, fcm2 };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

struct PipelineConfig {
    Variant variant = Variant::hybrid;
    BilateralParams bilateral{};       // hybrid / fcm1 front end
    GaussianParams gaussian{1.5, 3};   // fcm2 front end
    int wavelet_levels = 2;            // must be 0 for fcm2
    FeatureMode feature_mode = FeatureMode::intensity;
    FcmConfig fcm{};
    KernelSpec kernel{};               // hybrid only
    std::optional<LabelMap> truth;     // enables KC/CAR in the report

    void validate() const;
};

struct SegmentationReport {
    std::string variant;
    int clusters = 0;
    int iterations_used = 0;
    bool converged = false;
    double runtime_seconds = 0.0;  // wall clock around the fit only
    double objective_final = 0.0;
    std::optional<double> kc_percent;   // present iff truth supplied
    std::optional<double> car_percent;
    std::vector<std::string> stages;    // executed stage names, in order
    nlohmann::json config_echo;
};

// Runs one segmentation preset end to end. The label map is returned at the
// full input resolution (nearest-neighbor upsampling of the approximation-
// scale labels, cropped to the input size).
std::pair<LabelMap, SegmentationReport> run_segmentation(
    const PipelineConfig& cfg, const GrayImage& img,
    const IterationObserver& observer = nullptr);

struct RoughnessBatch {
    std::vector<std::pair<std::string, RoughnessCriteria>> rows;  // (name, criteria)
    double mean_kt = 0.0;
};

// Scores each image against the rendered ideal surface (same dimensions per
// image) and aggregates the mean kt.
RoughnessBatch run_roughness(const std::vector<std::pair<std::string, GrayImage>>& images,
                             const IdealSurfaceSpec& ideal, double thickness_mm,
                             double kt_divisor = 1000.0,
                             VolumeMode volume_mode = VolumeMode::total);

// Rounds to at most `digits` significant digits; report numbers use 6.
double round_sig(double value, int digits);

nlohmann::json report_to_json(const SegmentationReport& report);
nlohmann::json report_to_json(const RoughnessBatch& batch);

// Writes a schema-tagged JSON document ("fabricvision/1") with stable key
// order and 2-space indentation.
void emit_report(const nlohmann::json& report, const std::string& path);

// Label map persistence: class i is stored as gray floor(255 * i / (c - 1)).
void save_label_map(const LabelMap& map, int classes, const std::string& path);

// Truth maps are PGMs whose pixel values are the class ids themselves.
LabelMap load_label_map(const std::string& path, int classes);

}  // namespace fabricvision
