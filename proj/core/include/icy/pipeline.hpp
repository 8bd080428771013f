#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icy/config.hpp"
#include "icy/csv.hpp"
#include "icy/heightfield.hpp"
#include "icy/metrics.hpp"
#include "icy/scene.hpp"
#include "icy/stereo.hpp"

namespace icy {

// ---- generate -------------------------------------------------------------

/// Terrain heightfield plus the merged terrain/rock geometry for one
/// (terrain, rocks) configuration.
struct TerrainAssets {
  HeightField heightfield;
  std::shared_ptr<const SceneGeometry> geometry;
};

/// Material id used for rocks when rocks.albedo is set.
inline constexpr int kRockMaterialId = 1;

TerrainAssets build_terrain_assets(const SceneConfig& point);

/// Left-camera pose from the rig placement over the given terrain.
CameraPose rig_pose(const RigConfig& rig, const HeightField& terrain);

/// Scene for one sweep point (all axes single-valued).
Scene build_scene(const SceneConfig& point, const TerrainAssets& assets,
                  std::shared_ptr<const TextureImage> texture = nullptr);

/// Loads an 8-bit sRGB PNG as a linear texture.
std::shared_ptr<const TextureImage> load_texture(const TextureImageConfig& config);

/// "NNNNN_hhhhhhhh": zero-padded sweep index and a hash of the point's
/// canonical config text.
std::string scene_name(std::size_t index, const SceneConfig& point);

struct GenerateOptions {
  int threads = 0;  // scene-level workers; 0 = hardware concurrency
  std::optional<std::uint64_t> seed_override;
};

struct GenerateResult {
  std::filesystem::path dataset;
  std::vector<std::string> scenes;
};

/// Renders every sweep point into `out`/<scene>/. Output is first written to
/// a sibling staging directory and moved into place on success; on failure
/// the staging directory is removed. An existing `out` is replaced only if
/// it holds a previous dataset (dataset.yaml) or is empty.
GenerateResult generate_dataset(const SceneConfig& config, const std::filesystem::path& out,
                                const GenerateOptions& options = {});

/// Scene directory names listed in <dataset>/dataset.yaml.
std::vector<std::string> list_scenes(const std::filesystem::path& dataset);

// ---- estimate -------------------------------------------------------------

enum class Matcher { block, pyramid };

Matcher parse_matcher(std::string_view name);
std::string_view to_string(Matcher matcher);

struct EstimateOptions {
  Matcher matcher = Matcher::block;
  BlockMatchParams block;
  PyramidParams pyramid;
  int threads = 0;
};

struct EstimateResult {
  std::size_t processed = 0;
  std::vector<std::string> skipped;  // "<scene>: <reason>"
};

/// One-line parameter summary as written to the runtime log.
std::string describe_matcher(const EstimateOptions& options);

/// Disparity map for a left/right pair with the selected matcher.
DisparityMap run_matcher(const GrayImage& left, const GrayImage& right,
                         const EstimateOptions& options);

/// Writes disparity_<m>.pfm and depth_<m>.pfm into every scene directory
/// and estimate_<m>.log (parameters, seconds per pair, skips) at the top.
EstimateResult estimate_dataset(const std::filesystem::path& dataset,
                                const EstimateOptions& options = {});

// ---- evaluate -------------------------------------------------------------

/// Scene parameter columns appended to every metrics row.
const std::vector<std::string>& scene_parameter_columns();
/// Metric columns, in CSV order.
const std::vector<std::string>& metric_columns();

/// Scores every depth_<m>.pfm against the scene's depth.pfm. Writes
/// metrics.csv (one row per scene and matcher) and metrics_summary.csv
/// (per-matcher means over successful rows) and returns the former.
CsvTable evaluate_dataset(const std::filesystem::path& dataset,
                          const MetricsOptions& options = {});

/// Mean of every metric grouped by (axis value, matcher), rows sorted by
/// axis value (numerically when all values are numbers). Rows whose status
/// is not "ok" are skipped.
CsvTable sweep_report(const CsvTable& metrics, const std::string& axis);

}  // namespace icy
