#include "icy/pipeline.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#include "icy/image_io.hpp"
#include "icy/parallel.hpp"
#include "icy/render.hpp"

namespace fs = std::filesystem;

namespace icy {
namespace {

constexpr const char* kDatasetFile = "dataset.yaml";
constexpr const char* kManifestFile = "manifest.yaml";

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// Everything in a point that changes the terrain or rock geometry.
std::string geometry_key(const SceneConfig& p) {
  SceneConfig k;
  k.terrain = p.terrain;
  k.rocks = p.rocks;
  std::string text = format_config(k);
  // Only the terrain and rocks blocks matter; the rest are defaults.
  return text.substr(0, text.find("material:"));
}

std::string vec_text(const Vec3& v) {
  return "[" + format_double(v.x()) + ", " + format_double(v.y()) + ", " + format_double(v.z()) +
         "]";
}

std::string manifest_text(const SceneConfig& point, std::size_t index, const std::string& name,
                          const Scene& scene) {
  std::string text = format_config(point);
  const StereoRig& rig = scene.rig();
  text += "scene:\n";
  text += "  index: " + std::to_string(index) + "\n";
  text += "  name: " + name + "\n";
  text += "  rock_count: " + std::to_string(scene.geometry().rocks().size()) + "\n";
  text += "  focal_px: " + format_double(rig.intrinsics.focal_px()) + "\n";
  text += "  camera_position: " + vec_text(rig.left.position) + "\n";
  text += "  camera_forward: " + vec_text(rig.left.rotation.col(2)) + "\n";
  return text;
}

void write_scene(const fs::path& dir, const StereoRenderOutput& out) {
  fs::create_directories(dir);
  write_png(dir / "left.png", out.left.rgb);
  write_png(dir / "right.png", out.right.rgb);
  write_pfm(dir / "depth.pfm", out.left.depth);
  write_png16(dir / "depth_mm.png", depth_to_mm(out.left.depth));
  write_png16(dir / "semantic.png", to_u16(out.left.semantic));
  write_png16(dir / "instance.png", to_u16_checked(out.left.instance));
}

// Staging directory removed on scope exit unless released.
class StagingDir {
 public:
  explicit StagingDir(fs::path path) : path_(std::move(path)) {
    std::error_code ec;
    fs::remove_all(path_, ec);
    fs::create_directories(path_);
  }
  ~StagingDir() {
    if (!released_) {
      std::error_code ec;
      fs::remove_all(path_, ec);
    }
  }
  StagingDir(const StagingDir&) = delete;
  StagingDir& operator=(const StagingDir&) = delete;

  const fs::path& path() const { return path_; }
  void release() { released_ = true; }

 private:
  fs::path path_;
  bool released_ = false;
};

void prepare_output(const fs::path& out) {
  if (!fs::exists(out)) return;
  if (!fs::is_directory(out)) throw std::runtime_error(out.string() + " exists and is not a directory");
  if (fs::is_empty(out) || fs::exists(out / kDatasetFile)) return;
  throw std::runtime_error(out.string() +
                           " exists and does not hold a dataset; refusing to overwrite");
}

struct SceneParams {
  std::map<std::string, std::string> values;
  double focal_px = 0.0;
  double baseline = 0.0;
};

SceneParams read_scene_params(const fs::path& manifest) {
  const SceneConfig c = load_config(manifest);
  SceneParams p;
  auto& v = p.values;
  v["terrain_kind"] = std::string(to_string(c.terrain.kind.front()));
  v["terrain_seed"] = std::to_string(c.terrain.seed.front());
  v["albedo"] = format_double(c.material.albedo.front());
  v["specular"] = format_double(c.material.specular.front());
  v["subsurface"] = format_double(c.material.subsurface.front());
  v["transmission"] = format_double(c.material.transmission.front());
  v["texture_noise"] = format_double(c.material.texture_noise.amplitude.front());
  v["sun_irradiance"] = format_double(c.lighting.sun.irradiance.front());
  v["sun_elevation"] = format_double(c.lighting.sun.elevation.front());
  v["sun_azimuth"] = format_double(c.lighting.sun.azimuth.front());
  const YAML::Node root = YAML::LoadFile(manifest.string());
  v["rock_count"] = root["scene"] && root["scene"]["rock_count"]
                        ? root["scene"]["rock_count"].as<std::string>()
                        : "";
  p.focal_px = c.rig.intrinsics.focal_px();
  p.baseline = c.rig.baseline;
  return p;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == s.size();
}

}  // namespace

TerrainAssets build_terrain_assets(const SceneConfig& point) {
  const TerrainConfig& t = point.terrain;
  TerrainOptions options;
  options.penitente_height = t.penitente_height;
  TerrainAssets assets{generate_terrain(t.kind.front(), t.extent, t.resolution, t.seed.front(), options),
                       nullptr};
  RockSpec spec = point.rocks.spec;
  if (point.rocks.albedo) spec.material_id = kRockMaterialId;
  std::vector<RockInstance> rocks = scatter_rocks(assets.heightfield, spec);
  if (rocks.size() > 65535) {
    throw ConfigError("rocks.density", std::to_string(rocks.size()) +
                                           " rocks do not fit the 16-bit instance mask");
  }
  assets.geometry = std::make_shared<SceneGeometry>(heightfield_to_mesh(assets.heightfield),
                                                    std::move(rocks), 0);
  return assets;
}

CameraPose rig_pose(const RigConfig& rig, const HeightField& terrain) {
  if (!terrain.contains(rig.x, rig.y)) {
    throw ConfigError("rig.position", "outside the terrain footprint");
  }
  const Vec3 eye(rig.x, rig.y, terrain.surface_height(rig.x, rig.y) + rig.height);
  const double yaw = deg_to_rad(rig.yaw);
  const double pitch = deg_to_rad(rig.pitch);
  const Vec3 forward(std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw),
                     std::sin(pitch));
  // Straight up or down: keep image "up" pointing along the yaw heading.
  const Vec3 up = std::abs(rig.pitch) > 89.999 ? Vec3(std::cos(yaw), std::sin(yaw), 0.0)
                                               : Vec3::UnitZ();
  return CameraPose::look_at(eye, eye + forward, up);
}

std::shared_ptr<const TextureImage> load_texture(const TextureImageConfig& config) {
  auto tex = std::make_shared<TextureImage>();
  tex->texels = decode_srgb(read_png_rgb(config.path));
  tex->tile_size = config.tile_size;
  return tex;
}

Scene build_scene(const SceneConfig& point, const TerrainAssets& assets,
                  std::shared_ptr<const TextureImage> texture) {
  const MaterialConfig& mc = point.material;
  Material terrain;
  const double a = mc.albedo.front();
  terrain.albedo = Color(a, a, a);
  terrain.roughness = mc.roughness;
  terrain.specular = mc.specular.front();
  terrain.subsurface = mc.subsurface.front();
  terrain.transmission = mc.transmission.front();
  const double amplitude = mc.texture_noise.amplitude.front();
  if (amplitude > 0.0) {
    NoiseSpec ns = mc.texture_noise.noise;
    ns.amplitude = amplitude;
    terrain.texture_noise = std::make_shared<NoiseField>(ns);
  }
  if (mc.texture_image) {
    terrain.texture_image = texture ? std::move(texture) : load_texture(*mc.texture_image);
  }
  std::vector<Material> materials{terrain};
  if (point.rocks.albedo) {
    Material rock = terrain;
    const double r = *point.rocks.albedo;
    rock.albedo = Color(r, r, r);
    materials.push_back(rock);
  }

  Lighting lighting;
  const SunConfig& sc = point.lighting.sun;
  lighting.sun.irradiance = sc.irradiance.front();
  lighting.sun.angular_diameter = sc.angular_diameter;
  lighting.sun.elevation = sc.elevation.front();
  lighting.sun.azimuth = sc.azimuth.front();
  const PlanetConfig& pc = point.lighting.planet;
  lighting.planet.enabled = pc.enabled;
  lighting.planet.body_diameter = pc.body_diameter;
  lighting.planet.distance = pc.distance;
  lighting.planet.direction = sun_direction(pc.elevation, pc.azimuth);
  lighting.planet.disc_radiance_scale = pc.disc_radiance_scale;
  lighting.ambient = Lighting::ambient_from_sun(lighting.sun, point.lighting.ambient_fraction);

  StereoRig rig;
  rig.intrinsics = point.rig.intrinsics;
  rig.baseline = point.rig.baseline;
  rig.left = rig_pose(point.rig, assets.heightfield);

  return Scene::assemble(assets.geometry, std::move(materials), lighting, rig);
}

std::string scene_name(std::size_t index, const SceneConfig& point) {
  char buf[32];
  const auto h = static_cast<unsigned>(fnv1a(format_config(point)) >> 32);
  std::snprintf(buf, sizeof buf, "%05zu_%08x", index, h);
  return buf;
}

GenerateResult generate_dataset(const SceneConfig& input, const fs::path& out,
                                const GenerateOptions& options) {
  SceneConfig config = input;
  if (options.seed_override) override_seeds(config, *options.seed_override);
  const std::vector<SceneConfig> points = expand_sweep(config);
  prepare_output(out);

  const fs::path target = fs::absolute(out).lexically_normal();
  StagingDir staging(target.parent_path() / ("." + target.filename().string() + ".staging"));

  std::shared_ptr<const TextureImage> texture;
  if (config.material.texture_image) texture = load_texture(*config.material.texture_image);

  // Geometry is shared by every point with the same terrain and rocks.
  std::vector<std::string> keys;
  std::map<std::string, std::size_t> key_index;
  std::vector<std::size_t> asset_of(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::string key = geometry_key(points[i]);
    auto [it, inserted] = key_index.emplace(key, keys.size());
    if (inserted) keys.push_back(key);
    asset_of[i] = it->second;
  }
  std::vector<std::size_t> first_point(keys.size());
  for (std::size_t i = points.size(); i-- > 0;) first_point[asset_of[i]] = i;

  const int workers = resolve_thread_count(options.threads);
  std::vector<TerrainAssets> assets(keys.size());
  parallel_for(keys.size(), workers, [&](std::size_t k) {
    assets[k] = build_terrain_assets(points[first_point[k]]);
  });

  GenerateResult result;
  result.dataset = target;
  result.scenes.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) result.scenes[i] = scene_name(i, points[i]);

  const bool scene_parallel = workers > 1 && points.size() > 1;
  parallel_for(points.size(), workers, [&](std::size_t i) {
    const Scene scene = build_scene(points[i], assets[asset_of[i]], texture);
    RenderSettings settings = points[i].render;
    settings.threads = scene_parallel ? 1 : workers;
    const StereoRenderOutput rendered = render_stereo(scene, settings);
    if (auto violation = check_render_invariants(rendered.left, scene.geometry().rocks().size())) {
      throw std::runtime_error(result.scenes[i] + ": " + *violation);
    }
    const fs::path dir = staging.path() / result.scenes[i];
    write_scene(dir, rendered);
    write_text(dir / kManifestFile, manifest_text(points[i], i, result.scenes[i], scene));
  });

  std::string index = "version: " + std::to_string(kConfigVersion) + "\n";
  index += "scene_count: " + std::to_string(points.size()) + "\n";
  index += "scenes:\n";
  for (const std::string& name : result.scenes) index += "  - " + name + "\n";
  write_text(staging.path() / kDatasetFile, index);
  write_text(staging.path() / "config.yaml", format_config(config));

  if (fs::exists(target)) fs::remove_all(target);
  fs::rename(staging.path(), target);
  staging.release();
  return result;
}

std::vector<std::string> list_scenes(const fs::path& dataset) {
  const fs::path index = dataset / kDatasetFile;
  if (!fs::exists(index)) throw std::runtime_error(index.string() + " not found");
  const YAML::Node root = YAML::LoadFile(index.string());
  std::vector<std::string> scenes;
  if (const YAML::Node list = root["scenes"]) {
    for (const auto& n : list) scenes.push_back(n.as<std::string>());
  }
  return scenes;
}

Matcher parse_matcher(std::string_view name) {
  if (name == "block") return Matcher::block;
  if (name == "pyramid") return Matcher::pyramid;
  throw std::invalid_argument("unknown matcher '" + std::string(name) +
                              "' (expected block or pyramid)");
}

std::string_view to_string(Matcher matcher) {
  return matcher == Matcher::block ? "block" : "pyramid";
}

std::string describe_matcher(const EstimateOptions& o) {
  const BlockMatchParams& b = o.matcher == Matcher::block ? o.block : o.pyramid.base;
  std::ostringstream s;
  s << "matcher=" << to_string(o.matcher) << " num_disparities=" << b.num_disparities
    << " window=" << b.window << " min_disparity=" << b.min_disparity
    << " uniqueness_ratio=" << format_double(b.uniqueness_ratio)
    << " lr_consistency_px=" << b.lr_consistency_px << " subpixel=" << (b.subpixel ? "true" : "false");
  if (o.matcher == Matcher::pyramid) {
    s << " levels=" << o.pyramid.levels << " log_sigma=" << format_double(o.pyramid.log_kernel_sigma);
  }
  return s.str();
}

DisparityMap run_matcher(const GrayImage& left, const GrayImage& right,
                         const EstimateOptions& options) {
  return options.matcher == Matcher::block ? block_match(left, right, options.block)
                                           : pyramid_match(left, right, options.pyramid);
}

EstimateResult estimate_dataset(const fs::path& dataset, const EstimateOptions& options) {
  const std::string m(to_string(options.matcher));
  options.block.validate();
  options.pyramid.validate();
  const std::vector<std::string> scenes = list_scenes(dataset);

  const int workers = resolve_thread_count(options.threads);
  EstimateOptions per_scene = options;
  const int inner = workers > 1 && scenes.size() > 1 ? 1 : workers;
  per_scene.block.threads = inner;
  per_scene.pyramid.base.threads = inner;

  std::vector<std::optional<double>> seconds(scenes.size());
  std::vector<std::string> skip_reason(scenes.size());
  parallel_for(scenes.size(), workers, [&](std::size_t i) {
    const fs::path dir = dataset / scenes[i];
    for (const char* f : {"left.png", "right.png", kManifestFile}) {
      if (!fs::exists(dir / f)) {
        skip_reason[i] = std::string("missing ") + f;
        return;
      }
    }
    try {
      const SceneParams params = read_scene_params(dir / kManifestFile);
      const GrayImage left = to_grayscale(read_png_rgb(dir / "left.png"));
      const GrayImage right = to_grayscale(read_png_rgb(dir / "right.png"));
      const auto start = std::chrono::steady_clock::now();
      const DisparityMap disparity = run_matcher(left, right, per_scene);
      const auto stop = std::chrono::steady_clock::now();
      seconds[i] = std::chrono::duration<double>(stop - start).count();
      write_pfm(dir / ("disparity_" + m + ".pfm"), disparity.values);
      write_pfm(dir / ("depth_" + m + ".pfm"),
                disparity_to_depth(disparity, params.focal_px, params.baseline));
    } catch (const std::exception& e) {
      seconds[i].reset();
      skip_reason[i] = e.what();
    }
  });

  EstimateResult result;
  std::ostringstream log;
  log << describe_matcher(options) << "\n";
  log << "scene seconds\n";
  double total = 0.0;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    if (seconds[i]) {
      ++result.processed;
      total += *seconds[i];
      log << scenes[i] << ' ' << *seconds[i] << "\n";
    } else {
      result.skipped.push_back(scenes[i] + ": " + skip_reason[i]);
      log << scenes[i] << " skipped: " << skip_reason[i] << "\n";
    }
  }
  if (result.processed > 0) {
    log << "mean_seconds_per_pair " << total / static_cast<double>(result.processed) << "\n";
  }
  write_text(dataset / ("estimate_" + m + ".log"), log.str());
  return result;
}

const std::vector<std::string>& scene_parameter_columns() {
  static const std::vector<std::string> columns{
      "terrain_kind", "terrain_seed",  "rock_count",     "albedo",        "specular",
      "subsurface",   "transmission",  "texture_noise",  "sun_irradiance", "sun_elevation",
      "sun_azimuth"};
  return columns;
}

const std::vector<std::string>& metric_columns() {
  static const std::vector<std::string> columns{"l1",   "l1_rate_10",     "si_rmse", "si_rmse_sqrt",
                                                "dod",  "valid_fraction", "n_pixels", "n_pairs"};
  return columns;
}

CsvTable evaluate_dataset(const fs::path& dataset, const MetricsOptions& options) {
  CsvTable table;
  table.header = {"scene", "matcher", "status"};
  for (const auto& c : metric_columns()) table.header.push_back(c);
  for (const auto& c : scene_parameter_columns()) table.header.push_back(c);

  for (const std::string& scene : list_scenes(dataset)) {
    const fs::path dir = dataset / scene;
    if (!fs::is_directory(dir)) continue;
    std::vector<std::string> matchers;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string f = entry.path().filename().string();
      if (f.rfind("depth_", 0) == 0 && entry.path().extension() == ".pfm") {
        matchers.push_back(f.substr(6, f.size() - 6 - 4));
      }
    }
    std::sort(matchers.begin(), matchers.end());

    std::map<std::string, std::string> params;
    std::string scene_error;
    try {
      params = read_scene_params(dir / kManifestFile).values;
    } catch (const std::exception& e) {
      scene_error = std::string("manifest: ") + e.what();
    }
    std::optional<DepthImage> gt;
    if (scene_error.empty()) {
      try {
        gt = to_depth_image(read_pfm(dir / "depth.pfm"));
      } catch (const std::exception& e) {
        scene_error = std::string("ground truth: ") + e.what();
      }
    }

    for (const std::string& m : matchers) {
      std::vector<std::string> row{scene, m, "ok"};
      std::vector<std::string> metrics(metric_columns().size());
      std::string status = scene_error;
      if (status.empty()) {
        try {
          const DepthImage pred = to_depth_image(read_pfm(dir / ("depth_" + m + ".pfm")));
          if (!pred.same_size(*gt)) {
            status = "dimension mismatch: " + std::to_string(pred.width()) + "x" +
                     std::to_string(pred.height()) + " vs " + std::to_string(gt->width()) + "x" +
                     std::to_string(gt->height());
          } else {
            const MetricsReport r = evaluate(pred, *gt, options);
            metrics = {format_double(r.l1),           format_double(r.l1_rate_10),
                       format_double(r.si_rmse),      format_double(r.si_rmse_sqrt),
                       format_double(r.dod),          format_double(r.valid_fraction),
                       std::to_string(r.n_pixels),    std::to_string(r.n_pairs)};
          }
        } catch (const std::exception& e) {
          status = e.what();
        }
      }
      if (!status.empty()) {
        row[2] = "error: " + status;
        metrics.assign(metric_columns().size(), "");
      }
      row.insert(row.end(), metrics.begin(), metrics.end());
      for (const auto& c : scene_parameter_columns()) row.push_back(params.count(c) ? params[c] : "");
      table.rows.push_back(std::move(row));
    }
  }
  write_csv(dataset / "metrics.csv", table);

  CsvTable summary;
  summary.header = {"matcher", "scenes", "errors"};
  const std::vector<std::string> averaged{"l1", "l1_rate_10", "si_rmse", "si_rmse_sqrt", "dod",
                                          "valid_fraction"};
  for (const auto& c : averaged) summary.header.push_back("mean_" + c);
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
  std::map<std::string, std::vector<double>> sums;
  for (const auto& row : table.rows) {
    auto& [ok, errors] = counts[row[1]];
    auto& s = sums[row[1]];
    s.resize(averaged.size(), 0.0);
    if (row[2] != "ok") {
      ++errors;
      continue;
    }
    ++ok;
    for (std::size_t k = 0; k < averaged.size(); ++k) {
      s[k] += std::stod(row[*table.column(averaged[k])]);
    }
  }
  for (const auto& [m, c] : counts) {
    std::vector<std::string> row{m, std::to_string(c.first), std::to_string(c.second)};
    for (double s : sums[m]) {
      row.push_back(c.first > 0 ? format_double(s / static_cast<double>(c.first)) : "");
    }
    summary.rows.push_back(std::move(row));
  }
  write_csv(dataset / "metrics_summary.csv", summary);
  return table;
}

CsvTable sweep_report(const CsvTable& metrics, const std::string& axis) {
  const auto axis_col = metrics.column(axis);
  if (!axis_col) {
    std::string known;
    for (const auto& c : metrics.header) known += (known.empty() ? "" : ", ") + c;
    throw std::invalid_argument("unknown axis '" + axis + "' (columns: " + known + ")");
  }
  const auto matcher_col = metrics.column("matcher");
  const auto status_col = metrics.column("status");
  std::vector<std::string> averaged;
  std::vector<std::size_t> averaged_cols;
  for (const std::string& c : metric_columns()) {
    if (c == axis || c == "n_pixels" || c == "n_pairs") continue;
    if (auto col = metrics.column(c)) {
      averaged.push_back(c);
      averaged_cols.push_back(*col);
    }
  }

  struct Group {
    std::size_t count = 0;
    std::vector<double> sums;
  };
  std::map<std::pair<std::string, std::string>, Group> groups;
  for (const auto& row : metrics.rows) {
    if (status_col && row[*status_col] != "ok") continue;
    Group& g = groups[{row[*axis_col], matcher_col ? row[*matcher_col] : ""}];
    g.sums.resize(averaged.size(), 0.0);
    ++g.count;
    for (std::size_t k = 0; k < averaged.size(); ++k) {
      double v = 0.0;
      if (!parse_number(row[averaged_cols[k]], v)) {
        throw std::runtime_error("non-numeric value '" + row[averaged_cols[k]] + "' in column " +
                                 averaged[k]);
      }
      g.sums[k] += v;
    }
  }

  std::vector<std::pair<std::pair<std::string, std::string>, Group>> ordered(groups.begin(),
                                                                              groups.end());
  bool numeric = true;
  for (const auto& [key, g] : ordered) {
    double v = 0.0;
    numeric = numeric && parse_number(key.first, v);
  }
  if (numeric) {
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
      const double x = std::stod(a.first.first);
      const double y = std::stod(b.first.first);
      return x != y ? x < y : a.first.second < b.first.second;
    });
  }

  CsvTable out;
  out.header = {axis};
  if (matcher_col) out.header.push_back("matcher");
  out.header.push_back("count");
  for (const auto& c : averaged) out.header.push_back("mean_" + c);
  for (const auto& [key, g] : ordered) {
    std::vector<std::string> row{key.first};
    if (matcher_col) row.push_back(key.second);
    row.push_back(std::to_string(g.count));
    for (double s : g.sums) row.push_back(format_double(s / static_cast<double>(g.count)));
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace icy
