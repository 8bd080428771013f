#include "icy/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "icy/csv.hpp"
#include "icy/material.hpp"
#include "icy/rng.hpp"

namespace icy {
namespace {

std::string join_key(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

template <typename T>
T convert(const YAML::Node& node, const std::string& key);

template <>
double convert<double>(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError(key, "expected a number");
  try {
    const double v = node.as<double>();
    if (!std::isfinite(v)) throw ConfigError(key, "must be finite");
    return v;
  } catch (const YAML::Exception&) {
    throw ConfigError(key, "expected a number, got '" + node.Scalar() + "'");
  }
}

template <>
int convert<int>(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError(key, "expected an integer");
  try {
    return node.as<int>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key, "expected an integer, got '" + node.Scalar() + "'");
  }
}

template <>
std::uint64_t convert<std::uint64_t>(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError(key, "expected a non-negative integer");
  try {
    return node.as<std::uint64_t>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key, "expected a non-negative integer, got '" + node.Scalar() + "'");
  }
}

template <>
bool convert<bool>(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError(key, "expected true or false");
  try {
    return node.as<bool>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key, "expected true or false, got '" + node.Scalar() + "'");
  }
}

template <>
std::string convert<std::string>(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError(key, "expected a string");
  return node.Scalar();
}

template <>
TerrainKind convert<TerrainKind>(const YAML::Node& node, const std::string& key) {
  try {
    return parse_terrain_kind(convert<std::string>(node, key));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

template <>
RockOrientation convert<RockOrientation>(const YAML::Node& node, const std::string& key) {
  try {
    return parse_rock_orientation(convert<std::string>(node, key));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

template <>
NoiseBasis convert<NoiseBasis>(const YAML::Node& node, const std::string& key) {
  try {
    return parse_noise_basis(convert<std::string>(node, key));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

// Reads the keys of one mapping and rejects any it was not asked about.
class MapReader {
 public:
  MapReader(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      throw ConfigError(path_.empty() ? "<root>" : path_, "expected a mapping");
    }
  }

  bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }

  template <typename T>
  void scalar(const std::string& key, T& out) {
    if (const YAML::Node n = get(key)) out = convert<T>(n, join_key(path_, key));
  }

  template <typename T>
  void optional(const std::string& key, std::optional<T>& out) {
    if (const YAML::Node n = get(key)) out = convert<T>(n, join_key(path_, key));
  }

  template <typename T>
  void list(const std::string& key, std::vector<T>& out) {
    const YAML::Node n = get(key);
    if (!n) return;
    const std::string full = join_key(path_, key);
    out.clear();
    if (n.IsSequence()) {
      for (std::size_t i = 0; i < n.size(); ++i) {
        out.push_back(convert<T>(n[i], full + "[" + std::to_string(i) + "]"));
      }
      if (out.empty()) throw ConfigError(full, "sweep list must not be empty");
    } else {
      out.push_back(convert<T>(n, full));
    }
  }

  MapReader child(const std::string& key) { return MapReader(get(key), join_key(path_, key)); }

  void ignore(const std::string& key) { seen_.insert(key); }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError(join_key(path_, key), "unknown key");
    }
  }

 private:
  YAML::Node get(const std::string& key) {
    seen_.insert(key);
    if (!node_ || !node_.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
    const YAML::Node n = node_[key];
    if (n && n.IsNull()) throw ConfigError(join_key(path_, key), "missing value");
    return n;
  }

  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_xy(MapReader& r, const std::string& key, const std::string& full_key, double& x,
             double& y) {
  std::vector<double> xy;
  r.list(key, xy);
  if (!xy.empty()) {
    if (xy.size() != 2) throw ConfigError(full_key, "expected [x, y]");
    x = xy[0];
    y = xy[1];
  }
}

template <typename Fn>
void check(const std::string& key, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key, e.what());
  }
}

void require(bool ok, const std::string& key, const std::string& message) {
  if (!ok) throw ConfigError(key, message);
}

void require_unit(const std::vector<double>& values, const std::string& key) {
  for (double v : values) require(v >= 0.0 && v <= 1.0, key, "values must be in [0, 1]");
}

// Emits the YAML subset parse_config reads.
class Writer {
 public:
  void open(const std::string& key) {
    line(key + ":");
    ++depth_;
  }
  void close() { --depth_; }

  void value(const std::string& key, const std::string& text) { line(key + ": " + text); }
  void value(const std::string& key, double v) { value(key, format_double(v)); }
  void value(const std::string& key, int v) { value(key, std::to_string(v)); }
  void value(const std::string& key, std::uint64_t v) { value(key, std::to_string(v)); }
  void value(const std::string& key, bool v) { value(key, std::string(v ? "true" : "false")); }
  void quoted(const std::string& key, const std::string& text) {
    std::string q = "\"";
    for (char c : text) {
      if (c == '"' || c == '\\') q += '\\';
      q += c;
    }
    value(key, q + "\"");
  }

  template <typename T, typename Fmt>
  void axis(const std::string& key, const std::vector<T>& values, Fmt fmt) {
    if (values.size() == 1) {
      value(key, fmt(values.front()));
      return;
    }
    std::string text = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i > 0) text += ", ";
      text += fmt(values[i]);
    }
    value(key, text + "]");
  }
  void axis(const std::string& key, const std::vector<double>& values) {
    axis(key, values, [](double v) { return format_double(v); });
  }

  std::string str() const { return out_.str(); }

 private:
  void line(const std::string& text) { out_ << std::string(2 * depth_, ' ') << text << '\n'; }

  std::ostringstream out_;
  int depth_ = 0;
};

}  // namespace

std::size_t SceneConfig::sweep_size() const {
  const std::size_t sizes[] = {terrain.kind.size(),
                               terrain.seed.size(),
                               material.albedo.size(),
                               material.specular.size(),
                               material.subsurface.size(),
                               material.transmission.size(),
                               material.texture_noise.amplitude.size(),
                               lighting.sun.irradiance.size(),
                               lighting.sun.elevation.size(),
                               lighting.sun.azimuth.size()};
  std::size_t total = 1;
  for (std::size_t s : sizes) {
    if (s == 0) return 0;
    if (total > std::numeric_limits<std::size_t>::max() / s) {
      return std::numeric_limits<std::size_t>::max();
    }
    total *= s;
  }
  return total;
}

void SceneConfig::validate() const {
  require(version == kConfigVersion, "version",
          "unsupported version " + std::to_string(version) + " (expected " +
              std::to_string(kConfigVersion) + ")");
  require(sweep_cap >= 1, "sweep_cap", "must be >= 1");

  require(!terrain.kind.empty(), "terrain.kind", "sweep list must not be empty");
  require(!terrain.seed.empty(), "terrain.seed", "sweep list must not be empty");
  require(terrain.extent > 0.0, "terrain.extent", "must be > 0");
  require(terrain.resolution >= 2, "terrain.resolution", "must be >= 2");
  require(terrain.resolution <= 8193, "terrain.resolution", "must be <= 8193");
  require(terrain.penitente_height > 0.0, "terrain.penitente_height", "must be > 0");

  check("rocks", [&] { rocks.spec.validate(); });
  require(rocks.spec.density * terrain.extent * terrain.extent <= kMaxExpectedRocks,
          "rocks.density", "expected rock count exceeds the limit");
  if (rocks.albedo) {
    require(*rocks.albedo >= 0.0 && *rocks.albedo <= 1.0, "rocks.albedo", "must be in [0, 1]");
  }

  require_unit(material.albedo, "material.albedo");
  require(material.roughness >= 0.0 && material.roughness <= 1.0, "material.roughness",
          "must be in [0, 1]");
  require_unit(material.specular, "material.specular");
  require_unit(material.subsurface, "material.subsurface");
  require_unit(material.transmission, "material.transmission");
  require_unit(material.texture_noise.amplitude, "material.texture_noise.amplitude");
  check("material.texture_noise", [&] { material.texture_noise.noise.validate(); });
  if (material.texture_image) {
    require(!material.texture_image->path.empty(), "material.texture_image.path", "must be set");
    require(material.texture_image->tile_size > 0.0, "material.texture_image.tile_size",
            "must be > 0");
  }

  for (double e : lighting.sun.irradiance) {
    require(e >= 0.0, "lighting.sun.irradiance", "values must be >= 0");
  }
  require(lighting.sun.angular_diameter > 0.0 && lighting.sun.angular_diameter < kPi,
          "lighting.sun.angular_diameter", "must be in (0, pi)");
  for (double e : lighting.sun.elevation) {
    require(e >= 0.0 && e <= 90.0, "lighting.sun.elevation", "values must be in [0, 90]");
  }
  for (double a : lighting.sun.azimuth) {
    require(a >= 0.0 && a < 360.0, "lighting.sun.azimuth", "values must be in [0, 360)");
  }
  if (lighting.planet.enabled) {
    PlanetLight p;
    p.enabled = true;
    p.body_diameter = lighting.planet.body_diameter;
    p.distance = lighting.planet.distance;
    p.disc_radiance_scale = lighting.planet.disc_radiance_scale;
    check("lighting.planet", [&] { p.validate(); });
    require(lighting.planet.elevation >= 0.0 && lighting.planet.elevation <= 90.0,
            "lighting.planet.elevation", "must be in [0, 90]");
  }
  require(lighting.ambient_fraction >= 0.0, "lighting.ambient_fraction", "must be >= 0");

  check("rig", [&] { rig.intrinsics.validate(); });
  require(rig.baseline > 0.0, "rig.baseline", "must be > 0");
  require(rig.pitch >= -90.0 && rig.pitch <= 90.0, "rig.pitch", "must be in [-90, 90]");

  check("render", [&] { render.validate(); });
  require(render.threads >= 0, "render.threads", "must be >= 0");

  const std::size_t n = sweep_size();
  require(n <= sweep_cap, "sweep_cap",
          "sweep has " + std::to_string(n) + " scenes, above the cap of " +
              std::to_string(sweep_cap));
}

SceneConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<root>", std::string("YAML syntax error: ") + e.what());
  }
  if (!root || root.IsNull()) throw ConfigError("<root>", "empty configuration");

  SceneConfig c;
  MapReader r(root, "");
  r.scalar("version", c.version);
  if (!r.has("version")) throw ConfigError("version", "missing (expected " +
                                                          std::to_string(kConfigVersion) + ")");
  std::optional<std::string> output;
  r.optional("output", output);
  if (output) c.output = std::filesystem::path(*output);
  r.scalar("sweep_cap", c.sweep_cap);
  r.ignore("scene");

  {
    MapReader t = r.child("terrain");
    t.list("kind", c.terrain.kind);
    t.scalar("extent", c.terrain.extent);
    t.scalar("resolution", c.terrain.resolution);
    t.list("seed", c.terrain.seed);
    t.scalar("penitente_height", c.terrain.penitente_height);
    t.finish();
  }
  {
    MapReader k = r.child("rocks");
    RockSpec& s = c.rocks.spec;
    k.scalar("density", s.density);
    k.scalar("scale_min", s.scale_min);
    k.scalar("scale_max", s.scale_max);
    k.scalar("shape_irregularity", s.shape_irregularity);
    k.scalar("orientation", s.orientation);
    k.scalar("seed", s.seed);
    k.optional("albedo", c.rocks.albedo);
    k.finish();
  }
  {
    MapReader m = r.child("material");
    m.list("albedo", c.material.albedo);
    m.scalar("roughness", c.material.roughness);
    m.list("specular", c.material.specular);
    m.list("subsurface", c.material.subsurface);
    m.list("transmission", c.material.transmission);
    {
      MapReader n = m.child("texture_noise");
      TextureNoiseConfig& tn = c.material.texture_noise;
      n.list("amplitude", tn.amplitude);
      n.scalar("basis", tn.noise.basis);
      n.scalar("seed", tn.noise.seed);
      n.scalar("octaves", tn.noise.octaves);
      n.scalar("lacunarity", tn.noise.lacunarity);
      n.scalar("gain", tn.noise.gain);
      n.scalar("base_frequency", tn.noise.base_frequency);
      n.finish();
    }
    if (m.has("texture_image")) {
      MapReader ti = m.child("texture_image");
      TextureImageConfig img;
      std::string path;
      ti.scalar("path", path);
      ti.scalar("tile_size", img.tile_size);
      ti.finish();
      if (path.empty()) throw ConfigError("material.texture_image.path", "must be set");
      img.path = std::filesystem::path(path);
      if (img.path.is_relative() && !base_dir.empty()) img.path = base_dir / img.path;
      c.material.texture_image = img;
    } else {
      m.ignore("texture_image");
    }
    m.finish();
  }
  {
    MapReader l = r.child("lighting");
    {
      MapReader s = l.child("sun");
      s.list("irradiance", c.lighting.sun.irradiance);
      s.scalar("angular_diameter", c.lighting.sun.angular_diameter);
      s.list("elevation", c.lighting.sun.elevation);
      s.list("azimuth", c.lighting.sun.azimuth);
      s.finish();
    }
    {
      MapReader p = l.child("planet");
      PlanetConfig& pc = c.lighting.planet;
      p.scalar("enabled", pc.enabled);
      p.scalar("body_diameter", pc.body_diameter);
      p.scalar("distance", pc.distance);
      p.scalar("elevation", pc.elevation);
      p.scalar("azimuth", pc.azimuth);
      p.scalar("disc_radiance_scale", pc.disc_radiance_scale);
      p.finish();
    }
    l.scalar("ambient_fraction", c.lighting.ambient_fraction);
    l.finish();
  }
  {
    MapReader g = r.child("rig");
    RigConfig& rc = c.rig;
    g.scalar("sensor_width", rc.intrinsics.sensor_width);
    g.scalar("focal_length", rc.intrinsics.focal_length);
    g.scalar("image_width", rc.intrinsics.image_width);
    g.scalar("image_height", rc.intrinsics.image_height);
    g.scalar("baseline", rc.baseline);
    read_xy(g, "position", "rig.position", rc.x, rc.y);
    g.scalar("height", rc.height);
    g.scalar("yaw", rc.yaw);
    g.scalar("pitch", rc.pitch);
    g.finish();
  }
  {
    MapReader s = r.child("render");
    s.scalar("shadow_samples", c.render.shadow_samples);
    s.scalar("exposure", c.render.exposure);
    s.scalar("srgb", c.render.srgb);
    s.scalar("seed", c.render.seed);
    s.scalar("threads", c.render.threads);
    s.finish();
  }
  r.finish();
  c.validate();
  return c;
}

SceneConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::filesystem::absolute(path).parent_path());
}

std::vector<SceneConfig> expand_sweep(const SceneConfig& config) {
  config.validate();
  std::vector<SceneConfig> out;
  out.reserve(config.sweep_size());
  SceneConfig point = config;
  auto pick = [](auto& dst, const auto& src, std::size_t i) { dst = {src[i]}; };
  const auto& m = config.material;
  const auto& s = config.lighting.sun;
  for (std::size_t a = 0; a < config.terrain.kind.size(); ++a)
  for (std::size_t b = 0; b < config.terrain.seed.size(); ++b)
  for (std::size_t c = 0; c < m.albedo.size(); ++c)
  for (std::size_t d = 0; d < m.specular.size(); ++d)
  for (std::size_t e = 0; e < m.subsurface.size(); ++e)
  for (std::size_t f = 0; f < m.transmission.size(); ++f)
  for (std::size_t g = 0; g < m.texture_noise.amplitude.size(); ++g)
  for (std::size_t h = 0; h < s.irradiance.size(); ++h)
  for (std::size_t i = 0; i < s.elevation.size(); ++i)
  for (std::size_t j = 0; j < s.azimuth.size(); ++j) {
    pick(point.terrain.kind, config.terrain.kind, a);
    pick(point.terrain.seed, config.terrain.seed, b);
    pick(point.material.albedo, m.albedo, c);
    pick(point.material.specular, m.specular, d);
    pick(point.material.subsurface, m.subsurface, e);
    pick(point.material.transmission, m.transmission, f);
    pick(point.material.texture_noise.amplitude, m.texture_noise.amplitude, g);
    pick(point.lighting.sun.irradiance, s.irradiance, h);
    pick(point.lighting.sun.elevation, s.elevation, i);
    pick(point.lighting.sun.azimuth, s.azimuth, j);
    out.push_back(point);
  }
  return out;
}

std::string format_config(const SceneConfig& c) {
  Writer w;
  w.value("version", c.version);
  w.value("sweep_cap", c.sweep_cap);

  w.open("terrain");
  w.axis("kind", c.terrain.kind, [](TerrainKind k) { return std::string(to_string(k)); });
  w.value("extent", c.terrain.extent);
  w.value("resolution", c.terrain.resolution);
  w.axis("seed", c.terrain.seed, [](std::uint64_t s) { return std::to_string(s); });
  w.value("penitente_height", c.terrain.penitente_height);
  w.close();

  const RockSpec& rs = c.rocks.spec;
  w.open("rocks");
  w.value("density", rs.density);
  w.value("scale_min", rs.scale_min);
  w.value("scale_max", rs.scale_max);
  w.value("shape_irregularity", rs.shape_irregularity);
  w.value("orientation", std::string(to_string(rs.orientation)));
  w.value("seed", rs.seed);
  if (c.rocks.albedo) w.value("albedo", *c.rocks.albedo);
  w.close();

  const MaterialConfig& m = c.material;
  w.open("material");
  w.axis("albedo", m.albedo);
  w.value("roughness", m.roughness);
  w.axis("specular", m.specular);
  w.axis("subsurface", m.subsurface);
  w.axis("transmission", m.transmission);
  w.open("texture_noise");
  w.axis("amplitude", m.texture_noise.amplitude);
  const NoiseSpec& ns = m.texture_noise.noise;
  w.value("basis", std::string(to_string(ns.basis)));
  w.value("seed", ns.seed);
  w.value("octaves", ns.octaves);
  w.value("lacunarity", ns.lacunarity);
  w.value("gain", ns.gain);
  w.value("base_frequency", ns.base_frequency);
  w.close();
  if (m.texture_image) {
    w.open("texture_image");
    w.quoted("path", m.texture_image->path.string());
    w.value("tile_size", m.texture_image->tile_size);
    w.close();
  }
  w.close();

  const LightingConfig& l = c.lighting;
  w.open("lighting");
  w.open("sun");
  w.axis("irradiance", l.sun.irradiance);
  w.value("angular_diameter", l.sun.angular_diameter);
  w.axis("elevation", l.sun.elevation);
  w.axis("azimuth", l.sun.azimuth);
  w.close();
  w.open("planet");
  w.value("enabled", l.planet.enabled);
  w.value("body_diameter", l.planet.body_diameter);
  w.value("distance", l.planet.distance);
  w.value("elevation", l.planet.elevation);
  w.value("azimuth", l.planet.azimuth);
  w.value("disc_radiance_scale", l.planet.disc_radiance_scale);
  w.close();
  w.value("ambient_fraction", l.ambient_fraction);
  w.close();

  const RigConfig& g = c.rig;
  w.open("rig");
  w.value("sensor_width", g.intrinsics.sensor_width);
  w.value("focal_length", g.intrinsics.focal_length);
  w.value("image_width", g.intrinsics.image_width);
  w.value("image_height", g.intrinsics.image_height);
  w.value("baseline", g.baseline);
  w.axis("position", std::vector<double>{g.x, g.y});
  w.value("height", g.height);
  w.value("yaw", g.yaw);
  w.value("pitch", g.pitch);
  w.close();

  w.open("render");
  w.value("shadow_samples", c.render.shadow_samples);
  w.value("exposure", c.render.exposure);
  w.value("srgb", c.render.srgb);
  w.value("seed", c.render.seed);
  w.close();
  return w.str();
}

void override_seeds(SceneConfig& config, std::uint64_t seed) {
  config.terrain.seed = {seed};
  config.rocks.spec.seed = hash_words({seed, 0x726f636bULL});
  config.material.texture_noise.noise.seed = hash_words({seed, 0x74657874ULL});
  config.render.seed = hash_words({seed, 0x72656e64ULL});
}

}  // namespace icy
