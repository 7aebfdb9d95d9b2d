#include "flameforge/scene.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "flameforge/error.hpp"

namespace flameforge {

using nlohmann::json;

namespace {

constexpr const char* kFaceNames[6] = {"-x", "+x", "-y", "+y", "-z", "+z"};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where.empty() ? what : where + ": " + what);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (j.is_number_integer()) return j.get<int>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v == std::floor(v)) return static_cast<int>(v);
  }
  fail(where, "expected an integer");
}

Vec3 vec3(const json& j, const std::string& where) {
  if (j.is_number()) {
    const double v = j.get<double>();
    return {v, v, v};
  }
  if (!j.is_array() || j.size() != 3) fail(where, "expected an array of 3 numbers");
  return {number(j[0], where), number(j[1], where), number(j[2], where)};
}

json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

template <class F>
void read_opt(const json& obj, const char* key, const std::string& where, F&& assign) {
  const auto it = obj.find(key);
  if (it != obj.end()) assign(*it, where + "." + key);
}

void read_number(const json& obj, const char* key, const std::string& where, double& out) {
  read_opt(obj, key, where, [&](const json& v, const std::string& w) { out = number(v, w); });
}

void read_bool(const json& obj, const char* key, const std::string& where, bool& out) {
  read_opt(obj, key, where, [&](const json& v, const std::string& w) {
    if (!v.is_boolean()) fail(w, "expected true or false");
    out = v.get<bool>();
  });
}

void read_int(const json& obj, const char* key, const std::string& where, int& out) {
  read_opt(obj, key, where, [&](const json& v, const std::string& w) { out = integer(v, w); });
}

void read_string(const json& obj, const char* key, const std::string& where, std::string& out) {
  read_opt(obj, key, where, [&](const json& v, const std::string& w) {
    if (!v.is_string()) fail(w, "expected a string");
    out = v.get<std::string>();
  });
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
}

MaterialProperties parse_material(const json& j, const std::string& where) {
  require_object(j, where);
  MaterialProperties m;
  if (j.contains("preset")) {
    const std::string preset = j["preset"].is_string() ? j["preset"].get<std::string>() : "";
    const auto p = material_preset(preset);
    if (!p) fail(where + ".preset", "unknown material preset '" + preset + "'");
    m = *p;
  }
  read_string(j, "name", where, m.name);
  if (m.name.empty()) fail(where, "material needs a name");
  read_number(j, "beta", where, m.beta);
  read_number(j, "gamma_m", where, m.gamma_m);
  // Ignition and peak temperatures are given in degrees Celsius; the _K keys
  // take kelvin directly.
  read_opt(j, "T_m0", where, [&](const json& v, const std::string& w) { m.T_m0 = number(v, w) + kCelsiusOffset; });
  read_opt(j, "T_m1", where, [&](const json& v, const std::string& w) { m.T_m1 = number(v, w) + kCelsiusOffset; });
  read_number(j, "T_m0_K", where, m.T_m0);
  read_number(j, "T_m1_K", where, m.T_m1);
  read_number(j, "eps_c", where, m.eps_c);
  read_number(j, "eps_v", where, m.eps_v);
  read_number(j, "T_Mc", where, m.T_Mc);
  read_number(j, "T_Mv", where, m.T_Mv);
  read_number(j, "S_Mc", where, m.S_Mc);
  read_number(j, "S_Mv", where, m.S_Mv);
  read_number(j, "c_min", where, m.c_min);
  read_number(j, "c_r", where, m.c_r);
  read_bool(j, "charring", where, m.charring);
  read_bool(j, "combustible", where, m.combustible);
  return m;
}

json material_json(const MaterialProperties& m) {
  return {{"name", m.name},   {"beta", m.beta},     {"gamma_m", m.gamma_m}, {"T_m0_K", m.T_m0},
          {"T_m1_K", m.T_m1}, {"eps_c", m.eps_c},   {"eps_v", m.eps_v},     {"T_Mc", m.T_Mc},
          {"T_Mv", m.T_Mv},   {"S_Mc", m.S_Mc},     {"S_Mv", m.S_Mv},       {"c_min", m.c_min},
          {"c_r", m.c_r},     {"charring", m.charring}, {"combustible", m.combustible}};
}

EnvironmentConfig parse_environment(const json& j, const std::string& where) {
  require_object(j, where);
  EnvironmentConfig e;
  read_number(j, "T_amb", where, e.T_amb);
  read_number(j, "rho_amb", where, e.rho_amb);
  read_number(j, "nu", where, e.nu);
  read_number(j, "k", where, e.k);
  read_number(j, "gamma_a", where, e.gamma_a);
  read_number(j, "g", where, e.g);
  read_number(j, "phi_m", where, e.phi_m);
  read_number(j, "phi_a", where, e.phi_a);
  read_number(j, "wind_relaxation", where, e.wind_relaxation);
  read_opt(j, "wind", where, [&](const json& v, const std::string& w) {
    if (v.is_array() && !v.empty() && v[0].is_object()) {
      for (std::size_t n = 0; n < v.size(); ++n) {
        const std::string wn = w + "[" + std::to_string(n) + "]";
        require_object(v[n], wn);
        WindKey key;
        read_number(v[n], "t", wn, key.t);
        read_opt(v[n], "velocity", wn, [&](const json& x, const std::string& wx) { key.velocity = vec3(x, wx); });
        e.wind.push_back(key);
      }
    } else if (!v.is_null()) {
      e.wind.push_back({0.0, vec3(v, w)});
    }
  });
  read_opt(j, "oven", where, [&](const json& v, const std::string& w) {
    if (v.is_null()) return;
    require_object(v, w);
    OvenRamp oven;
    read_number(v, "target", w, oven.target);
    read_number(v, "warmup", w, oven.warmup);
    e.oven = oven;
  });
  return e;
}

json environment_json(const EnvironmentConfig& e) {
  json j = {{"T_amb", e.T_amb}, {"rho_amb", e.rho_amb}, {"nu", e.nu},         {"k", e.k},
            {"gamma_a", e.gamma_a}, {"g", e.g},         {"phi_m", e.phi_m},   {"phi_a", e.phi_a},
            {"wind_relaxation", e.wind_relaxation}};
  json wind = json::array();
  for (const auto& k : e.wind) wind.push_back({{"t", k.t}, {"velocity", to_json(k.velocity)}});
  j["wind"] = wind;
  if (e.oven) j["oven"] = {{"target", e.oven->target}, {"warmup", e.oven->warmup}};
  return j;
}

Transform parse_transform(const json& j, const std::string& where) {
  require_object(j, where);
  Transform t;
  read_opt(j, "translate", where, [&](const json& v, const std::string& w) { t.translate = vec3(v, w); });
  read_opt(j, "scale", where, [&](const json& v, const std::string& w) { t.scale = vec3(v, w); });
  read_opt(j, "rotate_deg", where, [&](const json& v, const std::string& w) { t.rotate_deg = vec3(v, w); });
  return t;
}

IgnitionConfig parse_ignition(const json& j, const std::string& where) {
  require_object(j, where);
  IgnitionConfig g;
  std::string shape = "box";
  read_string(j, "shape", where, shape);
  if (shape == "box") {
    g.shape = RegionShape::box;
    read_opt(j, "min", where, [&](const json& v, const std::string& w) { g.box.min = vec3(v, w); });
    read_opt(j, "max", where, [&](const json& v, const std::string& w) { g.box.max = vec3(v, w); });
  } else if (shape == "sphere") {
    g.shape = RegionShape::sphere;
    read_opt(j, "center", where, [&](const json& v, const std::string& w) { g.center = vec3(v, w); });
    read_number(j, "radius", where, g.radius);
  } else {
    fail(where + ".shape", "expected \"box\" or \"sphere\", got '" + shape + "'");
  }
  read_number(j, "temperature", where, g.temperature);
  read_number(j, "duration", where, g.duration);
  return g;
}

json ignition_json(const IgnitionConfig& g) {
  json j = {{"temperature", g.temperature}, {"duration", g.duration}};
  if (g.shape == RegionShape::box) {
    j["shape"] = "box";
    j["min"] = to_json(g.box.min);
    j["max"] = to_json(g.box.max);
  } else {
    j["shape"] = "sphere";
    j["center"] = to_json(g.center);
    j["radius"] = g.radius;
  }
  return j;
}

DomainConfig parse_domain(const json& j, const std::string& where) {
  require_object(j, where);
  DomainConfig d;
  read_opt(j, "origin", where, [&](const json& v, const std::string& w) { d.origin = vec3(v, w); });
  read_opt(j, "air_resolution", where, [&](const json& v, const std::string& w) {
    if (v.is_number()) {
      d.air_resolution.fill(integer(v, w));
    } else {
      if (!v.is_array() || v.size() != 3) fail(w, "expected an integer or 3 integers");
      for (int a = 0; a < 3; ++a) d.air_resolution[static_cast<std::size_t>(a)] = integer(v[a], w);
    }
  });
  read_number(j, "air_voxel_size", where, d.air_voxel_size);
  read_opt(j, "material_ratio", where, [&](const json& v, const std::string& w) {
    if (!v.is_number()) fail(w, "expected an integer");
    const double r = v.get<double>();
    if (r != std::floor(r) || r < 1.0)
      fail(w, "material_ratio must be an integer >= 1 (the material grid refines every air cell evenly)");
    d.material_ratio = static_cast<int>(r);
  });
  read_opt(j, "boundary", where, [&](const json& v, const std::string& w) {
    require_object(v, w);
    for (int f = 0; f < 6; ++f) {
      const auto it = v.find(kFaceNames[f]);
      if (it == v.end()) continue;
      const std::string s = it->is_string() ? it->get<std::string>() : "";
      if (s == "open") {
        d.boundary.faces[static_cast<std::size_t>(f)] = FaceBoundary::open;
      } else if (s == "closed") {
        d.boundary.faces[static_cast<std::size_t>(f)] = FaceBoundary::closed;
      } else {
        fail(w + "." + kFaceNames[f], "expected \"open\" or \"closed\"");
      }
    }
  });
  return d;
}

json domain_json(const DomainConfig& d) {
  json boundary;
  for (int f = 0; f < 6; ++f)
    boundary[kFaceNames[f]] = d.boundary.faces[static_cast<std::size_t>(f)] == FaceBoundary::open ? "open" : "closed";
  return {{"origin", to_json(d.origin)},
          {"air_resolution", d.air_resolution},
          {"air_voxel_size", d.air_voxel_size},
          {"material_ratio", d.material_ratio},
          {"boundary", boundary}};
}

SolverOptions parse_solver(const json& j, const std::string& where) {
  require_object(j, where);
  SolverOptions s;
  read_int(j, "sdf_interval", where, s.sdf_interval);
  read_int(j, "sdf_margin", where, s.sdf_margin);
  read_number(j, "div_max", where, s.div_max);
  read_opt(j, "projection_mode", where, [&](const json& v, const std::string& w) {
    const std::string m = v.is_string() ? v.get<std::string>() : "";
    if (m == "sum") {
      s.projection_mode = ProjectionMode::sum;
    } else if (m == "mean") {
      s.projection_mode = ProjectionMode::mean;
    } else {
      fail(w, "expected \"sum\" or \"mean\"");
    }
  });
  read_number(j, "cg_relative_tolerance", where, s.cg_relative_tolerance);
  read_number(j, "cg_absolute_tolerance", where, s.cg_absolute_tolerance);
  read_int(j, "cg_max_iterations", where, s.cg_max_iterations);
  read_number(j, "iso_threshold", where, s.iso_threshold);
  read_bool(j, "insulation", where, s.insulation);
  return s;
}

json solver_json(const SolverOptions& s) {
  return {{"sdf_interval", s.sdf_interval},
          {"sdf_margin", s.sdf_margin},
          {"div_max", s.div_max},
          {"projection_mode", s.projection_mode == ProjectionMode::sum ? "sum" : "mean"},
          {"cg_relative_tolerance", s.cg_relative_tolerance},
          {"cg_absolute_tolerance", s.cg_absolute_tolerance},
          {"cg_max_iterations", s.cg_max_iterations},
          {"iso_threshold", s.iso_threshold},
          {"insulation", s.insulation}};
}

OutputConfig parse_output(const json& j, const std::string& where) {
  require_object(j, where);
  OutputConfig o;
  read_int(j, "probe_interval", where, o.probe_interval);
  read_int(j, "snapshot_interval", where, o.snapshot_interval);
  read_opt(j, "fields", where, [&](const json& v, const std::string& w) {
    if (!v.is_array()) fail(w, "expected an array of field names");
    o.fields.clear();
    for (const auto& f : v) {
      if (!f.is_string()) fail(w, "expected an array of field names");
      o.fields.push_back(f.get<std::string>());
    }
  });
  return o;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' must have the form key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  std::string pointer;
  std::stringstream ks(key);
  std::string part;
  while (std::getline(ks, part, '.')) {
    if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
    pointer += "/" + part;
  }
  try {
    doc[json::json_pointer(pointer)] = value;
  } catch (const json::exception& e) {
    throw ConfigError("cannot apply override '" + assignment + "': " + e.what());
  }
}

}  // namespace

bool IgnitionConfig::contains(const Vec3& p) const {
  if (shape == RegionShape::box) return box.contains(p);
  return norm(p - center) <= radius;
}

GridDesc SceneConfig::air_desc() const {
  GridDesc d;
  d.resolution = domain.air_resolution;
  d.voxel_size = domain.air_voxel_size;
  d.origin = domain.origin;
  d.background = environment.T_amb;
  return d;
}

GridDesc SceneConfig::material_desc() const {
  return refine_desc(air_desc(), domain.material_ratio, environment.T_amb);
}

std::size_t SceneConfig::material_index(const std::string& name) const {
  for (std::size_t n = 0; n < materials.size(); ++n)
    if (materials[n].name == name) return n;
  throw ConfigError("unknown material '" + name + "'");
}

std::optional<std::size_t> SceneConfig::object_index(const std::string& name) const {
  for (std::size_t n = 0; n < objects.size(); ++n)
    if (objects[n].name == name) return n;
  return std::nullopt;
}

std::string SceneConfig::resolve_mesh_path(const std::string& mesh) const {
  if (is_builtin_mesh(mesh)) return mesh;
  std::filesystem::path p(mesh);
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return p.string();
}

SceneConfig parse_scene(const std::string& text, const std::filesystem::path& base_dir,
                        const std::vector<std::string>& overrides) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed scene document: ") + e.what());
  }
  require_object(doc, "scene");
  for (const auto& o : overrides) apply_override(doc, o);

  SceneConfig s;
  s.base_dir = base_dir;
  read_string(doc, "name", "", s.name);
  read_number(doc, "dt", "", s.dt);
  read_int(doc, "n_frames", "", s.n_frames);
  if (doc.contains("domain")) s.domain = parse_domain(doc["domain"], "domain");
  if (doc.contains("environment")) s.environment = parse_environment(doc["environment"], "environment");
  if (doc.contains("solver")) s.solver = parse_solver(doc["solver"], "solver");
  if (doc.contains("output")) s.output = parse_output(doc["output"], "output");

  const auto list = [&](const char* key) -> json {
    if (!doc.contains(key)) return json::array();
    if (!doc[key].is_array()) fail(key, "expected an array");
    return doc[key];
  };

  const json materials = list("materials");
  for (std::size_t n = 0; n < materials.size(); ++n)
    s.materials.push_back(parse_material(materials[n], "materials[" + std::to_string(n) + "]"));

  const json objects = list("objects");
  for (std::size_t n = 0; n < objects.size(); ++n) {
    const std::string where = "objects[" + std::to_string(n) + "]";
    const json& o = objects[n];
    require_object(o, where);
    ObjectConfig obj;
    obj.name = "object" + std::to_string(n);
    read_string(o, "name", where, obj.name);
    read_string(o, "mesh", where, obj.mesh);
    read_string(o, "material", where, obj.material);
    if (o.contains("transform")) obj.transform = parse_transform(o["transform"], where + ".transform");
    s.objects.push_back(obj);
  }

  const json ignitions = list("ignitions");
  for (std::size_t n = 0; n < ignitions.size(); ++n)
    s.ignitions.push_back(parse_ignition(ignitions[n], "ignitions[" + std::to_string(n) + "]"));

  const json probes = list("probes");
  for (std::size_t n = 0; n < probes.size(); ++n) {
    const std::string where = "probes[" + std::to_string(n) + "]";
    const json& p = probes[n];
    require_object(p, where);
    ProbeConfig probe;
    probe.id = "probe" + std::to_string(n);
    read_string(p, "id", where, probe.id);
    read_opt(p, "position", where, [&](const json& v, const std::string& w) { probe.position = vec3(v, w); });
    read_opt(p, "object", where, [&](const json& v, const std::string& w) {
      if (!v.is_string()) fail(w, "expected an object name");
      probe.object = v.get<std::string>();
    });
    s.probes.push_back(probe);
  }

  validate_scene(s);
  return s;
}

SceneConfig load_scene(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read scene file '" + path.string() + "'");
  std::stringstream text;
  text << in.rdbuf();
  return parse_scene(text.str(), path.parent_path(), overrides);
}

std::string serialize_scene(const SceneConfig& s) {
  json doc;
  doc["name"] = s.name;
  doc["dt"] = s.dt;
  doc["n_frames"] = s.n_frames;
  doc["domain"] = domain_json(s.domain);
  doc["environment"] = environment_json(s.environment);
  doc["materials"] = json::array();
  for (const auto& m : s.materials) doc["materials"].push_back(material_json(m));
  doc["objects"] = json::array();
  for (const auto& o : s.objects)
    doc["objects"].push_back({{"name", o.name},
                              {"mesh", o.mesh},
                              {"material", o.material},
                              {"transform",
                               {{"translate", to_json(o.transform.translate)},
                                {"scale", to_json(o.transform.scale)},
                                {"rotate_deg", to_json(o.transform.rotate_deg)}}}});
  doc["ignitions"] = json::array();
  for (const auto& g : s.ignitions) doc["ignitions"].push_back(ignition_json(g));
  doc["probes"] = json::array();
  for (const auto& p : s.probes) {
    json pj = {{"id", p.id}, {"position", to_json(p.position)}};
    if (p.object) pj["object"] = *p.object;
    doc["probes"].push_back(pj);
  }
  doc["output"] = {{"probe_interval", s.output.probe_interval},
                   {"snapshot_interval", s.output.snapshot_interval},
                   {"fields", s.output.fields}};
  doc["solver"] = solver_json(s.solver);
  return doc.dump(2) + "\n";
}

void validate_scene(const SceneConfig& s) {
  if (!(s.dt > 0.0)) fail("dt", "must be positive");
  if (s.n_frames < 0) fail("n_frames", "must be >= 0");
  const GridDesc air = s.air_desc();
  air.validate();
  if (s.domain.material_ratio < 1) fail("domain.material_ratio", "must be an integer >= 1");
  s.environment.validate();
  for (const auto& m : s.materials) m.validate();
  for (std::size_t a = 0; a < s.materials.size(); ++a)
    for (std::size_t b = a + 1; b < s.materials.size(); ++b)
      if (s.materials[a].name == s.materials[b].name)
        throw ConfigError("material '" + s.materials[a].name + "' is defined twice");
  for (const auto& o : s.objects) {
    s.material_index(o.material);
    if (o.mesh.empty()) throw ConfigError("object '" + o.name + "' has no mesh");
    if (!is_builtin_mesh(o.mesh)) {
      const std::string path = s.resolve_mesh_path(o.mesh);
      if (!std::filesystem::exists(path))
        throw ConfigError("object '" + o.name + "': mesh file '" + path + "' does not exist");
    }
  }
  const Aabb bounds{air.origin, air.upper_corner()};
  for (const auto& p : s.probes) {
    if (!bounds.contains(p.position)) throw ConfigError("probe '" + p.id + "' lies outside the domain");
    if (p.object && !s.object_index(*p.object))
      throw ConfigError("probe '" + p.id + "' refers to unknown object '" + *p.object + "'");
  }
  for (const auto& g : s.ignitions)
    if (!(g.temperature > 0.0) || g.duration < 0.0)
      throw ConfigError("ignition temperature must be positive and duration >= 0");
  if (s.output.probe_interval < 1) fail("output.probe_interval", "must be >= 1");
  if (s.output.snapshot_interval < 0) fail("output.snapshot_interval", "must be >= 0");
  if (s.solver.sdf_interval < 1) fail("solver.sdf_interval", "must be >= 1");
  if (!(s.solver.iso_threshold > 0.0 && s.solver.iso_threshold < 1.0))
    fail("solver.iso_threshold", "must lie in (0,1)");
  if (!(s.solver.div_max > 0.0)) fail("solver.div_max", "must be positive");
  if (s.solver.cg_max_iterations < 1) fail("solver.cg_max_iterations", "must be >= 1");

  const double dx = air.voxel_size;
  check_diffusion_stability(s.dt, dx, s.environment.nu, "velocity");
  check_diffusion_stability(s.dt, dx, s.environment.k, "air temperature");
  double beta = 0.0;
  for (const auto& m : s.materials) beta = std::max(beta, m.beta);
  check_diffusion_stability(s.dt, dx / s.domain.material_ratio, beta, "material temperature");
  check_exchange_stability(s.dt, s.environment.phi_a, s.environment.phi_m);
}

InitialState init_state(const SceneConfig& s) {
  InitialState st;
  const GridDesc air = s.air_desc();
  const GridDesc fine = s.material_desc();
  const double T_amb = s.environment.T_amb;

  st.air.u = MacVelocityField(air, s.environment.wind_at(0.0).value_or(Vec3{}));
  st.air.T_a = create_dense_grid(air, T_amb);
  GridDesc zero = air;
  zero.background = 0.0;
  st.air.p = create_dense_grid(zero, 0.0);
  st.air.S = create_dense_grid(zero, 0.0);

  MaterialState& m = st.material;
  m.materials = s.materials;
  GridDesc fz = fine;
  fz.background = 0.0;
  m.T_m = ScalarGrid(fine, T_amb);
  m.M_v = ScalarGrid(fz, 0.0);
  m.M_c = ScalarGrid(fz, 0.0);
  m.I = IndexGrid(fz, 0);
  m.object = IndexGrid(fz, 0);

  for (std::size_t n = 0; n < s.objects.size(); ++n) {
    const ObjectConfig& o = s.objects[n];
    const auto mat = static_cast<std::uint16_t>(s.material_index(o.material));
    const MaterialProperties& props = s.materials[mat];
    const TriangleMesh mesh = load_mesh(s.resolve_mesh_path(o.mesh));
    std::vector<std::string> warnings;
    const ScalarGrid occ = voxelize_mesh(mesh, o.transform, fine, &warnings);
    for (const auto& w : warnings) st.warnings.push_back("object '" + o.name + "': " + w);
    bool overlap = false;
    occ.for_each_active([&](const Coord& c, double) {
      if (m.I.is_active(c) && m.I.get(c) != mat) overlap = true;
      m.I.set(c, mat);
      m.object.set(c, static_cast<std::uint16_t>(n));
      m.M_v.set(c, 1.0);
      m.M_c.set(c, props.charring ? 1.0 : 0.0);
      m.T_m.set(c, T_amb);
    });
    if (overlap)
      st.warnings.push_back("object '" + o.name + "' overlaps an object of a different material; it replaces it");
  }

  for (const auto& g : s.ignitions) {
    m.I.for_each_active([&](const Coord& c, std::uint16_t) {
      if (g.contains(fine.world_pos(c))) m.T_m.set(c, g.temperature);
    });
    const auto& r = air.resolution;
    for (int k = 0; k < r[2]; ++k)
      for (int j = 0; j < r[1]; ++j)
        for (int i = 0; i < r[0]; ++i)
          if (g.contains(air.world_pos({i, j, k}))) st.air.T_a.set({i, j, k}, g.temperature);
  }

  st.air.solid = compute_solid_mask(m, air, s.domain.material_ratio, s.solver.iso_threshold);
  SdfOptions opts;
  opts.margin = s.solver.sdf_margin;
  st.sdf = rebuild_sdf(occupancy(m), kSdfOccupancyIso, opts);
  return st;
}

}  // namespace flameforge
