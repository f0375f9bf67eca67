#include "report.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "margulis/cone.hpp"
#include "margulis/deform.hpp"
#include "margulis/isometry.hpp"

namespace margulis::cli {

namespace {

json vec(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec(m.row(i).transpose()));
  return rows;
}

json polygon(const ProjPolygon& p) {
  json vertices = json::array();
  for (const ProjPoint& v : p.vertices) vertices.push_back(vec(v.h));
  return {{"label", p.label}, {"vertices", vertices}};
}

json margulis_json(const MargulisVector& m) { return {{"aX", m.aX}, {"aY", m.aY}, {"aA", m.aA}, {"aB", m.aB}}; }

json singular_json(const SingularValues& s) {
  return {{"rank", s.rank}, {"singular_values", vec(s.values)}, {"kept_margin", s.kept_margin},
          {"dropped_margin", s.dropped_margin}};
}

json params_json(const TriangleParams& p) { return {{"d", p.d}, {"u1", p.u1}, {"u2", p.u2}, {"theta", p.theta}}; }

void reject_unknown(const json& object, std::initializer_list<const char*> allowed, const std::string& where) {
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : object.items())
    if (!keys.count(key)) throw UsageError(where + ": unknown field '" + key + "'");
}

double number(const json& object, const char* key, const std::string& where) {
  if (!object.contains(key)) throw UsageError(where + ": missing field '" + key + "'");
  const json& v = object.at(key);
  if (!v.is_number()) throw UsageError(where + "." + key + ": expected a number");
  return v.get<double>();
}

int integer(const json& object, const char* key, int fallback, int minimum, const std::string& where) {
  if (!object.contains(key)) return fallback;
  const json& v = object.at(key);
  if (!v.is_number_integer()) throw UsageError(where + "." + key + ": expected an integer");
  const int value = v.get<int>();
  if (value < minimum) throw UsageError(where + "." + key + ": must be >= " + std::to_string(minimum));
  return value;
}

json tolerances() {
  return {{"null_class", Tolerance<double>::null_class}, {"geometric", Tolerance<double>::geometric},
          {"kernel_line", 1e-8}, {"merge", 1e-9}};
}

json cmd_triangle(const Scenario& s) {
  const TriangleParams p = resolve(s);
  const ThetaInterval iv = theta_interval(p.d, p.u1, p.u2);
  const SideVectors w = side_vectors(p);
  double unit = 0;
  for (const MinkVectord* v : {&w.w1, &w.w2, &w.w0}) unit = std::max(unit, std::abs(lorentz_norm2(*v) - 1));
  return {{"params", params_json(p)},
          {"theta_source", s.theta ? "given" : "midpoint"},
          {"valid", true},
          {"theta_interval", {{"lo", iv.lo}, {"hi", iv.hi}, {"length", iv.length()}}},
          {"sides", {{"w1", vec(w.w1)}, {"w2", vec(w.w2)}, {"w0", vec(w.w0)}}},
          {"checks",
           {{"unit_residual", unit}, {"consistently_oriented", consistently_oriented(w.w1, w.w2, w.w0)}}}};
}

json cmd_group(const Scenario& s) {
  const HolonomyGroup g = holonomy(resolve(s));
  json elements = json::object();
  const std::pair<const char*, const LinearIsometryd*> list[] = {{"RX", &g.RX}, {"RY", &g.RY}, {"i0", &g.i0},
                                                                 {"X", &g.X},   {"Y", &g.Y},   {"A", &g.A},
                                                                 {"B", &g.B}};
  for (const auto& [name, e] : list)
    elements[name] = {{"matrix", mat(e->matrix())}, {"class", to_string(classify(*e))}, {"determinant", e->determinant()}};
  const CoxeterResiduals r = coxeter_check(g);
  return {{"params", params_json(g.params)},
          {"elements", elements},
          {"neutral_vectors", {{"X0", vec(g.X0)}, {"Y0", vec(g.Y0)}, {"A0", vec(g.A0)}, {"B0", vec(g.B0)}}},
          {"coxeter_residuals",
           {{"involutions", r.involutions}, {"x_relation", r.x_relation}, {"y_relation", r.y_relation},
            {"a_product", r.a_product}, {"a_reflections", r.a_reflections}, {"b_relation", r.b_relation},
            {"b_reflections", r.b_reflections}, {"i0_conj_x", r.i0_conj_x}, {"i0_conj_y", r.i0_conj_y},
            {"b_xinv_y", r.b_xinv_y}, {"max", r.max()}}}};
}

json cmd_invariants(const Scenario& s) {
  const Deformation d = make_deformation(holonomy(resolve(s)), s.stem);
  const MargulisVector closed = margulis_closed(d), direct = margulis_direct(d);
  const auto c = closed.values(), m = direct.values();
  double scale = 0, delta = 0;
  for (int i = 0; i < 4; ++i) {
    scale = std::max(scale, std::abs(c[i]));
    delta = std::max(delta, std::abs(c[i] - m[i]));
  }
  return {{"params", params_json(d.group.params)},
          {"q", {{"q1", vec(d.q1)}, {"q2", vec(d.q2)}, {"q0", vec(d.q0)}}},
          {"closed", margulis_json(closed)},
          {"direct", margulis_json(direct)},
          {"relative_delta", scale > 0 ? delta / scale : delta},
          {"proper", is_proper(closed)}};
}

json cmd_cone(const Scenario& s, bool flipped) {
  const HolonomyGroup base = holonomy(resolve(s));
  const HolonomyGroup g = flipped ? flip(base) : base;
  const MBlocks b = blocks(g);
  const RankReport r = rank_report(b, g);
  const char* third = flipped ? "aB" : "aA";
  const char* other = flipped ? "aA" : "aB";
  return {{"params", params_json(base.params)},
          {"triangulation", to_string(g.type)},
          {"angle", g.angle},
          {"rows", {"aX", "aY", third}},
          {"M1", mat(b.M1)},
          {"M2", mat(b.M2)},
          {"M3", mat(b.M3)},
          {"M", mat(b.M)},
          {"complement", {{"row", other}, {"values", vec(b.complement.transpose())}}},
          {"h1", mat(b.h1())},
          {"rank_report",
           {{"M1", singular_json(r.m1)}, {"M2", singular_json(r.m2)}, {"M3", singular_json(r.m3)},
            {"w1_box_X0_A0", r.w1_box}, {"w2_box_Y0_A0", r.w2_box}, {"w0_box_X0_Y0", r.w0_box},
            {"det_M1", r.det_m1}, {"det_M2", r.det_m2}, {"det_M3", r.det_m3},
            {"M1_minus_residual", r.m1_minus_residual}, {"M1_plus_residual", r.m1_plus_residual},
            {"M2_plus_residual", r.m2_plus_residual}, {"M3_residual", r.m3_residual}}},
          {"pentagon", polygon(pentagon(b, flipped ? "P2" : "P1"))}};
}

json cmd_hexagon(const Scenario& s) {
  const HolonomyGroup g = holonomy(resolve(s));
  const HexagonReport h = hexagon(blocks(g), flip_blocks(g));
  json witness = {{"found", h.witness.found}};
  if (h.witness.found) {
    witness["point"] = vec(h.witness.point.h);
    witness["invariants"] = margulis_json(h.witness.invariants);
    witness["proper"] = h.witness.proper;
    witness["in_H"] = contains(h.H, h.witness.point);
  }
  return {{"params", params_json(g.params)},
          {"polygons", {polygon(h.H), polygon(h.Q), polygon(h.Qsmall), polygon(h.P1), polygon(h.P2)}},
          {"b_functional", {{"cX", h.beta.cX}, {"cY", h.beta.cY}, {"cA", h.beta.cA}, {"residual", h.beta.residual}}},
          {"vertex_counts", {{"H", h.H.size()}, {"Q", h.Q.size()}, {"Qsmall", h.Qsmall.size()}}},
          {"H_vertex_lines", h.vertex_lines},
          {"inscription_distance", h.inscription},
          {"H_in_Q", h.h_in_q},
          {"H_convex", h.convex},
          {"Qsmall_shared", h.qsmall_shared},
          {"clip_error", h.clip_error},
          {"witness", witness}};
}

json cmd_octagon(const Scenario& s, int steps) {
  const TriangleParams p = resolve(s);
  const OctagonReport o = octagon_sweep(p.d, p.u1, p.u2, steps);
  const auto trace = [](const std::vector<ProjPoint>& t) {
    json a = json::array();
    for (const ProjPoint& q : t) a.push_back(vec(q.h));
    return a;
  };
  return {{"params", {{"d", p.d}, {"u1", p.u1}, {"u2", p.u2}}},
          {"steps", steps},
          {"theta_interval", {{"lo", o.interval.lo}, {"hi", o.interval.hi}}},
          {"thetas", o.thetas},
          {"polygons", {polygon(o.octagon), polygon(o.Q)}},
          {"vertex_count", o.octagon.size()},
          {"traces",
           {{"ker_aA", {{"points", trace(o.trace_a)}, {"line_residual", o.trace_a_residual}, {"monotone", o.trace_a_monotone}}},
            {"ker_aB", {{"points", trace(o.trace_b)}, {"line_residual", o.trace_b_residual}, {"monotone", o.trace_b_monotone}}}}},
          {"Qsmall_spread", o.qsmall_spread},
          {"contains_all_hexagons", o.contains_all},
          {"area_gap", o.area_gap}};
}

json cmd_disjoint(const Scenario& s, int samples, int words) {
  const Deformation d = make_deformation(holonomy(resolve(s)), s.stem);
  const std::vector<Word> w = reduced_words(affine_generators(d), words);
  const DisjointnessReport r = disjointness_oracle(base_planes(d), w, s.options.radius, samples);
  json closest = nullptr;
  if (r.closest_first >= 0) closest = {r.labels[r.closest_first], r.labels[r.closest_second]};
  return {{"params", params_json(d.group.params)},
          {"word_length", words},
          {"word_count", w.size()},
          {"samples_per_plane", samples},
          {"radius", s.options.radius},
          {"plane_count", r.plane_count},
          {"merged_count", r.merged_count},
          {"min_distance", r.min_distance},
          {"closest_pair", closest}};
}

bool is_polygon(const json& j) {
  return j.is_object() && j.size() == 2 && j.contains("label") && j.contains("vertices");
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

void flatten(const json& j, const std::string& path, std::vector<const json*>& polygons, std::ostream& rows) {
  if (is_polygon(j)) {
    polygons.push_back(&j);
    return;
  }
  if (j.is_object() || j.is_array()) {
    std::size_t index = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++index) {
      const std::string key = j.is_object() ? it.key() : std::to_string(index);
      flatten(*it, path.empty() ? key : path + "." + key, polygons, rows);
    }
    return;
  }
  rows << path << ",";
  if (j.is_number()) rows << format_number(j.get<double>());
  else if (j.is_boolean()) rows << (j.get<bool>() ? "true" : "false");
  else if (j.is_null()) rows << "null";
  else rows << j.get<std::string>();
  rows << "\n";
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario s;
  try {
    s.source = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("scenario is not valid JSON: ") + e.what());
  }
  const json& root = s.source;
  if (!root.is_object()) throw UsageError("scenario: expected an object");
  reject_unknown(root, {"surface", "deformation", "options"}, "scenario");
  if (!root.contains("surface") || !root["surface"].is_object()) throw UsageError("scenario: missing object 'surface'");

  const json& surface = root["surface"];
  reject_unknown(surface, {"d", "u1", "u2", "theta"}, "surface");
  s.d = number(surface, "d", "surface");
  s.u1 = number(surface, "u1", "surface");
  s.u2 = number(surface, "u2", "surface");
  if (surface.contains("theta")) {
    const json& t = surface["theta"];
    if (t.is_number()) s.theta = t.get<double>();
    else if (!(t.is_string() && t.get<std::string>() == "midpoint"))
      throw UsageError("surface.theta: expected a number or \"midpoint\"");
  }

  if (root.contains("deformation")) {
    const json& def = root["deformation"];
    if (!def.is_object()) throw UsageError("deformation: expected an object");
    reject_unknown(def, {"stem"}, "deformation");
    if (def.contains("stem")) {
      const json& stem = def["stem"];
      if (!stem.is_array() || stem.size() != 3) throw UsageError("deformation.stem: expected three pairs");
      for (std::size_t i = 0; i < 3; ++i) {
        if (!stem[i].is_array() || stem[i].size() != 2 || !stem[i][0].is_number() || !stem[i][1].is_number())
          throw UsageError("deformation.stem: each entry must be a pair of numbers");
        s.stem.pairs[i] = {stem[i][0].get<double>(), stem[i][1].get<double>()};
      }
    }
  }

  if (root.contains("options")) {
    const json& opt = root["options"];
    if (!opt.is_object()) throw UsageError("options: expected an object");
    reject_unknown(opt, {"steps", "samples", "radius", "word_length"}, "options");
    s.options.steps = integer(opt, "steps", s.options.steps, 2, "options");
    s.options.samples = integer(opt, "samples", s.options.samples, 1, "options");
    s.options.word_length = integer(opt, "word_length", s.options.word_length, 0, "options");
    if (opt.contains("radius")) {
      s.options.radius = number(opt, "radius", "options");
      if (!(s.options.radius > 0)) throw UsageError("options.radius: must be positive");
    }
  }
  return s;
}

TriangleParams resolve(const Scenario& s) {
  if (!(s.d >= 0) || !(s.u1 > 0) || !(s.u2 > 0) || !std::isfinite(s.d) || !std::isfinite(s.u1) ||
      !std::isfinite(s.u2))
    throw Error(ErrorCode::InvalidConfiguration, "surface parameters need d >= 0, u1 > 0, u2 > 0");
  for (const auto& pair : s.stem.pairs)
    for (double c : pair)
      if (c < 0) throw Error(ErrorCode::NegativeCoefficient, "stem coefficients must be >= 0");
  TriangleParams p{s.d, s.u1, s.u2, 0.0};
  p.theta = s.theta ? *s.theta : theta_interval(s.d, s.u1, s.u2).midpoint();
  side_vectors(p);
  return p;
}

json run_command(const std::string& command, const Scenario& s, const Overrides& o) {
  json result;
  if (command == "triangle") result = cmd_triangle(s);
  else if (command == "group") result = cmd_group(s);
  else if (command == "invariants") result = cmd_invariants(s);
  else if (command == "cone") result = cmd_cone(s, o.flip);
  else if (command == "hexagon") result = cmd_hexagon(s);
  else if (command == "octagon") result = cmd_octagon(s, o.steps.value_or(s.options.steps));
  else if (command == "disjoint")
    result = cmd_disjoint(s, o.samples.value_or(s.options.samples), o.words.value_or(s.options.word_length));
  else throw UsageError("unknown command '" + command + "'");
  return {{"version", kVersion}, {"command", command}, {"scenario", s.source}, {"tolerances", tolerances()},
          {"result", result}};
}

std::string to_json_text(const json& report) { return report.dump(2) + "\n"; }

std::string to_csv_text(const json& report) {
  std::vector<const json*> polygons;
  std::ostringstream rows;
  flatten(report, "", polygons, rows);
  std::ostringstream out;
  if (!polygons.empty()) {
    out << "label,vertex_index,h1,h2,h3\n";
    for (const json* p : polygons) {
      const json& vertices = (*p)["vertices"];
      for (std::size_t i = 0; i < vertices.size(); ++i) {
        out << (*p)["label"].get<std::string>() << "," << i;
        for (const json& c : vertices[i]) out << "," << format_number(c.get<double>());
        out << "\n";
      }
    }
    out << "\n";
  }
  out << "path,value\n" << rows.str();
  return out.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Margulis invariants and deformation polygons for the two-holed cross surface", "margulis"};
  app.require_subcommand(1);

  std::string scenario_path, format = "json", out_path;
  Overrides overrides;
  int steps = 0, samples = 0, words = 0;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", out_path, "Write the report to PATH instead of stdout");
  };
  add_common(app.add_subcommand("triangle", "Side vectors and admissible theta interval"));
  add_common(app.add_subcommand("group", "Generators, classes, neutral vectors and relation residuals"));
  add_common(app.add_subcommand("invariants", "Margulis invariants and the properness verdict"));
  CLI::App* cone = app.add_subcommand("cone", "Blocks of M, rank report and pentagon");
  add_common(cone);
  cone->add_flag("--flip", overrides.flip, "Use the flipped triangulation");
  add_common(app.add_subcommand("hexagon", "Hexagon H inscribed in the quadrilateral Q"));
  CLI::App* octagon = app.add_subcommand("octagon", "Octagon swept out by varying theta");
  add_common(octagon);
  CLI::Option* steps_opt = octagon->add_option("--steps", steps, "Number of theta samples")->check(CLI::Range(2, 1000000));
  CLI::App* disjoint = app.add_subcommand("disjoint", "Sampled distances between crooked planes");
  add_common(disjoint);
  CLI::Option* samples_opt = disjoint->add_option("--samples", samples, "Samples per plane")->check(CLI::PositiveNumber);
  CLI::Option* words_opt = disjoint->add_option("--words", words, "Maximum word length")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  if (steps_opt->count()) overrides.steps = steps;
  if (samples_opt->count()) overrides.samples = samples;
  if (words_opt->count()) overrides.words = words;
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    std::ifstream in(scenario_path);
    if (!in) throw UsageError("cannot read scenario file '" + scenario_path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const Scenario s = parse_scenario(buffer.str());
    const json report = run_command(command, s, overrides);
    const std::string text = format == "csv" ? to_csv_text(report) : to_json_text(report);
    if (out_path.empty()) {
      out << text;
    } else {
      std::ofstream file(out_path, std::ios::binary);
      if (!(file << text)) throw UsageError("cannot write '" + out_path + "'");
    }
    return 0;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_domain_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace margulis::cli
