#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "report.hpp"

using margulis::cli::json;

namespace {

const char* kWide = R"({
  "surface": {"d": 1.5, "u1": 0.7, "u2": 0.9, "theta": "midpoint"},
  "deformation": {"stem": [[1, 1], [1, 1], [1, 1]]},
  "options": {"steps": 10, "samples": 2000, "radius": 10, "word_length": 1}
})";

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("margulis_test_" + name);
  std::ofstream(path) << text;
  return path;
}

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "margulis");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = margulis::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string wide_scenario() { return write_temp("wide.json", kWide).string(); }

std::string scenario_with(const std::string& surface, const std::string& stem = "[[1, 1], [1, 1], [1, 1]]") {
  return R"({"surface": )" + surface + R"(, "deformation": {"stem": )" + stem + "}}";
}

void collect_numbers(const json& j, const std::string& path, std::map<std::string, double>& leaves,
                     std::map<std::string, std::vector<double>>& polygons) {
  if (j.is_object() && j.size() == 2 && j.contains("label") && j.contains("vertices")) {
    auto& flat = polygons[j["label"].get<std::string>()];
    for (const json& v : j["vertices"])
      for (const json& c : v) flat.push_back(c.get<double>());
    return;
  }
  if (j.is_object() || j.is_array()) {
    std::size_t i = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++i) {
      const std::string key = j.is_object() ? it.key() : std::to_string(i);
      collect_numbers(*it, path.empty() ? key : path + "." + key, leaves, polygons);
    }
    return;
  }
  if (j.is_number()) leaves[path] = j.get<double>();
}

void parse_csv(const std::string& text, std::map<std::string, double>& leaves,
               std::map<std::string, std::vector<double>>& polygons) {
  std::istringstream in(text);
  std::string line;
  bool polygon_table = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line == "label,vertex_index,h1,h2,h3") {
      polygon_table = true;
      continue;
    }
    if (line == "path,value") {
      polygon_table = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (polygon_table) {
      REQUIRE(cells.size() == 5);
      for (int k = 2; k < 5; ++k) polygons[cells[0]].push_back(std::stod(cells[k]));
    } else {
      REQUIRE(cells.size() == 2);
      char* end = nullptr;
      const double v = std::strtod(cells[1].c_str(), &end);
      if (end != cells[1].c_str() && *end == '\0') leaves[cells[0]] = v;
    }
  }
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

}  // namespace

TEST_CASE("triangle on an admissible scenario") {
  const Outcome r = invoke({"triangle", wide_scenario()});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["version"] == margulis::cli::kVersion);
  CHECK(j["command"] == "triangle");
  CHECK(j["result"]["valid"] == true);
  CHECK(j["result"]["theta_source"] == "midpoint");
  CHECK(j["result"]["theta_interval"]["lo"].get<double>() == doctest::Approx(0.972953555410913));
  CHECK(j["result"]["checks"]["unit_residual"].get<double>() <= 1e-12);
  CHECK(j["scenario"]["surface"]["d"] == 1.5);
}

TEST_CASE("exit codes") {
  CHECK(invoke({"triangle", write_temp("bad.json", "{\"surface\": ").string()}).code == 1);
  CHECK(invoke({"triangle", "/nonexistent/scenario.json"}).code == 1);
  CHECK(invoke({"triangle"}).code == 1);
  CHECK(invoke({"frobnicate", wide_scenario()}).code == 1);
  CHECK(invoke({"triangle", wide_scenario(), "--format", "xml"}).code == 1);

  const Outcome unknown =
      invoke({"triangle", write_temp("unknown.json", R"({"surface": {"d": 1.5, "u1": 0.7, "u2": 0.9, "phi": 1}})").string()});
  CHECK(unknown.code == 1);
  CHECK(unknown.err.find("phi") != std::string::npos);

  const Outcome zero =
      invoke({"triangle", write_temp("zero.json", scenario_with(R"({"d": 1.5, "u1": 0, "u2": 0.9})")).string()});
  CHECK(zero.code == 2);
  CHECK(zero.err.find("InvalidConfiguration") != std::string::npos);

  const Outcome negative = invoke({"invariants", write_temp("neg.json", scenario_with(R"({"d": 1.5, "u1": 0.7, "u2": 0.9})",
                                                                                     "[[1, -1], [1, 1], [1, 1]]"))
                                                     .string()});
  CHECK(negative.code == 2);
  CHECK(negative.err.find("NegativeCoefficient") != std::string::npos);

  const Outcome empty =
      invoke({"triangle", write_temp("empty.json", scenario_with(R"({"d": 0.5, "u1": 0.7, "u2": 0.9})")).string()});
  CHECK(empty.code == 2);
  CHECK(empty.err.find("EmptyInterval") != std::string::npos);

  const Outcome outside =
      invoke({"group", write_temp("outside.json", scenario_with(R"({"d": 1.5, "u1": 0.7, "u2": 0.9, "theta": 0.2})")).string()});
  CHECK(outside.code == 2);
}

TEST_CASE("group report") {
  const Outcome r = invoke({"group", wide_scenario()});
  REQUIRE(r.code == 0);
  const json res = json::parse(r.out)["result"];
  CHECK(res["coxeter_residuals"]["max"].get<double>() <= 1e-10);
  CHECK(res["elements"]["X"]["class"] == "GlideReflection");
  CHECK(res["elements"]["Y"]["class"] == "GlideReflection");
  CHECK(res["elements"]["A"]["class"] == "Hyperbolic");
  CHECK(res["elements"]["B"]["class"] == "Hyperbolic");
  CHECK(res["elements"]["i0"]["class"] == "EllipticInvolution");
}

TEST_CASE("invariants report") {
  const Outcome r = invoke({"invariants", wide_scenario()});
  REQUIRE(r.code == 0);
  const json res = json::parse(r.out)["result"];
  CHECK(res["proper"] == true);
  CHECK(res["relative_delta"].get<double>() <= 1e-9);

  const Outcome z = invoke({"invariants", write_temp("zerostem.json", scenario_with(R"({"d": 1.5, "u1": 0.7, "u2": 0.9})",
                                                                                    "[[0, 0], [0, 0], [0, 0]]"))
                                              .string()});
  REQUIRE(z.code == 0);
  const json zres = json::parse(z.out)["result"];
  CHECK(zres["proper"] == false);
  for (const char* k : {"aX", "aY", "aA", "aB"}) CHECK(zres["closed"][k].get<double>() == 0.0);
}

TEST_CASE("cone report and the flip") {
  const Outcome r = invoke({"cone", wide_scenario()});
  const Outcome f = invoke({"cone", wide_scenario(), "--flip"});
  REQUIRE(r.code == 0);
  REQUIRE(f.code == 0);
  const json a = json::parse(r.out)["result"], b = json::parse(f.out)["result"];
  CHECK(a["triangulation"] == "I");
  CHECK(b["triangulation"] == "II");
  CHECK(a["rows"][2] == "aA");
  CHECK(b["rows"][2] == "aB");
  CHECK(a["rank_report"]["M1"]["rank"] == 2);
  CHECK(a["rank_report"]["M2"]["rank"] == 2);
  CHECK(a["rank_report"]["M3"]["rank"] == 1);
  CHECK(a["pentagon"]["vertices"].size() == 5);
  CHECK(b["pentagon"]["label"] == "P2");
  // The flipped third row is the aB row of the original group over e1..e4.
  for (int k = 0; k < 4; ++k)
    CHECK(b["M"][2][k].get<double>() == doctest::Approx(a["complement"]["values"][k].get<double>()).epsilon(1e-9));
}

TEST_CASE("hexagon and octagon reports") {
  const Outcome h = invoke({"hexagon", wide_scenario()});
  REQUIRE(h.code == 0);
  const json hr = json::parse(h.out)["result"];
  CHECK(hr["vertex_counts"]["H"] == 6);
  CHECK(hr["vertex_counts"]["Q"] == 4);
  CHECK(hr["vertex_counts"]["Qsmall"] == 4);
  CHECK(hr["H_in_Q"] == true);
  CHECK(hr["witness"]["proper"] == true);
  CHECK(hr["witness"]["in_H"] == false);

  const Outcome o = invoke({"octagon", wide_scenario(), "--steps", "12"});
  REQUIRE(o.code == 0);
  const json orr = json::parse(o.out)["result"];
  CHECK(orr["steps"] == 12);
  CHECK(orr["thetas"].size() == 12);
  CHECK(orr["vertex_count"] == 8);
  CHECK(orr["contains_all_hexagons"] == true);
  CHECK(invoke({"octagon", wide_scenario(), "--steps", "1"}).code == 1);
}

TEST_CASE("disjoint report") {
  const Outcome base = invoke({"disjoint", wide_scenario(), "--words", "0", "--samples", "500"});
  REQUIRE(base.code == 0);
  const json b = json::parse(base.out)["result"];
  CHECK(b["word_count"] == 1);
  CHECK(b["plane_count"] == 3);
  CHECK(b["min_distance"].get<double>() > 0);

  const Outcome one = invoke({"disjoint", wide_scenario()});
  REQUIRE(one.code == 0);
  const json o = json::parse(one.out)["result"];
  CHECK(o["word_count"] == 4);
  CHECK(o["samples_per_plane"] == 2000);
  CHECK(o["min_distance"].get<double>() > 0);
}

TEST_CASE("csv and json carry the same numbers") {
  for (const char* command : {"triangle", "group", "invariants", "cone", "hexagon", "octagon", "disjoint"}) {
    CAPTURE(command);
    const Outcome j = invoke({command, wide_scenario()});
    const Outcome c = invoke({command, wide_scenario(), "--format", "csv"});
    REQUIRE(j.code == 0);
    REQUIRE(c.code == 0);
    std::map<std::string, double> jl, cl;
    std::map<std::string, std::vector<double>> jp, cp;
    collect_numbers(json::parse(j.out), "", jl, jp);
    parse_csv(c.out, cl, cp);
    CHECK(jl.size() == cl.size());
    for (const auto& [path, value] : jl) {
      CAPTURE(path);
      REQUIRE(cl.count(path));
      CHECK(close(value, cl[path]));
    }
    CHECK(jp.size() == cp.size());
    for (const auto& [label, values] : jp) {
      CAPTURE(label);
      REQUIRE(cp[label].size() == values.size());
      for (std::size_t k = 0; k < values.size(); ++k) CHECK(close(values[k], cp[label][k]));
    }
  }
}

TEST_CASE("output is deterministic and --out writes the same bytes") {
  const Outcome first = invoke({"cone", wide_scenario()});
  const Outcome second = invoke({"cone", wide_scenario()});
  CHECK(first.out == second.out);
  const auto path = std::filesystem::temp_directory_path() / "margulis_test_out.json";
  std::filesystem::remove(path);
  const Outcome written = invoke({"cone", wide_scenario(), "--out", path.string()});
  CHECK(written.code == 0);
  CHECK(written.out.empty());
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  CHECK(buffer.str() == first.out);
}
