#pragma once

// Scenario parsing and report generation behind the margulis command line tool.

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "margulis/deform.hpp"
#include "margulis/surface.hpp"

namespace margulis::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

/// Malformed input: bad JSON, missing or mistyped fields. Exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  int steps = 50;
  int samples = 10000;
  double radius = 10.0;
  int word_length = 3;
};

struct Scenario {
  json source;                 // the parsed input, echoed in reports
  double d = 0, u1 = 0, u2 = 0;
  std::optional<double> theta; // empty selects the midpoint of the admissible interval
  StemCoeffs stem = StemCoeffs::uniform(1.0);
  Options options;
};

Scenario parse_scenario(const std::string& text);

/// Resolves theta and validates the parameters. Throws margulis::Error.
TriangleParams resolve(const Scenario& s);

struct Overrides {
  bool flip = false;
  std::optional<int> steps, samples, words;
};

/// The full report for one command. Throws UsageError or margulis::Error.
json run_command(const std::string& command, const Scenario& s, const Overrides& o = {});

std::string to_json_text(const json& report);
/// Polygons as `label,vertex_index,h1,h2,h3`, then every other leaf as `path,value`.
std::string to_csv_text(const json& report);

/// Entry point used by main(); returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace margulis::cli
