#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "proxkit/figure.hpp"
#include "proxkit/mixture.hpp"

// JSON forms of the library objects and of CLI jobs. Readers reject unknown
// keys and report the offending field as a JSON pointer through ConfigError.
namespace proxkit::io {

using Json = nlohmann::ordered_json;

Json to_json(const Vector& v);
Json to_json(const Matrix& m);  // {"rows", "cols", "entries": [[...], ...]}
Json to_json(const DenseMap& m);
Json to_json(const ConvexFunction& f);  // {"atom", "params", "transforms"}
Json to_json(const SolverOpts& o);
Json to_json(const CompositionSpec& s);  // {"L", "g", "gamma"}
Json to_json(const MixtureSpec& s);      // {"gamma", "terms": [{"alpha", "L", "g"}]}

// `at` is the JSON pointer of `j`, used in error messages.
Vector vector_from_json(const Json& j, const std::string& at = "");
Matrix matrix_from_json(const Json& j, const std::string& at = "");
DenseMap map_from_json(const Json& j, const std::string& at = "");
ConvexFunction function_from_json(const Json& j, const std::string& at = "");
SolverOpts solver_opts_from_json(const Json& j, const std::string& at = "");
CompositionSpec composition_from_json(const Json& j, const std::string& at = "",
                                      std::optional<double> default_gamma = std::nullopt);
MixtureSpec mixture_from_json(const Json& j, const std::string& at = "",
                              std::optional<double> default_gamma = std::nullopt);

enum class Command { Eval, Prox, Envelope, Sweep, Figure, Argmin, Verify };
enum class Target { Function, Composition, Cocomposition, Mixture, Comixture };
enum class Format { Csv, Json };

std::string to_string(Command c);
std::string to_string(Target t);
std::string to_string(Format f);
Command command_from_string(std::string_view s);  // ConfigError on unknown names
Target target_from_string(std::string_view s);
Format format_from_string(std::string_view s);

struct OutputSpec {
  std::string path;  // empty: standard output
  Format format = Format::Csv;
};

struct JobConfig {
  Command command = Command::Eval;
  Target target = Target::Cocomposition;
  // Exactly one is set when the job has a spec, matching `target`.
  std::optional<ConvexFunction> function;
  std::optional<CompositionSpec> composition;
  std::optional<MixtureSpec> mixture;
  std::vector<Vector> points;
  std::vector<double> gammas;
  std::optional<double> rho;
  std::optional<Vector> start;
  std::string preset;
  FigureGrid grid;
  std::string suite = "all";
  std::string scale = "default";
  OutputSpec output;
  std::uint64_t seed = 7;
  SolverOpts solver;
};

Json to_json(const JobConfig& c);
// Also checks the per-command requirements (which fields are needed, point
// dimensions, known suite and scale names).
JobConfig job_from_json(const Json& j);

// Parses text; syntax errors carry line and column. `source` prefixes messages.
Json parse_json(std::string_view text, std::string_view source = "<input>");
// Reads and validates a job file; schema errors also carry the line and
// column of the offending field.
JobConfig load_job(const std::string& path);
JobConfig job_from_text(std::string_view text, std::string_view source = "<input>");

// 1-based line and column of the value at `pointer` inside valid JSON text;
// {0, 0} when the pointer does not resolve.
struct TextPosition {
  int line = 0;
  int column = 0;
};
TextPosition locate(std::string_view text, std::string_view pointer);

}  // namespace proxkit::io
