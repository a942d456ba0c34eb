#include "proxkit/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include "proxkit/verify.hpp"

namespace proxkit::io {

namespace {

[[noreturn]] void fail(const std::string& at, const std::string& msg) {
  throw ConfigError("field " + (at.empty() ? std::string("/") : at) + ": " + msg, at.empty() ? "/" : at);
}

std::string child(const std::string& at, std::string_view key) {
  std::string k;
  for (char c : key) {
    if (c == '~') k += "~0";
    else if (c == '/') k += "~1";
    else k += c;
  }
  return at + "/" + k;
}

std::string child(const std::string& at, std::size_t i) { return at + "/" + std::to_string(i); }

void expect_object(const Json& j, const std::string& at, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) fail(at, "expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) fail(child(at, key), "unknown key");
  }
}

const Json& member(const Json& j, const std::string& at, std::string_view key) {
  auto it = j.find(std::string(key));
  if (it == j.end()) fail(child(at, key), "missing required key");
  return *it;
}

double number(const Json& j, const std::string& at) {
  if (!j.is_number()) fail(at, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) fail(at, "expected a finite number");
  return v;
}

long integer(const Json& j, const std::string& at) {
  if (!j.is_number_integer()) fail(at, "expected an integer");
  return j.get<long>();
}

std::string text(const Json& j, const std::string& at) {
  if (!j.is_string()) fail(at, "expected a string");
  return j.get<std::string>();
}

// Runs a library constructor, turning its parameter errors into config errors
// at `at`.
template <class F>
auto build(const std::string& at, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError& e) {
    if (e.field().empty()) fail(at, e.what());
    throw;
  } catch (const Error& e) {
    fail(at, e.what());
  }
}

struct AtomWriter {
  Json& params;
  std::string& name;

  void operator()(const atom::L1Norm& a) {
    name = "l1";
    params["dim"] = a.dim;
  }
  void operator()(const atom::EuclNorm& a) {
    name = "eucl";
    params["dim"] = a.dim;
  }
  void operator()(const atom::QuadForm& a) {
    name = "quad_form";
    params["a"] = to_json(a.a);
  }
  void operator()(const atom::Affine& a) {
    name = "affine";
    params["u"] = to_json(a.u);
    params["alpha"] = a.alpha;
  }
  void operator()(const atom::IndicatorBall& a) {
    name = "indicator_ball";
    params["center"] = to_json(a.center);
    params["radius"] = a.radius;
  }
  void operator()(const atom::IndicatorSubspace& a) {
    name = "indicator_subspace";
    params["basis"] = to_json(a.basis);
  }
  void operator()(const atom::DistBall& a) {
    name = "dist_ball";
    params["center"] = to_json(a.center);
    params["radius"] = a.radius;
  }
  void operator()(const atom::SupportBall& a) {
    name = "support_ball";
    params["center"] = to_json(a.center);
    params["radius"] = a.radius;
  }
  void operator()(const atom::SeparableSum& a) {
    name = "separable_sum";
    Json blocks = Json::array();
    for (const auto& b : a.blocks) {
      Json jb;
      jb["weight"] = b.weight;
      jb["offset"] = b.offset;
      jb["fn"] = to_json(b.fn);
      blocks.push_back(std::move(jb));
    }
    params["blocks"] = std::move(blocks);
  }
};

struct TransformWriter {
  Json& out;

  void operator()(const transform::Translate& t) {
    out["type"] = "translate";
    out["shift"] = to_json(t.shift);
  }
  void operator()(const transform::ScaleArg& t) {
    out["type"] = "scale_arg";
    out["factor"] = t.factor;
  }
  void operator()(const transform::ScaleVal& t) {
    out["type"] = "scale";
    out["factor"] = t.factor;
  }
  void operator()(const transform::AddAffine& t) {
    out["type"] = "add_affine";
    out["slope"] = to_json(t.slope);
    out["offset"] = t.offset;
  }
  void operator()(const transform::AddQuad& t) {
    out["type"] = "add_quadratic";
    out["weight"] = t.weight;
  }
  void operator()(const transform::Envelope& t) {
    out["type"] = "envelope";
    out["index"] = t.index;
  }
};

ConvexFunction atom_from_json(const std::string& name, const Json& p, const std::string& at) {
  auto dim = [&]() -> Eigen::Index {
    long d = integer(member(p, at, "dim"), child(at, "dim"));
    if (d <= 0) fail(child(at, "dim"), "must be positive");
    return d;
  };
  auto vec = [&](std::string_view key) { return vector_from_json(member(p, at, key), child(at, key)); };
  auto num = [&](std::string_view key) { return number(member(p, at, key), child(at, key)); };

  if (name == "l1") {
    expect_object(p, at, {"dim"});
    return build(at, [&] { return ConvexFunction::l1_norm(dim()); });
  }
  if (name == "eucl") {
    expect_object(p, at, {"dim"});
    return build(at, [&] { return ConvexFunction::eucl_norm(dim()); });
  }
  if (name == "quadratic") {
    expect_object(p, at, {"dim"});
    return build(at, [&] { return ConvexFunction::quadratic(dim()); });
  }
  if (name == "quad_form") {
    expect_object(p, at, {"a"});
    Matrix a = matrix_from_json(member(p, at, "a"), child(at, "a"));
    if (a.rows() != a.cols()) fail(child(at, "a"), "matrix must be square");
    return build(at, [&] { return ConvexFunction::quad_form(a); });
  }
  if (name == "affine") {
    expect_object(p, at, {"u", "alpha"});
    return build(at, [&] { return ConvexFunction::affine(vec("u"), num("alpha")); });
  }
  if (name == "indicator_ball" || name == "dist_ball" || name == "support_ball") {
    expect_object(p, at, {"center", "radius"});
    Vector c = vec("center");
    double r = num("radius");
    if (c.size() == 0) fail(child(at, "center"), "empty vector");
    return build(at, [&] {
      if (name == "indicator_ball") return ConvexFunction::indicator_ball(c, r);
      if (name == "dist_ball") return ConvexFunction::dist_ball(c, r);
      return ConvexFunction::support_ball(c, r);
    });
  }
  if (name == "indicator_subspace") {
    expect_object(p, at, {"basis"});
    Matrix b = matrix_from_json(member(p, at, "basis"), child(at, "basis"));
    return build(at, [&] { return ConvexFunction::indicator_subspace(b); });
  }
  if (name == "separable_sum") {
    expect_object(p, at, {"blocks"});
    const std::string bat = child(at, "blocks");
    const Json& jb = member(p, at, "blocks");
    if (!jb.is_array() || jb.empty()) fail(bat, "expected a non-empty array");
    std::vector<atom::Block> blocks;
    for (std::size_t i = 0; i < jb.size(); ++i) {
      const std::string ba = child(bat, i);
      expect_object(jb[i], ba, {"weight", "offset", "fn"});
      long off = integer(member(jb[i], ba, "offset"), child(ba, "offset"));
      blocks.push_back(atom::Block{number(member(jb[i], ba, "weight"), child(ba, "weight")),
                                   function_from_json(member(jb[i], ba, "fn"), child(ba, "fn")), off});
    }
    return build(at, [&] { return ConvexFunction::separable_sum(blocks); });
  }
  fail(at, "unknown atom '" + name + "'");
}

ConvexFunction apply_transform(const ConvexFunction& f, const Json& t, const std::string& at) {
  if (!t.is_object()) fail(at, "expected an object");
  const std::string type = text(member(t, at, "type"), child(at, "type"));
  auto num = [&](std::string_view key) { return number(member(t, at, key), child(at, key)); };
  auto vec = [&](std::string_view key) {
    Vector v = vector_from_json(member(t, at, key), child(at, key));
    if (v.size() != f.dim()) {
      fail(child(at, key), "expected length " + std::to_string(f.dim()) + ", got " + std::to_string(v.size()));
    }
    return v;
  };
  if (type == "translate") {
    expect_object(t, at, {"type", "shift"});
    return build(at, [&] { return f.translated(vec("shift")); });
  }
  if (type == "scale_arg") {
    expect_object(t, at, {"type", "factor"});
    return build(at, [&] { return f.scaled_arg(num("factor")); });
  }
  if (type == "scale") {
    expect_object(t, at, {"type", "factor"});
    return build(at, [&] { return f.scaled(num("factor")); });
  }
  if (type == "add_affine") {
    expect_object(t, at, {"type", "slope", "offset"});
    return build(at, [&] { return f.plus_affine(vec("slope"), num("offset")); });
  }
  if (type == "add_quadratic") {
    expect_object(t, at, {"type", "weight"});
    return build(at, [&] { return f.plus_quadratic(num("weight")); });
  }
  if (type == "envelope") {
    expect_object(t, at, {"type", "index"});
    return build(at, [&] { return f.moreau_envelope(num("index")); });
  }
  fail(child(at, "type"), "unknown transform '" + type + "'");
}

std::vector<Vector> points_from_json(const Json& j, const std::string& at) {
  if (!j.is_array()) fail(at, "expected an array of points");
  std::vector<Vector> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].is_number()) {
      Vector v(1);
      v << number(j[i], child(at, i));
      out.push_back(v);
    } else {
      out.push_back(vector_from_json(j[i], child(at, i)));
    }
  }
  return out;
}

std::vector<double> gammas_from_json(const Json& j, const std::string& at) {
  if (!j.is_array()) fail(at, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    double g = number(j[i], child(at, i));
    if (!(g > 0)) fail(child(at, i), "gamma must be positive");
    out.push_back(g);
  }
  return out;
}

Eigen::Index spec_dim(const JobConfig& c) {
  if (c.function) return c.function->dim();
  if (c.composition) return c.composition->op().cols();
  if (c.mixture) return c.mixture->dim();
  return 0;
}

bool has_spec(const JobConfig& c) { return c.function || c.composition || c.mixture; }

void check_job(const JobConfig& c) {
  const bool fn_target = c.target == Target::Function;
  auto need_spec = [&] {
    if (!has_spec(c)) fail("/spec", "missing required key");
  };
  auto need_points = [&] {
    if (c.points.empty()) fail("/points", "at least one point is required");
    const Eigen::Index n = spec_dim(c);
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      if (c.points[i].size() != n) {
        fail(child("/points", i),
             "expected a point of dimension " + std::to_string(n) + ", got " + std::to_string(c.points[i].size()));
      }
    }
  };
  auto only_targets = [&](std::initializer_list<Target> ts) {
    for (Target t : ts) {
      if (t == c.target) return;
    }
    fail("/target", "target '" + to_string(c.target) + "' is not supported by " + to_string(c.command));
  };

  switch (c.command) {
    case Command::Eval:
      need_spec();
      need_points();
      break;
    case Command::Prox:
      need_spec();
      need_points();
      if (fn_target && c.gammas.empty()) fail("/gammas", "prox of a function needs at least one gamma");
      break;
    case Command::Envelope:
      need_spec();
      need_points();
      only_targets({Target::Function, Target::Cocomposition, Target::Comixture});
      if (c.target == Target::Comixture) {
        if (c.rho) fail("/rho", "the comixture envelope index is the mixture gamma; drop rho");
      } else if (!c.rho) {
        fail("/rho", "missing required key");
      }
      break;
    case Command::Sweep:
      need_spec();
      need_points();
      only_targets({Target::Composition, Target::Cocomposition});
      for (std::size_t i = 1; i < c.gammas.size(); ++i) {
        if (!(c.gammas[i] > c.gammas[i - 1])) fail(child("/gammas", i), "sweep gammas must be strictly increasing");
      }
      break;
    case Command::Figure:
      if (c.preset.empty() == !c.composition) fail("/preset", "give exactly one of preset and spec");
      if (has_spec(c) && !c.composition) fail("/target", "figure needs a composition spec");
      if (c.composition && c.composition->op().cols() != 2) fail("/spec/L", "figure needs an operator on R^2");
      if (!c.preset.empty()) build("/preset", [&] { return figure_preset(c.preset); });
      if (c.grid.points < 2) fail("/grid/points", "at least 2 points per axis");
      if (!(c.grid.lo < c.grid.hi)) fail("/grid", "lo must be below hi");
      break;
    case Command::Argmin:
      need_spec();
      only_targets({Target::Cocomposition, Target::Comixture});
      if (c.start && c.start->size() != spec_dim(c)) fail("/start", "dimension mismatch");
      if (c.start && !c.gammas.empty()) fail("/start", "start is only used without a gamma list");
      for (std::size_t i = 1; i < c.gammas.size(); ++i) {
        if (!(c.gammas[i] < c.gammas[i - 1])) {
          fail(child("/gammas", i), "argmin gammas must be strictly decreasing");
        }
      }
      break;
    case Command::Verify: {
      build("/scale", [&] { return verify::scale_preset(c.scale); });
      if (c.suite != "all") {
        bool known = false;
        for (const auto& s : verify::registry()) known = known || s.id == c.suite;
        if (!known) fail("/suite", "unknown suite '" + c.suite + "'");
      }
      break;
    }
  }
}

int line_of(std::string_view text, std::size_t offset, int* column) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  *column = col;
  return line;
}

// Minimal scanner over text already accepted by the parser.
class Scanner {
 public:
  explicit Scanner(std::string_view t) : t_(t) {}

  std::size_t find(std::string_view pointer) {
    pos_ = 0;
    ws();
    std::size_t start = 0;
    while (!pointer.empty()) {
      pointer.remove_prefix(1);  // '/'
      std::size_t cut = pointer.find('/');
      std::string token = unescape_pointer(pointer.substr(0, cut));
      pointer = cut == std::string_view::npos ? std::string_view() : pointer.substr(cut);
      if (!descend(token)) return std::string_view::npos;
    }
    start = pos_;
    return start;
  }

 private:
  static std::string unescape_pointer(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '~' && i + 1 < s.size()) {
        out += s[i + 1] == '1' ? '/' : '~';
        ++i;
      } else {
        out += s[i];
      }
    }
    return out;
  }

  void ws() {
    while (pos_ < t_.size() && (t_[pos_] == ' ' || t_[pos_] == '\t' || t_[pos_] == '\n' || t_[pos_] == '\r')) ++pos_;
  }

  std::string string() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < t_.size() && t_[pos_] != '"') {
      if (t_[pos_] == '\\' && pos_ + 1 < t_.size()) {
        out += t_[pos_ + 1];
        pos_ += 2;
      } else {
        out += t_[pos_++];
      }
    }
    ++pos_;
    return out;
  }

  void skip_value() {
    ws();
    if (pos_ >= t_.size()) return;
    char c = t_[pos_];
    if (c == '"') {
      string();
    } else if (c == '{' || c == '[') {
      const char close = c == '{' ? '}' : ']';
      ++pos_;
      ws();
      if (t_[pos_] == close) {
        ++pos_;
        return;
      }
      while (true) {
        ws();
        if (close == '}') {
          string();
          ws();
          ++pos_;  // ':'
        }
        skip_value();
        ws();
        if (t_[pos_++] == close) return;
      }
    } else {
      while (pos_ < t_.size() && std::string_view(",]} \t\r\n").find(t_[pos_]) == std::string_view::npos) ++pos_;
    }
  }

  // Moves pos_ to the start of the member `token` of the value at pos_.
  bool descend(const std::string& token) {
    ws();
    if (pos_ >= t_.size()) return false;
    if (t_[pos_] == '{') {
      ++pos_;
      ws();
      if (t_[pos_] == '}') return false;
      while (true) {
        ws();
        std::string key = string();
        ws();
        ++pos_;  // ':'
        ws();
        if (key == token) return true;
        skip_value();
        ws();
        if (t_[pos_++] == '}') return false;
      }
    }
    if (t_[pos_] == '[') {
      std::size_t want = 0;
      for (char c : token) {
        if (c < '0' || c > '9') return false;
        want = want * 10 + static_cast<std::size_t>(c - '0');
      }
      ++pos_;
      ws();
      if (t_[pos_] == ']') return false;
      for (std::size_t i = 0;; ++i) {
        ws();
        if (i == want) return true;
        skip_value();
        ws();
        if (t_[pos_++] == ']') return false;
      }
    }
    return false;
  }

  std::string_view t_;
  std::size_t pos_ = 0;
};

}  // namespace

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json to_json(const Matrix& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  Json e = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    e.push_back(std::move(row));
  }
  j["entries"] = std::move(e);
  return j;
}

Json to_json(const DenseMap& m) { return to_json(m.matrix()); }

Json to_json(const ConvexFunction& f) {
  Json j;
  std::string name;
  Json params = Json::object();
  std::visit(AtomWriter{params, name}, f.atom());
  j["atom"] = name;
  j["params"] = std::move(params);
  Json ts = Json::array();
  for (const auto& t : f.transforms()) {
    Json jt;
    std::visit(TransformWriter{jt}, t);
    ts.push_back(std::move(jt));
  }
  j["transforms"] = std::move(ts);
  return j;
}

Json to_json(const SolverOpts& o) {
  Json j;
  j["tol"] = o.tol;
  j["max_iter"] = o.max_iter;
  j["divergence_radius"] = o.divergence_radius;
  return j;
}

Json to_json(const CompositionSpec& s) {
  Json j;
  j["L"] = to_json(s.op());
  j["g"] = to_json(s.fn());
  j["gamma"] = s.gamma();
  return j;
}

Json to_json(const MixtureSpec& s) {
  Json j;
  j["gamma"] = s.gamma();
  Json terms = Json::array();
  for (const auto& t : s.terms()) {
    Json jt;
    jt["alpha"] = t.alpha;
    jt["L"] = to_json(t.op);
    jt["g"] = to_json(t.fn);
    terms.push_back(std::move(jt));
  }
  j["terms"] = std::move(terms);
  return j;
}

Vector vector_from_json(const Json& j, const std::string& at) {
  if (!j.is_array()) fail(at, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], child(at, i));
  return v;
}

Matrix matrix_from_json(const Json& j, const std::string& at) {
  expect_object(j, at, {"rows", "cols", "entries"});
  const long rows = integer(member(j, at, "rows"), child(at, "rows"));
  const long cols = integer(member(j, at, "cols"), child(at, "cols"));
  if (rows < 0) fail(child(at, "rows"), "must be nonnegative");
  if (cols < 0) fail(child(at, "cols"), "must be nonnegative");
  const std::string eat = child(at, "entries");
  const Json& e = member(j, at, "entries");
  if (!e.is_array()) fail(eat, "expected an array of rows");
  if (static_cast<long>(e.size()) != rows) {
    fail(eat, "expected " + std::to_string(rows) + " rows, got " + std::to_string(e.size()));
  }
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    const std::string rat = child(eat, static_cast<std::size_t>(i));
    const Json& r = e[static_cast<std::size_t>(i)];
    if (!r.is_array()) fail(rat, "expected an array of numbers");
    if (static_cast<long>(r.size()) != cols) {
      fail(rat, "expected " + std::to_string(cols) + " entries, got " + std::to_string(r.size()));
    }
    for (long k = 0; k < cols; ++k) {
      m(i, k) = number(r[static_cast<std::size_t>(k)], child(rat, static_cast<std::size_t>(k)));
    }
  }
  return m;
}

DenseMap map_from_json(const Json& j, const std::string& at) {
  Matrix m = matrix_from_json(j, at);
  if (m.rows() == 0 || m.cols() == 0) fail(at, "operator must be non-empty");
  return build(at, [&] { return DenseMap(m); });
}

ConvexFunction function_from_json(const Json& j, const std::string& at) {
  expect_object(j, at, {"atom", "params", "transforms"});
  const std::string name = text(member(j, at, "atom"), child(at, "atom"));
  static const std::vector<std::string> known = {"l1",        "eucl",          "quadratic",          "quad_form",
                                                 "affine",    "indicator_ball", "indicator_subspace", "dist_ball",
                                                 "support_ball", "separable_sum"};
  if (std::find(known.begin(), known.end(), name) == known.end()) fail(child(at, "atom"), "unknown atom '" + name + "'");
  static const Json empty = Json::object();
  const Json& params = j.contains("params") ? j["params"] : empty;
  ConvexFunction f = atom_from_json(name, params, child(at, "params"));
  if (j.contains("transforms")) {
    const Json& ts = j["transforms"];
    const std::string tat = child(at, "transforms");
    if (!ts.is_array()) fail(tat, "expected an array");
    for (std::size_t i = 0; i < ts.size(); ++i) f = apply_transform(f, ts[i], child(tat, i));
  }
  return f;
}

SolverOpts solver_opts_from_json(const Json& j, const std::string& at) {
  expect_object(j, at, {"tol", "max_iter", "divergence_radius"});
  SolverOpts o;
  if (j.contains("tol")) {
    o.tol = number(j["tol"], child(at, "tol"));
    if (!(o.tol > 0)) fail(child(at, "tol"), "must be positive");
  }
  if (j.contains("max_iter")) {
    long m = integer(j["max_iter"], child(at, "max_iter"));
    if (m <= 0 || m > std::numeric_limits<int>::max()) fail(child(at, "max_iter"), "out of range");
    o.max_iter = static_cast<int>(m);
  }
  if (j.contains("divergence_radius")) {
    o.divergence_radius = number(j["divergence_radius"], child(at, "divergence_radius"));
    if (!(o.divergence_radius > 0)) fail(child(at, "divergence_radius"), "must be positive");
  }
  return o;
}

CompositionSpec composition_from_json(const Json& j, const std::string& at, std::optional<double> default_gamma) {
  expect_object(j, at, {"L", "g", "gamma"});
  DenseMap L = map_from_json(member(j, at, "L"), child(at, "L"));
  ConvexFunction g = function_from_json(member(j, at, "g"), child(at, "g"));
  double gamma = 0;
  if (j.contains("gamma") || !default_gamma) {
    gamma = number(member(j, at, "gamma"), child(at, "gamma"));
  } else {
    gamma = *default_gamma;
  }
  if (L.rows() != g.dim()) {
    fail(child(at, "g"), "function dimension " + std::to_string(g.dim()) + " does not match the " +
                             std::to_string(L.rows()) + " rows of L");
  }
  if (!(gamma > 0)) fail(child(at, "gamma"), "must be positive");
  return build(at, [&] { return CompositionSpec(L, g, gamma); });
}

MixtureSpec mixture_from_json(const Json& j, const std::string& at, std::optional<double> default_gamma) {
  expect_object(j, at, {"gamma", "terms"});
  double gamma = 0;
  if (j.contains("gamma") || !default_gamma) {
    gamma = number(member(j, at, "gamma"), child(at, "gamma"));
  } else {
    gamma = *default_gamma;
  }
  if (!(gamma > 0)) fail(child(at, "gamma"), "must be positive");
  const std::string tat = child(at, "terms");
  const Json& jt = member(j, at, "terms");
  if (!jt.is_array() || jt.empty()) fail(tat, "expected a non-empty array");
  std::vector<MixtureTerm> terms;
  for (std::size_t i = 0; i < jt.size(); ++i) {
    const std::string a = child(tat, i);
    expect_object(jt[i], a, {"alpha", "L", "g"});
    double alpha = number(member(jt[i], a, "alpha"), child(a, "alpha"));
    DenseMap L = map_from_json(member(jt[i], a, "L"), child(a, "L"));
    ConvexFunction g = function_from_json(member(jt[i], a, "g"), child(a, "g"));
    if (L.rows() != g.dim()) fail(child(a, "g"), "function dimension does not match the rows of L");
    if (!terms.empty() && L.cols() != terms.front().op.cols()) fail(child(a, "L"), "all terms need the same domain");
    terms.push_back(MixtureTerm{alpha, std::move(L), std::move(g)});
  }
  return build(at, [&] { return MixtureSpec(std::move(terms), gamma); });
}

std::string to_string(Command c) {
  switch (c) {
    case Command::Eval: return "eval";
    case Command::Prox: return "prox";
    case Command::Envelope: return "envelope";
    case Command::Sweep: return "sweep";
    case Command::Figure: return "figure";
    case Command::Argmin: return "argmin";
    case Command::Verify: return "verify";
  }
  return "?";
}

std::string to_string(Target t) {
  switch (t) {
    case Target::Function: return "function";
    case Target::Composition: return "composition";
    case Target::Cocomposition: return "cocomposition";
    case Target::Mixture: return "mixture";
    case Target::Comixture: return "comixture";
  }
  return "?";
}

std::string to_string(Format f) { return f == Format::Csv ? "csv" : "json"; }

Command command_from_string(std::string_view s) {
  for (Command c : {Command::Eval, Command::Prox, Command::Envelope, Command::Sweep, Command::Figure, Command::Argmin,
                    Command::Verify}) {
    if (to_string(c) == s) return c;
  }
  throw ConfigError("unknown command '" + std::string(s) + "'", "/command");
}

Target target_from_string(std::string_view s) {
  for (Target t : {Target::Function, Target::Composition, Target::Cocomposition, Target::Mixture, Target::Comixture}) {
    if (to_string(t) == s) return t;
  }
  throw ConfigError("unknown target '" + std::string(s) + "'", "/target");
}

Format format_from_string(std::string_view s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw ConfigError("unknown format '" + std::string(s) + "' (expected csv or json)", "/output/format");
}

Json to_json(const JobConfig& c) {
  Json j;
  j["command"] = to_string(c.command);
  const double first = c.gammas.empty() ? 0.0 : c.gammas.front();
  if (has_spec(c)) {
    j["target"] = to_string(c.target);
    Json spec;
    if (c.function) spec = to_json(*c.function);
    if (c.composition) spec = to_json(*c.composition);
    if (c.mixture) spec = to_json(*c.mixture);
    // A spec gamma equal to the first listed gamma is implied by the list.
    if ((c.composition || c.mixture) && !c.gammas.empty() && spec["gamma"].get<double>() == first) {
      spec.erase("gamma");
    }
    j["spec"] = std::move(spec);
  }
  if (!c.points.empty()) {
    Json pts = Json::array();
    for (const auto& p : c.points) pts.push_back(to_json(p));
    j["points"] = std::move(pts);
  }
  if (!c.gammas.empty()) j["gammas"] = c.gammas;
  if (c.rho) j["rho"] = *c.rho;
  if (c.start) j["start"] = to_json(*c.start);
  if (!c.preset.empty()) j["preset"] = c.preset;
  if (c.command == Command::Figure) {
    j["grid"] = Json{{"lo", c.grid.lo}, {"hi", c.grid.hi}, {"points", c.grid.points}};
  }
  if (c.command == Command::Verify) {
    j["suite"] = c.suite;
    j["scale"] = c.scale;
  }
  Json out;
  if (!c.output.path.empty()) out["path"] = c.output.path;
  out["format"] = to_string(c.output.format);
  j["output"] = std::move(out);
  j["seed"] = c.seed;
  j["solver"] = to_json(c.solver);
  return j;
}

JobConfig job_from_json(const Json& j) {
  expect_object(j, "", {"command", "target", "spec", "points", "gammas", "rho", "start", "preset", "grid", "suite",
                        "scale", "output", "seed", "solver"});
  JobConfig c;
  c.command = command_from_string(text(member(j, "", "command"), "/command"));
  if (j.contains("gammas")) c.gammas = gammas_from_json(j["gammas"], "/gammas");
  // The spec gamma may be left out when a gamma list is given; sweeps and
  // figures do not use it at all.
  std::optional<double> first;
  if (!c.gammas.empty()) {
    first = c.gammas.front();
  } else if (c.command == Command::Sweep || c.command == Command::Figure) {
    first = 1.0;
  }

  if (j.contains("spec")) {
    const Json& s = j["spec"];
    if (!s.is_object()) fail("/spec", "expected an object");
    if (j.contains("target")) {
      c.target = target_from_string(text(j["target"], "/target"));
    } else if (s.contains("atom")) {
      c.target = Target::Function;
    } else if (s.contains("terms")) {
      c.target = Target::Comixture;
    } else {
      c.target = Target::Cocomposition;
    }
    switch (c.target) {
      case Target::Function: c.function = function_from_json(s, "/spec"); break;
      case Target::Composition:
      case Target::Cocomposition: c.composition = composition_from_json(s, "/spec", first); break;
      case Target::Mixture:
      case Target::Comixture: c.mixture = mixture_from_json(s, "/spec", first); break;
    }
  } else if (j.contains("target")) {
    fail("/target", "target given without a spec");
  }
  if (j.contains("points")) c.points = points_from_json(j["points"], "/points");
  if (j.contains("rho")) {
    c.rho = number(j["rho"], "/rho");
    if (!(*c.rho > 0)) fail("/rho", "must be positive");
  }
  if (j.contains("start")) c.start = vector_from_json(j["start"], "/start");
  if (j.contains("preset")) c.preset = text(j["preset"], "/preset");
  if (j.contains("grid")) {
    const Json& g = j["grid"];
    expect_object(g, "/grid", {"lo", "hi", "points"});
    if (g.contains("lo")) c.grid.lo = number(g["lo"], "/grid/lo");
    if (g.contains("hi")) c.grid.hi = number(g["hi"], "/grid/hi");
    if (g.contains("points")) c.grid.points = integer(g["points"], "/grid/points");
  }
  if (j.contains("suite")) c.suite = text(j["suite"], "/suite");
  if (j.contains("scale")) c.scale = text(j["scale"], "/scale");
  if (j.contains("output")) {
    const Json& o = j["output"];
    expect_object(o, "/output", {"path", "format"});
    if (o.contains("path")) c.output.path = text(o["path"], "/output/path");
    if (o.contains("format")) c.output.format = format_from_string(text(o["format"], "/output/format"));
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("/seed", "expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("solver")) c.solver = solver_opts_from_json(j["solver"], "/solver");
  check_job(c);
  return c;
}

Json parse_json(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // byte is one past the offending character
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    int column = 0;
    const int line = line_of(text, at, &column);
    std::string msg = e.what();
    // Keep only the description; the position is reported in front.
    const auto col = msg.find("column ");
    const auto cut = col == std::string::npos ? std::string::npos : msg.find(": ", col);
    if (cut != std::string::npos) msg = msg.substr(cut + 2);
    throw ConfigError(std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + msg,
                      "", line, column);
  }
}

TextPosition locate(std::string_view text, std::string_view pointer) {
  if (pointer == "/") pointer = "";
  Scanner s(text);
  const std::size_t off = s.find(pointer);
  if (off == std::string_view::npos) return {};
  TextPosition p;
  p.line = line_of(text, off, &p.column);
  return p;
}

JobConfig job_from_text(std::string_view text, std::string_view source) {
  Json j = parse_json(text, source);
  try {
    return job_from_json(j);
  } catch (const ConfigError& e) {
    // Point at the deepest prefix of the field that exists in the text.
    std::string ptr = e.field();
    TextPosition p = locate(text, ptr);
    while (p.line == 0 && !ptr.empty()) {
      ptr = ptr.substr(0, ptr.rfind('/'));
      p = locate(text, ptr);
    }
    std::string where = std::string(source);
    if (p.line > 0) where += ":" + std::to_string(p.line) + ":" + std::to_string(p.column);
    throw ConfigError(where + ": " + e.what(), e.field(), p.line, p.column);
  }
}

JobConfig load_job(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return job_from_text(ss.str(), path);
}

}  // namespace proxkit::io
