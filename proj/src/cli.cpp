#include "proxkit/cli.hpp"

#include <charconv>
#include <cmath>
#include <variant>

#include "proxkit/verify.hpp"

namespace proxkit::cli {

namespace {

using io::Command;
using io::Format;
using io::Json;
using io::JobConfig;
using io::Target;

using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  Json extras = Json::object();
  std::size_t diverged = 0;
  bool checks_failed = false;
};

Json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
    return *d;
  }
  return std::get<std::string>(c);
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  return std::get<std::string>(c);
}

void write(const Table& t, const JobConfig& job, std::ostream& out) {
  if (job.output.format == Format::Csv) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
      out << '\n';
    }
    return;
  }
  Json j;
  j["command"] = io::to_string(job.command);
  for (const auto& [k, v] : t.extras.items()) j[k] = v;
  j["columns"] = t.columns;
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json r = Json::array();
    for (const auto& c : row) r.push_back(cell_json(c));
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  out << j.dump(2) << '\n';
}

void coord_columns(std::vector<std::string>& cols, const std::string& prefix, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) cols.push_back(prefix + std::to_string(i + 1));
}

void push_vector(std::vector<Cell>& row, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) row.emplace_back(v(i));
}

void push_report(Table& t, std::vector<Cell>& row, const SolveReport& r) {
  row.emplace_back(r.value.as_double());
  row.emplace_back(to_string(r.status));
  row.emplace_back(r.residual);
  if (r.status == SolveStatus::Diverged) ++t.diverged;
}

std::vector<double> job_gammas(const JobConfig& job) {
  if (!job.gammas.empty()) return job.gammas;
  if (job.composition) return {job.composition->gamma()};
  if (job.mixture) return {job.mixture->gamma()};
  return {};
}

Eigen::Index job_dim(const JobConfig& job) {
  if (job.function) return job.function->dim();
  if (job.composition) return job.composition->op().cols();
  return job.mixture->dim();
}

Table cmd_eval(const JobConfig& job) {
  Table t;
  const Eigen::Index n = job_dim(job);
  if (job.target == Target::Function) {
    coord_columns(t.columns, "x", n);
    t.columns.push_back("value");
    for (const auto& x : job.points) {
      std::vector<Cell> row;
      push_vector(row, x);
      row.emplace_back(eval(*job.function, x).as_double());
      t.rows.push_back(std::move(row));
    }
    return t;
  }
  t.columns.push_back("gamma");
  coord_columns(t.columns, "x", n);
  for (const char* c : {"value", "status", "residual"}) t.columns.push_back(c);
  const bool mix = job.mixture.has_value();
  if (mix) {
    t.columns.push_back("defining_sum");
    t.columns.push_back("discrepancy");
  }
  for (double gm : job_gammas(job)) {
    for (const auto& x : job.points) {
      std::vector<Cell> row{gm};
      push_vector(row, x);
      if (mix) {
        const MixtureSpec spec = job.mixture->with_gamma(gm);
        MixtureEval me = job.target == Target::Mixture ? mixture_eval(spec, x, job.solver)
                                                       : comixture_eval(spec, x, job.solver);
        push_report(t, row, me.direct_sum);
        row.emplace_back(me.defining_sum.value.as_double());
        row.emplace_back(me.discrepancy);
      } else {
        const CompositionSpec spec = job.composition->with_gamma(gm);
        push_report(t, row,
                    job.target == Target::Composition ? eval_composition(spec, x, job.solver)
                                                      : eval_cocomposition(spec, x, job.solver));
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table cmd_prox(const JobConfig& job) {
  Table t;
  const Eigen::Index n = job_dim(job);
  t.columns.push_back("gamma");
  coord_columns(t.columns, "x", n);
  coord_columns(t.columns, "p", n);
  for (double gm : job_gammas(job)) {
    for (const auto& x : job.points) {
      Vector p;
      switch (job.target) {
        case Target::Function: p = prox(*job.function, gm, x); break;
        case Target::Composition: p = prox_composition(job.composition->with_gamma(gm), x); break;
        case Target::Cocomposition: p = prox_cocomposition(job.composition->with_gamma(gm), x); break;
        case Target::Mixture: p = mixture_prox(job.mixture->with_gamma(gm), x); break;
        case Target::Comixture: p = comixture_prox(job.mixture->with_gamma(gm), x); break;
      }
      std::vector<Cell> row{gm};
      push_vector(row, x);
      push_vector(row, p);
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table cmd_envelope(const JobConfig& job) {
  Table t;
  const Eigen::Index n = job_dim(job);
  if (job.target == Target::Function) {
    t.columns.push_back("rho");
    coord_columns(t.columns, "x", n);
    t.columns.push_back("value");
    for (const auto& x : job.points) {
      std::vector<Cell> row{*job.rho};
      push_vector(row, x);
      row.emplace_back(envelope(*job.function, *job.rho, x));
      t.rows.push_back(std::move(row));
    }
    return t;
  }
  const bool co = job.target == Target::Cocomposition;
  t.columns.push_back("gamma");
  if (co) t.columns.push_back("rho");
  coord_columns(t.columns, "x", n);
  t.columns.push_back("value");
  for (double gm : job_gammas(job)) {
    for (const auto& x : job.points) {
      std::vector<Cell> row{gm};
      if (co) row.emplace_back(*job.rho);
      push_vector(row, x);
      row.emplace_back(co ? envelope_cocomposition(job.composition->with_gamma(gm), *job.rho, x, job.solver)
                          : comixture_envelope(job.mixture->with_gamma(gm), x));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

std::vector<double> default_sweep_gammas() {
  std::vector<double> g;
  for (int k = -8; k <= 8; ++k) g.push_back(std::ldexp(1.0, k));
  return g;
}

Table cmd_sweep(const JobConfig& job) {
  Table t;
  const Eigen::Index n = job_dim(job);
  coord_columns(t.columns, "x", n);
  for (const char* c : {"gamma", "composition", "composition_status", "cocomposition", "cocomposition_status",
                        "composition_monotone", "cocomposition_monotone"}) {
    t.columns.push_back(c);
  }
  const std::vector<double> gammas = job.gammas.empty() ? default_sweep_gammas() : job.gammas;
  bool all_ok = true;
  for (const auto& x : job.points) {
    SweepReport s = gamma_sweep(job.composition->op(), job.composition->fn(), x, gammas, job.solver);
    all_ok = all_ok && s.composition_monotone && s.cocomposition_monotone;
    for (const auto& r : s.rows) {
      std::vector<Cell> row;
      push_vector(row, x);
      row.emplace_back(r.gamma);
      row.emplace_back(r.composition.value.as_double());
      row.emplace_back(to_string(r.composition.status));
      row.emplace_back(r.cocomposition.value.as_double());
      row.emplace_back(to_string(r.cocomposition.status));
      row.emplace_back(std::string(s.composition_monotone ? "OK" : "FAIL"));
      row.emplace_back(std::string(s.cocomposition_monotone ? "OK" : "FAIL"));
      t.diverged += (r.composition.status == SolveStatus::Diverged) + (r.cocomposition.status == SolveStatus::Diverged);
      t.rows.push_back(std::move(row));
    }
  }
  t.extras["monotone"] = all_ok;
  t.checks_failed = !all_ok;
  return t;
}

Table cmd_argmin(const JobConfig& job) {
  Table t;
  const Eigen::Index n = job_dim(job);
  t.columns.push_back("gamma");
  coord_columns(t.columns, "x", n);
  for (const char* c : {"value", "status", "residual"}) t.columns.push_back(c);
  const bool mix = job.target == Target::Comixture;
  auto add = [&](double gm, const SolveReport& r) {
    std::vector<Cell> row{gm};
    if (r.argpoint) {
      push_vector(row, *r.argpoint);
    } else {
      for (Eigen::Index i = 0; i < n; ++i) row.emplace_back(std::string("nan"));
    }
    push_report(t, row, r);
    t.rows.push_back(std::move(row));
  };
  if (job.gammas.empty()) {
    SolveReport r;
    if (mix) {
      r = job.start ? comixture_argmin(*job.mixture, *job.start, job.solver) : comixture_argmin(*job.mixture, job.solver);
    } else {
      r = job.start ? argmin_cocomposition(*job.composition, *job.start, job.solver)
                    : argmin_cocomposition(*job.composition, job.solver);
    }
    add(mix ? job.mixture->gamma() : job.composition->gamma(), r);
    return t;
  }
  std::vector<ArgminSequenceRow> rows;
  double reference = 0;
  bool nondecreasing = false;
  if (mix) {
    ComixtureArgminSequence s = comixture_argmin_sequence(*job.mixture, job.gammas, job.solver);
    rows = s.rows;
    reference = s.reference;
    nondecreasing = s.nondecreasing;
  } else {
    ArgminSequenceReport s = argmin_sequence(job.composition->op(), job.composition->fn(), job.gammas, job.solver);
    rows = s.rows;
    reference = s.reference;
    nondecreasing = s.nondecreasing;
  }
  for (const auto& r : rows) add(r.gamma, r.report);
  t.extras["reference"] = std::isinf(reference) ? Json("inf") : Json(reference);
  t.extras["nondecreasing"] = nondecreasing;
  return t;
}

Table cmd_figure(const JobConfig& job, std::ostream& log) {
  const std::vector<double> gammas = job.gammas.empty() ? std::vector<double>{0.5, 2.0, 8.0} : job.gammas;
  std::string name = job.preset;
  FigureData d;
  if (!job.preset.empty()) {
    FigurePreset p = figure_preset(job.preset);
    d = figure_data(p.op, p.fn, gammas, job.grid, job.solver);
  } else {
    name = "custom";
    d = figure_data(job.composition->op(), job.composition->fn(), gammas, job.grid, job.solver);
  }
  Table t;
  t.columns = {"x1", "x2", "g_L"};
  for (double gm : gammas) t.columns.push_back("cocomposition_gamma=" + format_double(gm));
  t.rows.reserve(d.points.size());
  for (const auto& p : d.points) {
    std::vector<Cell> row{p.x1, p.x2, p.composed};
    for (double v : p.cocomposition) row.emplace_back(v);
    t.rows.push_back(std::move(row));
  }
  t.diverged = d.diverged;
  t.checks_failed = !d.below_composition() || !d.monotone_in_gamma();
  t.extras["preset"] = name;
  t.extras["gammas"] = gammas;
  t.extras["grid"] = Json{{"lo", job.grid.lo}, {"hi", job.grid.hi}, {"points", job.grid.points}};
  t.extras["below_composition"] = d.below_composition();
  t.extras["monotone_in_gamma"] = d.monotone_in_gamma();
  log << "figure " << name << ": " << job.grid.points << "x" << job.grid.points << " points, " << gammas.size()
      << " gammas; below_composition=" << (d.below_composition() ? "OK" : "FAIL")
      << " (" << d.above_composition << " violations), monotone_in_gamma="
      << (d.monotone_in_gamma() ? "OK" : "FAIL") << " (" << d.increasing_in_gamma << " violations)\n";
  return t;
}

int cmd_verify(const JobConfig& job, std::ostream& out, std::ostream& log) {
  const verify::Scale scale = verify::scale_preset(job.scale);
  std::vector<verify::SuiteReport> reports;
  if (job.suite == "all") {
    reports = verify::run_all(job.seed, scale);
  } else {
    reports.push_back(verify::run_suite(job.suite, job.seed, scale));
  }
  bool pass = true;
  for (const auto& r : reports) pass = pass && r.all_pass();
  if (job.output.format == Format::Json) {
    out << verify::to_json(reports) << '\n';
  } else {
    out << "suite,cases,failures,pass,elapsed_seconds,digest\n";
    for (const auto& r : reports) {
      out << r.suite_id << ',' << r.cases.size() << ',' << r.failures() << ',' << (r.all_pass() ? "true" : "false")
          << ',' << format_double(r.elapsed_seconds) << ',' << r.digest() << '\n';
    }
  }
  log << verify::summary_table(reports);
  return pass ? kExitOk : kExitSuiteFailure;
}

}  // namespace

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

int run_job(const JobConfig& job, std::ostream& out, std::ostream& log) {
  if (job.command == Command::Verify) return cmd_verify(job, out, log);
  Table t;
  switch (job.command) {
    case Command::Eval: t = cmd_eval(job); break;
    case Command::Prox: t = cmd_prox(job); break;
    case Command::Envelope: t = cmd_envelope(job); break;
    case Command::Sweep: t = cmd_sweep(job); break;
    case Command::Argmin: t = cmd_argmin(job); break;
    case Command::Figure: t = cmd_figure(job, log); break;
    case Command::Verify: break;
  }
  write(t, job, out);
  if (t.diverged > 0) {
    log << t.diverged << " solve(s) reported Diverged\n";
    return kExitDiverged;
  }
  if (t.checks_failed) {
    log << "checks failed\n";
    return kExitSuiteFailure;
  }
  return kExitOk;
}

}  // namespace proxkit::cli
