#include "sleq/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <ostream>

#include "CLI11.hpp"
#include "sleq/errors.hpp"
#include "sleq/gtrs.hpp"
#include "sleq/numrange.hpp"
#include "sleq/oracle.hpp"
#include "sleq/qp1eqc.hpp"
#include "sleq/scond.hpp"
#include "sleq/slemma.hpp"

namespace sleq::cli {

using nlohmann::json;

namespace {

// ---- parsing ---------------------------------------------------------------

double read_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(path, "not finite");
  return v;
}

Vector read_vector(const json& j, const std::string& path, Index n) {
  if (!j.is_array()) throw ParseError(path, "expected an array");
  if (static_cast<Index>(j.size()) != n) {
    throw ParseError(path, "expected " + std::to_string(n) + " entries, got " + std::to_string(j.size()));
  }
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = read_number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Matrix read_matrix(const json& j, const std::string& path, Index n) {
  if (!j.is_array()) throw ParseError(path, "expected an array of rows");
  if (static_cast<Index>(j.size()) != n) {
    throw ParseError(path, "expected " + std::to_string(n) + " rows, got " + std::to_string(j.size()));
  }
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) m.row(i) = read_vector(j[i], path + "[" + std::to_string(i) + "]", n).transpose();
  return m;
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

QuadForm read_quad(const json& obj, const std::string& path, Index n, const char* mk, const char* vk,
                   const char* ck, bool matrix_optional, std::vector<std::string>& warnings) {
  Matrix m = Matrix::Zero(n, n);
  if (!matrix_optional || obj.contains(mk)) m = read_matrix(field(obj, mk, path), join(path, mk), n);
  const SymMatrix s(m);
  if (s.asymmetry() > 0.0) warnings.push_back(join(path, mk) + " was symmetrized");
  return {s, read_vector(field(obj, vk, path), join(path, vk), n), read_number(field(obj, ck, path), join(path, ck))};
}

// ---- JSON output ------------------------------------------------------------

json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json to_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

json to_json(const Matrix& m) {
  json a = json::array();
  for (Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Vector(m.row(i).transpose())));
  return a;
}

template <class T>
json opt(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_same_v<T, double>) {
    return num(*v);
  } else {
    return to_json(*v);
  }
}

json to_json(const PencilInterval& p) {
  if (p.empty) return json{{"empty", true}};
  return {{"empty", false},
          {"lo", num(p.lo)},
          {"hi", num(p.hi)},
          {"lo_attained", p.lo_attained},
          {"hi_attained", p.hi_attained}};
}

json to_json(const Tolerances& t) {
  return {{"eig", t.eig},         {"rank", t.rank},
          {"feas", t.feas},       {"singleton", t.singleton},
          {"zero_block", t.zero_block}, {"mu_cap", t.mu_cap}};
}

struct Settings {
  std::string command;
  std::string mode;
  SolverOptions opt;
  int samples = 20000;
  double mu_lo = -100.0;
  double mu_hi = 100.0;
  double mu_step = 0.05;
};

json blank_report(const Settings& s) {
  return {{"command", s.command},
          {"verdict", nullptr},
          {"outcome", nullptr},
          {"certificate", nullptr},
          {"counterexample", nullptr},
          {"branch", nullptr},
          {"value", nullptr},
          {"x_star", nullptr},
          {"mu_star", nullptr},
          {"diagnostics", {{"tolerances", to_json(s.opt.tol)}, {"pencil_interval", nullptr}, {"seed", s.opt.seed}}}};
}

const QuadForm& single_constraint(const ProblemFile& pf) {
  if (pf.constraints.size() != 1) throw ParseError("constraints", "expected exactly one constraint");
  return pf.constraints.front();
}

std::pair<double, double> bounds_of(const ProblemFile& pf) {
  if (!pf.bounds) throw ParseError("bounds", "missing");
  return *pf.bounds;
}

// ---- subcommands ------------------------------------------------------------

void check_equality(const ProblemFile& pf, const Settings& s, json& r) {
  const SLemmaVerdict v = slemma_equality(pf.objective, single_constraint(pf), s.opt);
  r["verdict"] = {{"equivalence_holds", v.equivalence_holds}, {"e1", v.e1_true}, {"e2", v.e2_true}};
  if (v.null_spaces_match) r["verdict"]["null_spaces_match"] = *v.null_spaces_match;
  r["certificate"] = opt(v.certificate);
  r["counterexample"] = opt(v.counterexample);
  r["branch"] = to_string(v.branch);
  if (v.pencil) r["diagnostics"]["pencil_interval"] = to_json(*v.pencil);
  if (v.reduced_matrix) r["diagnostics"]["reduced_matrix"] = to_json(*v.reduced_matrix);
  if (!v.notes.empty()) r["diagnostics"]["notes"] = v.notes;
}

void check_inequality(const ProblemFile& pf, const Settings& s, json& r) {
  const SLemmaVerdict v = slemma_inequality(pf.objective, single_constraint(pf), s.opt);
  r["verdict"] = {{"equivalence_holds", v.equivalence_holds}, {"e1", v.e1_true}, {"e2", v.e2_true}};
  r["certificate"] = opt(v.certificate);
  r["counterexample"] = opt(v.counterexample);
  r["branch"] = to_string(v.branch);
  if (v.pencil) r["diagnostics"]["pencil_interval"] = to_json(*v.pencil);
}

void check_interval(const ProblemFile& pf, const Settings& s, json& r) {
  const auto [l, u] = bounds_of(pf);
  const GtrsProblem p{pf.objective, single_constraint(pf), l, u};
  const IntervalSLemmaVerdict v = interval_slemma(p, s.opt);
  r["verdict"] = {{"equivalence_holds", v.equivalence_holds}, {"i1", v.i1_true}, {"i2", v.i2_true}};
  r["certificate"] = opt(v.mu);
  r["counterexample"] = opt(v.counterexample);
  r["branch"] = v.exception_nu ? "interval-exception" : "interval-generic";
  r["diagnostics"]["exception_nu"] = opt(v.exception_nu);
  r["diagnostics"]["exception_matrix"] = opt(v.exception_matrix);
}

void solve_qp1eqc(const ProblemFile& pf, const Settings& s, json& r) {
  const SolveOutcome o = solve({pf.objective, single_constraint(pf)}, s.opt);
  json out = {{"status", to_string(o.status)}, {"route", o.route}, {"dual_value", opt(o.dual_value)}};
  if (o.witness) {
    out["witness"] = {{"label", o.witness->label}, {"scalar", num(o.witness->scalar)}, {"y0", to_json(o.witness->y0)}};
  }
  r["outcome"] = out;
  r["value"] = num(o.value);
  r["x_star"] = opt(o.x_star);
  r["mu_star"] = opt(o.mu_star);
  if (o.pencil) r["diagnostics"]["pencil_interval"] = to_json(*o.pencil);
}

void solve_gtrs_cmd(const ProblemFile& pf, const Settings& s, json& r) {
  const auto [l, u] = bounds_of(pf);
  const GtrsOutcome o = solve_gtrs({pf.objective, single_constraint(pf), l, u}, s.opt);
  r["outcome"] = {{"status", to_string(o.status)}, {"source", to_string(o.source)}};
  r["value"] = num(o.value);
  r["x_star"] = opt(o.x_star);
  r["mu_star"] = opt(o.mu_star);
  for (const auto& [key, side] : {std::pair{"lower", &o.lower}, std::pair{"upper", &o.upper}}) {
    if (!*side) continue;
    r["diagnostics"][key] = {{"status", to_string((*side)->status)}, {"value", num((*side)->value)}};
    if ((*side)->pencil) r["diagnostics"][key]["pencil_interval"] = to_json(*(*side)->pencil);
  }
}

void numrange_cmd(const ProblemFile& pf, const Settings& s, json& r) {
  NumrangeProblem p{pf.objective, {}};
  for (std::size_t i = 0; i < pf.constraints.size(); ++i) {
    const QuadForm& h = pf.constraints[i];
    if (!h.A.is_zero(s.opt.tol.zero_block)) {
      throw ParseError("constraints[" + std::to_string(i) + "].B", "must be zero for numrange");
    }
    p.affines.push_back({h.a, h.c});
  }
  const ConvexityVerdict v = classify_convexity(p, s.opt.tol);
  r["verdict"] = {{"convex", v.convex},
                  {"case", to_string(v.kase)},
                  {"rank", v.rank},
                  {"vav_eigenvalues", to_json(v.vav_eigenvalues)},
                  {"va_in_range", v.va_in_range},
                  {"witness_eig", opt(v.witness_eig)},
                  {"boundary", v.boundary}};
  r["branch"] = to_string(v.kase);
  if (p.affines.size() == 1 && !v.convex) {
    const OrthantVerdict o = classify_orthant_p1(p.f, p.affines.front(), s.opt.tol);
    r["outcome"] = {{"orthant_case", to_string(o.kase)},
                    {"escape_direction", opt(o.escape_direction)},
                    {"alpha", opt(o.alpha)}};
  }
}

void scond_cmd(const ProblemFile& pf, const Settings& s, json& r) {
  const QuadForm& h = single_constraint(pf);
  const auto c = sconditions(pf.objective, h, s.opt.tol);
  r["verdict"] = {{"s1", c[0]}, {"s2", c[1]}, {"s3", c[2]}, {"s4", c[3]},
                  {"assumption1", assumption1_holds(h, s.opt.tol)}};
}

void oracle_cmd(const ProblemFile& pf, const Settings& s, json& r) {
  const QuadForm& h = single_constraint(pf);
  const E1Oracle e1 = oracle_e1(pf.objective, h, s.samples, s.opt.seed, {}, s.opt.tol);
  const E2Oracle e2 = oracle_e2(pf.objective, h, mu_grid(s.mu_lo, s.mu_hi, s.mu_step), s.opt.tol);
  r["verdict"] = {{"e1", e1.refuted ? "refuted" : "true_so_far"}, {"e2", e2.found ? "found" : "none_on_grid"}};
  r["counterexample"] = opt(e1.witness);
  if (e2.found) r["certificate"] = num(e2.mu);
  r["value"] = num(e1.min_value);
  r["diagnostics"]["samples"] = e1.samples;
  r["diagnostics"]["mu_grid"] = {{"lo", s.mu_lo}, {"hi", s.mu_hi}, {"step", s.mu_step}};
}

using Handler = std::function<void(const ProblemFile&, const Settings&, json&)>;

struct FileResult {
  json report;
  int code = kComputed;
};

FileResult process(const std::string& path, const Settings& s, const Handler& h) {
  FileResult res{blank_report(s), kComputed};
  res.report["file"] = path;
  try {
    const ProblemFile pf = load_problem(path);
    if (!pf.warnings.empty()) res.report["diagnostics"]["warnings"] = pf.warnings;
    h(pf, s, res.report);
  } catch (const ParseError& e) {
    res.report["error"] = {{"kind", "parse"}, {"field", e.field()}, {"message", e.what()}};
    res.code = kParse;
  } catch (const PreconditionViolation& e) {
    res.report["error"] = {{"kind", "precondition"}, {"message", e.what()}};
    res.code = kPrecondition;
  } catch (const Error& e) {
    res.report["error"] = {{"kind", "failure"}, {"message", e.what()}};
    res.code = kFailure;
  }
  return res;
}

}  // namespace

ProblemFile parse_problem(const json& j) {
  ProblemFile pf;
  const json& jn = field(j, "n", "");
  if (!jn.is_number_integer() || jn.get<long long>() < 1) throw ParseError("n", "expected a positive integer");
  pf.n = jn.get<Index>();
  pf.objective = read_quad(field(j, "objective", ""), "objective", pf.n, "A", "a", "c", false, pf.warnings);
  const bool affine_only = j.contains("affine_only") && j["affine_only"].is_boolean() && j["affine_only"].get<bool>();
  if (j.contains("constraints")) {
    const json& cs = j["constraints"];
    if (!cs.is_array()) throw ParseError("constraints", "expected an array");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      pf.constraints.push_back(
          read_quad(cs[i], "constraints[" + std::to_string(i) + "]", pf.n, "B", "b", "d", affine_only, pf.warnings));
    }
  }
  if (j.contains("bounds")) {
    const json& b = j["bounds"];
    pf.bounds = std::pair{read_number(field(b, "l", "bounds"), "bounds.l"),
                          read_number(field(b, "u", "bounds"), "bounds.u")};
  }
  return pf;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("file", "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("file", e.what());
  }
  return parse_problem(j);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quadratic S-lemma decisions, QP1EQC/GTRS solves and joint range checks", "sleq"};
  app.require_subcommand(1);
  Settings s;
  std::optional<double> tol;
  int jobs = 1;
  std::vector<std::string> files;
  app.add_option("--tol", tol, "eigenvalue sign tolerance (relative)")->check(CLI::PositiveNumber);
  app.add_option("--seed", s.opt.seed, "seed for every sampling fallback")->capture_default_str();
  app.add_option("--jobs", jobs, "files processed concurrently")->check(CLI::Range(1, 256));

  Handler handler;
  const auto add_files = [&](CLI::App* sub) {
    sub->add_option("files", files, "problem files")->required();
    sub->fallthrough();
  };

  CLI::App* check = app.add_subcommand("check", "decide an S-lemma equivalence");
  check->add_option("--mode", s.mode, "equality, inequality or interval")
      ->required()
      ->check(CLI::IsMember({"equality", "inequality", "interval"}));
  add_files(check);

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve a single-constraint quadratic program");
  solve_cmd->require_subcommand(1);
  solve_cmd->fallthrough();
  CLI::App* qp = solve_cmd->add_subcommand("qp1eqc", "min f(x) s.t. h(x) = 0");
  CLI::App* gt = solve_cmd->add_subcommand("gtrs", "min f(x) s.t. l <= h(x) <= u");
  add_files(qp);
  add_files(gt);

  CLI::App* nr = app.add_subcommand("numrange", "convexity of the joint range of (f, affine h_i)");
  add_files(nr);
  CLI::App* sc = app.add_subcommand("scond", "evaluate S-Conditions 1-4");
  add_files(sc);
  CLI::App* orc = app.add_subcommand("oracle", "sampling audit of the two S-lemma statements");
  orc->add_option("--samples", s.samples, "constraint samples")->capture_default_str();
  orc->add_option("--mu-lo", s.mu_lo)->capture_default_str();
  orc->add_option("--mu-hi", s.mu_hi)->capture_default_str();
  orc->add_option("--mu-step", s.mu_step)->check(CLI::PositiveNumber)->capture_default_str();
  add_files(orc);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kComputed : kParse;
  }
  if (tol) s.opt.tol.eig = *tol;

  if (check->parsed()) {
    s.command = "check";
    if (s.mode == "equality") handler = check_equality;
    if (s.mode == "inequality") handler = check_inequality;
    if (s.mode == "interval") handler = check_interval;
  } else if (qp->parsed()) {
    s.command = "solve qp1eqc";
    handler = solve_qp1eqc;
  } else if (gt->parsed()) {
    s.command = "solve gtrs";
    handler = solve_gtrs_cmd;
  } else if (nr->parsed()) {
    s.command = "numrange";
    handler = numrange_cmd;
  } else if (sc->parsed()) {
    s.command = "scond";
    handler = scond_cmd;
  } else {
    s.command = "oracle";
    handler = oracle_cmd;
  }

  std::vector<FileResult> results(files.size());
  for (std::size_t start = 0; start < files.size(); start += static_cast<std::size_t>(jobs)) {
    const std::size_t stop = std::min(files.size(), start + static_cast<std::size_t>(jobs));
    std::vector<std::future<FileResult>> batch;
    for (std::size_t i = start; i < stop; ++i) {
      batch.push_back(std::async(std::launch::async, process, files[i], std::cref(s), std::cref(handler)));
    }
    for (std::size_t i = start; i < stop; ++i) results[i] = batch[i - start].get();
  }

  int code = kComputed;
  for (const FileResult& r : results) {
    // One object per line for batches; a single file gets indented output.
    out << (files.size() == 1 ? r.report.dump(2) : r.report.dump()) << '\n';
    code = std::max(code, r.code);
  }
  return code;
}

}  // namespace sleq::cli
