#include "tsh/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tsh/calculus.hpp"
#include "tsh/catalog.hpp"
#include "tsh/dynamics.hpp"
#include "tsh/expr.hpp"
#include "tsh/format.hpp"
#include "tsh/selftest.hpp"
#include "tsh/timescale.hpp"

namespace tsh::cli {

using nlohmann::json;

namespace {

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_file(const RunConfig& cfg, const std::string& name, const std::string& content) {
  if (cfg.out_dir.empty()) return;
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = std::filesystem::path(cfg.out_dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << content;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json field_json(const VectorField& x) {
  json j{{"label", x.label()}, {"dim", x.dim()}};
  if (x.analytic()) {
    json q = json::array(), p = json::array();
    for (const auto& e : x.exprs_q()) q.push_back(expr::to_string(e));
    for (const auto& e : x.exprs_p()) p.push_back(expr::to_string(e));
    j["q"] = q;
    j["p"] = p;
  }
  return j;
}

CheckOptions check_options(const RunConfig& cfg) {
  CheckOptions o;
  o.box = cfg.box;
  o.samples = cfg.samples;
  o.tol = cfg.tol;
  o.seed = cfg.seed;
  o.finite_difference = cfg.finite_difference;
  return o;
}

std::string summary_line(const HelmholtzReport& r) {
  std::ostringstream os;
  os << "verdict: " << to_string(r.verdict) << " (trace " << format_real(r.trace_violation) << ", asym_qp "
     << format_real(r.asym_qp) << ", asym_pq " << format_real(r.asym_pq) << "; tol " << format_real(r.tolerance)
     << ", " << r.samples - r.failed_samples << "/" << r.samples << " samples, "
     << (r.analytic_jacobians ? "analytic" : "finite-difference") << " Jacobians)\n";
  return os.str();
}

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const VectorField x = resolve_field(cfg);
  const HelmholtzReport r = check_conditions(x, check_options(cfg));
  json j = to_json(r);
  j["command"] = "check";
  j["field"] = field_json(x);
  write_file(cfg, "check.json", dump(j));
  if (cfg.format == "json") {
    out << dump(j);
  } else {
    out << "verdict,trace_violation,asym_qp,asym_pq,tolerance,samples,failed_samples\n"
        << to_string(r.verdict) << ',' << format_real(r.trace_violation) << ',' << format_real(r.asym_qp) << ','
        << format_real(r.asym_pq) << ',' << format_real(r.tolerance) << ',' << r.samples << ','
        << r.failed_samples << '\n';
  }
  err << summary_line(r);
  return r.verdict == Verdict::hamiltonian ? kOk : kNotHamiltonian;
}

int cmd_reconstruct(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const VectorField x = resolve_field(cfg);
  ReconstructOptions opts;
  opts.nodes = cfg.nodes;
  opts.check = check_options(cfg);
  const ReconstructedHamiltonian h = reconstruct(x, opts);
  const RoundtripResult rt = roundtrip_residual(x, h, cfg.box, cfg.samples, cfg.seed);
  const std::size_t d = x.dim();

  // H on a regular grid in the (q1, p1) plane, other coordinates zero.
  std::ostringstream csv;
  for (std::size_t c = 1; c <= d; ++c) csv << (c > 1 ? "," : "") << 'q' << c;
  for (std::size_t c = 1; c <= d; ++c) csv << ",p" << c;
  csv << ",H\n";
  std::vector<double> q(d, 0.0), p(d, 0.0);
  const std::size_t n = cfg.grid_points;
  const double span = cfg.box.hi - cfg.box.lo;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      q[0] = cfg.box.lo + span * static_cast<double>(i) / static_cast<double>(n - 1);
      p[0] = cfg.box.lo + span * static_cast<double>(k) / static_cast<double>(n - 1);
      for (double v : q) csv << format_real(v) << ',';
      for (double v : p) csv << format_real(v) << ',';
      csv << format_real(h(q, p)) << '\n';
    }
  }

  json j{{"command", "reconstruct"},
         {"field", field_json(x)},
         {"nodes", h.nodes()},
         {"roundtrip_residual", rt.residual},
         {"roundtrip_worst", {{"q", rt.worst_q}, {"p", rt.worst_p}}},
         {"samples", cfg.samples},
         {"grid_points", n}};
  if (const auto ref = resolve_hamiltonian(cfg)) {
    // The reconstruction vanishes at the origin; compare up to that constant.
    const std::vector<double> zero(d, 0.0);
    const double offset = ref->value(zero, zero);
    double worst = 0.0;
    for (const auto& z : phase_samples(d, cfg.box, cfg.samples, cfg.seed)) {
      const std::span<const double> zq(z.data(), d), zp(z.data() + d, d);
      worst = std::max(worst, std::abs(h(zq, zp) - (ref->value(zq, zp) - offset)));
    }
    j["reference_max_error"] = worst;
  }
  write_file(cfg, "reconstruct.json", dump(j));
  write_file(cfg, "hamiltonian.csv", csv.str());
  out << (cfg.format == "json" ? dump(j) : csv.str());
  err << "round-trip residual " << format_real(rt.residual) << " with " << h.nodes() << " nodes\n";
  return kOk;
}

json star_json(const StarResidual& r) {
  return {{"value", nullable(r.value)}, {"worst_t", r.worst_t}, {"skipped_junctions", r.skipped}};
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const TimeScale ts = parse_timescale(cfg.timescale);
  std::optional<Hamiltonian> h = resolve_hamiltonian(cfg);
  if (!h) {
    ReconstructOptions opts;
    opts.nodes = cfg.nodes;
    opts.check = check_options(cfg);
    h = reconstruct(resolve_field(cfg), opts).as_hamiltonian();
  }
  const std::size_t d = h->dim();
  std::vector<double> q0 = cfg.q0.empty() ? std::vector<double>(d, 1.0) : cfg.q0;
  std::vector<double> p0 = cfg.p0.empty() ? std::vector<double>(d, 0.0) : cfg.p0;
  if (q0.size() != d || p0.size() != d)
    throw ConfigError("simulate.q0 and simulate.p0 need " + std::to_string(d) + " components");

  const Trajectory tr = cfg.form == "integral" ? solve_integral_form(*h, ts, q0, p0, cfg.solver)
                                               : solve_derivative_form(*h, ts, q0, p0, cfg.solver);
  const StarResidual r1 = residual_star1(*h, tr);
  const StarResidual r2 = residual_star2(*h, tr);
  const auto energy = energy_series(*h, tr);

  std::ostringstream traj_csv, energy_csv;
  tr.write_csv(traj_csv);
  energy_csv << "t,H\n";
  double drift = 0.0;
  for (const auto& [t, e] : energy) {
    energy_csv << format_real(t) << ',' << format_real(e) << '\n';
    drift = std::max(drift, std::abs(e - energy.front().second));
  }
  std::size_t max_iters = 0;
  for (std::size_t it : tr.newton_iters) max_iters = std::max(max_iters, it);

  json j{{"command", "simulate"},
         {"timescale", format_timescale(ts)},
         {"hamiltonian", h->label()},
         {"form", cfg.form},
         {"points", tr.size()},
         {"junctions", tr.junctions},
         {"c_q", tr.c_q},
         {"c_p", tr.c_p},
         {"residual_star1", star_json(r1)},
         {"residual_star2", star_json(r2)},
         {"energy", {{"initial", energy.front().second}, {"final", energy.back().second}, {"max_drift", drift}}},
         {"max_newton_iters", max_iters},
         {"picard_sweeps", tr.picard_sweeps}};
  write_file(cfg, "simulate.json", dump(j));
  write_file(cfg, "trajectory.csv", traj_csv.str());
  write_file(cfg, "energy.csv", energy_csv.str());
  out << (cfg.format == "json" ? dump(j) : traj_csv.str());
  err << tr.size() << " points, residual_star1 " << format_real(r1.value) << ", residual_star2 "
      << format_real(r2.value) << '\n';
  if (!tr.junctions.empty()) err << tr.junctions.size() << " junction point(s) carried across\n";
  return kOk;
}

template <class F>
double or_nan(F&& f) {
  try {
    return f();
  } catch (const std::exception&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

int cmd_calculus(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const TimeScale ts = parse_timescale(cfg.timescale);
  const RestrictedDomains dom = ts.restricted_domains();
  const std::vector<bool> junction = junction_mask(ts);
  const GridFunction probe = GridFunction::scalar(ts, [](double t) { return std::sin(2.0 * t) + 0.5 * t * t; });
  const Grid& g = ts.grid();

  std::ostringstream csv;
  csv << "t,right,left,sigma,rho,mu,nu,in_upper,in_lower,junction,inverse_residual,composition_residual,"
         "composition_dual_residual\n";
  json rows = json::array();
  auto cell = [](double v) { return std::isfinite(v) ? format_real(v) : std::string(); };
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = g.points[i];
    const PointClass c = ts.classify(t);
    const double inv = or_nan([&] { return inverse_identity_residual(ts, t); });
    const double comp = or_nan([&] { return composition_identity_residual(probe, t); });
    const double dual = or_nan([&] { return composition_identity_residual_dual(probe, t); });
    const char* right = c.right_scattered() ? "scattered" : "dense";
    const char* left = c.left_scattered() ? "scattered" : "dense";
    csv << format_real(t) << ',' << right << ',' << left << ',' << format_real(ts.sigma(t)) << ','
        << format_real(ts.rho(t)) << ',' << format_real(ts.mu(t)) << ',' << format_real(ts.nu(t)) << ','
        << dom.in_upper(t) << ',' << dom.in_lower(t) << ',' << static_cast<int>(junction[i]) << ',' << cell(inv)
        << ',' << cell(comp) << ',' << cell(dual) << '\n';
    rows.push_back({{"t", t},
                    {"right", right},
                    {"left", left},
                    {"sigma", ts.sigma(t)},
                    {"rho", ts.rho(t)},
                    {"mu", ts.mu(t)},
                    {"nu", ts.nu(t)},
                    {"in_upper", dom.in_upper(t)},
                    {"in_lower", dom.in_lower(t)},
                    {"junction", static_cast<bool>(junction[i])},
                    {"inverse_residual", nullable(inv)},
                    {"composition_residual", nullable(comp)},
                    {"composition_dual_residual", nullable(dual)}});
  }
  json j{{"command", "calculus"},
         {"timescale", format_timescale(ts)},
         {"admissible", ts.admissible()},
         {"junctions", ts.admissibility_report()},
         {"points", rows}};
  write_file(cfg, "calculus.json", dump(j));
  write_file(cfg, "calculus.csv", csv.str());
  out << (cfg.format == "json" ? dump(j) : csv.str());
  err << g.size() << " grid points, " << ts.admissibility_report().size() << " junction point(s)\n";
  return kOk;
}

int cmd_selftest(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SelftestResult r = run_selftest(cfg.seed, cfg.out_dir);
  out << dump(r.report);
  err << "selftest " << (r.passed ? "passed" : "FAILED") << '\n';
  return r.passed ? kOk : kError;
}

}  // namespace

json to_json(const HelmholtzReport& r) {
  return {{"verdict", to_string(r.verdict)},
          {"trace_violation", r.trace_violation},
          {"asym_qp", r.asym_qp},
          {"asym_pq", r.asym_pq},
          {"tolerance", r.tolerance},
          {"samples", r.samples},
          {"failed_samples", r.failed_samples},
          {"jacobians", r.analytic_jacobians ? "analytic" : "finite_difference"},
          {"sampling", r.sample_description},
          {"worst", {{"condition", r.worst_condition}, {"q", r.worst_q}, {"p", r.worst_p}}}};
}

int run_command(const std::string& verb, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
    if (verb == "check") return cmd_check(cfg, out, err);
    if (verb == "reconstruct") return cmd_reconstruct(cfg, out, err);
    if (verb == "simulate") return cmd_simulate(cfg, out, err);
    if (verb == "calculus") return cmd_calculus(cfg, out, err);
    if (verb == "selftest") return cmd_selftest(cfg, out, err);
    err << "error: unknown command '" << verb << "'\n";
  } catch (const expr::ParseError& e) {
    err << "error: expression: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kError;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-scale Hamiltonian toolkit: calculus, Hamilton solvers, Helmholtz checks"};
  app.name("tsh");
  std::string verb, config_path, out_dir, format;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  app.add_option("command", verb, "check | reconstruct | simulate | calculus | selftest")
      ->required()
      ->check(CLI::IsMember({"check", "reconstruct", "simulate", "calculus", "selftest"}));
  app.add_option("--config", config_path, "YAML configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "seed for sampling and random variations");
  app.add_option("--tol", tol, "Helmholtz tolerance")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "directory for artifacts");
  app.add_option("--format", format, "stdout format")->check(CLI::IsMember({"json", "csv"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kError;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
  if (seed) cfg.seed = *seed;
  if (tol) cfg.tol = *tol;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (!format.empty()) cfg.format = format;
  return run_command(verb, cfg, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"tsh"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace tsh::cli
