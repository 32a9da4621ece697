#include "tsh/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "tsh/calculus.hpp"
#include "tsh/catalog.hpp"
#include "tsh/dynamics.hpp"
#include "tsh/helmholtz.hpp"
#include "tsh/variational.hpp"

namespace tsh {

using nlohmann::json;

TimeScale random_timescale(std::uint64_t seed, std::size_t min_segments, std::size_t max_segments,
                           double dense_step) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> count(min_segments, max_segments);
  std::uniform_real_distribution<double> gap(0.05, 0.3), length(0.1, 0.5), coin(0.0, 1.0);
  const std::size_t n = count(gen);
  std::vector<Interval> segs;
  double t = 0.0;
  bool have_interval = false, have_point = false;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) t += gap(gen);
    // Force at least one of each kind so every scale is genuinely mixed.
    bool interval = coin(gen) < 0.5;
    if (k + 1 == n && !have_interval) interval = true;
    if (k + 1 == n && !have_point) interval = false;
    if (interval) {
      const double hi = t + length(gen);
      segs.push_back({t, hi});
      t = hi;
      have_interval = true;
    } else {
      segs.push_back({t, t});
      have_point = true;
    }
  }
  return TimeScale(std::move(segs), dense_step);
}

namespace {

void write(const std::string& dir, const std::string& name, const std::string& content) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write selftest artifact " + name);
  f << content;
}

json identities(std::uint64_t seed, bool& ok) {
  double inv_scattered = 0.0, inv_dense = 0.0, comp = 0.0;
  std::size_t tested = 0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const TimeScale ts = random_timescale(seed * 1000 + k, 3, 20);
    const GridFunction f = GridFunction::scalar(ts, [](double t) { return std::sin(3.0 * t) + t * t; });
    const RestrictedDomains dom = ts.restricted_domains();
    const std::vector<bool> junction = junction_mask(ts);
    const Grid& g = ts.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double t = g.points[i];
      if (!dom.in_both(t) || junction[i]) continue;
      const PointClass c = ts.classify(t);
      const double r = inverse_identity_residual(ts, t);
      if (c.right_scattered() && c.left_scattered()) inv_scattered = std::max(inv_scattered, r);
      else inv_dense = std::max(inv_dense, r);
      comp = std::max({comp, composition_identity_residual(f, t), composition_identity_residual_dual(f, t)});
      ++tested;
    }
  }
  const bool pass = inv_scattered == 0.0 && inv_dense <= 1e-10 && comp <= 1e-6;
  ok = ok && pass;
  return {{"scales", 10},
          {"points", tested},
          {"inverse_residual_scattered", inv_scattered},
          {"inverse_residual_dense", inv_dense},
          {"composition_residual", comp},
          {"pass", pass}};
}

json catalog_checks(std::uint64_t seed, bool& ok) {
  json out = json::array();
  for (const CatalogEntry& e : field_catalog()) {
    CheckOptions opt;
    opt.seed = seed;
    opt.tol = 1e-8;
    const HelmholtzReport r = check_conditions(e.field, opt);
    const bool verdict_ok = (r.verdict == Verdict::hamiltonian) == e.hamiltonian;
    const bool trace_ok = std::abs(r.trace_violation - e.trace_violation) <= 1e-8;
    json j{{"field", e.name},
           {"verdict", to_string(r.verdict)},
           {"trace_violation", r.trace_violation},
           {"asym_qp", r.asym_qp},
           {"asym_pq", r.asym_pq}};
    bool pass = verdict_ok && trace_ok;
    if (e.hamiltonian) {
      ReconstructOptions ro;
      ro.check = opt;
      const ReconstructedHamiltonian h = reconstruct(e.field, ro);
      const RoundtripResult rt = roundtrip_residual(e.field, h, opt.box, 128, seed);
      const std::size_t d = e.field.dim();
      double err = 0.0;
      for (const auto& z : phase_samples(d, opt.box, 128, seed + 1)) {
        const std::span<const double> q(z.data(), d), p(z.data() + d, d);
        err = std::max(err, std::abs(h(q, p) - e.h->value(q, p)));
      }
      j["roundtrip_residual"] = rt.residual;
      j["hamiltonian_max_error"] = err;
      pass = pass && rt.residual <= 1e-8 && err <= 1e-10;
    }
    j["pass"] = pass;
    ok = ok && pass;
    out.push_back(j);
  }
  return out;
}

json trajectory_check(const std::string& name, const TimeScale& ts, const std::string& dir, bool& ok) {
  const Hamiltonian& h = *catalog_entry("harmonic").h;
  const std::vector<double> q0{1.0}, p0{0.0};
  const Trajectory d = solve_derivative_form(h, ts, q0, p0);
  const Trajectory i = solve_integral_form(h, ts, d.c_q, d.c_p);
  const double r2 = residual_star2(h, d).value;
  const double r1 = residual_star1(h, i).value;
  const double tol = std::max(1e-8, 10.0 * std::pow(ts.dense_step(), 4));
  const bool pass = r1 <= tol && r2 <= tol;
  ok = ok && pass;
  std::ostringstream csv;
  d.write_csv(csv);
  write(dir, "trajectory_" + name + ".csv", csv.str());
  return {{"scale", name},
          {"points", d.size()},
          {"residual_star2_of_derivative_form", r2},
          {"residual_star1_of_integral_form", r1},
          {"tolerance", tol},
          {"pass", pass}};
}

json variational_check(std::uint64_t seed, bool& ok) {
  const TimeScale ts({{0.0, 0.5}, {0.6, 0.6}, {0.7, 0.7}, {0.8, 0.8}, {0.9, 0.9}, {1.0, 1.0}}, 0.01);
  double ham = 0.0;
  json j;
  for (const char* name : {"harmonic", "pendulum", "damped"}) {
    const CatalogEntry& e = catalog_entry(name);
    const PhasePath path = reference_path(ts, e.field.dim());
    const double r = selfadjointness_residual(e.field, path, 5, seed).residual;
    j[name] = r;
    if (e.hamiltonian) ham = std::max(ham, r);
  }
  const bool pass = ham <= 1e-6 && j["damped"].get<double>() >= std::max(100.0 * ham, 1e-4);
  j["pass"] = pass;
  ok = ok && pass;
  return j;
}

}  // namespace

SelftestResult run_selftest(std::uint64_t seed, const std::string& out_dir) {
  SelftestResult r;
  bool ok = true;
  r.report["seed"] = seed;
  r.report["identities"] = identities(seed, ok);
  r.report["catalog"] = catalog_checks(seed, ok);
  r.report["variational"] = variational_check(seed, ok);
  json traj = json::array();
  traj.push_back(trajectory_check("discrete", TimeScale::uniform(0.0, 0.1, 10), out_dir, ok));
  traj.push_back(trajectory_check(
      "mixed", TimeScale({{0.0, 0.0}, {0.1, 0.1}, {0.2, 0.2}, {0.3, 0.3}, {0.4, 0.4}, {0.5, 1.0}}, 1e-3), out_dir,
      ok));
  r.report["trajectories"] = traj;
  r.report["passed"] = ok;
  r.passed = ok;
  write(out_dir, "selftest.json", r.report.dump(2) + "\n");
  return r;
}

}  // namespace tsh
