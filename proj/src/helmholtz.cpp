#include "tsh/helmholtz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tsh/timescale.hpp"

namespace tsh {

namespace {

Vec head(const std::vector<double>& z, std::size_t d) {
  return Eigen::Map<const Vec>(z.data(), static_cast<Eigen::Index>(d));
}

Vec tail(const std::vector<double>& z, std::size_t d) {
  return Eigen::Map<const Vec>(z.data() + d, static_cast<Eigen::Index>(d));
}

struct SampleViolation {
  double trace = 0.0;
  double asym_qp = 0.0;
  double asym_pq = 0.0;
  bool failed = false;
};

}  // namespace

const char* to_string(Verdict v) {
  return v == Verdict::hamiltonian ? "hamiltonian" : "not_hamiltonian";
}

JacobianBlocks jacobian_blocks(const VectorField& x, const Vec& q, const Vec& p, bool finite_difference) {
  return finite_difference ? x.jacobian_fd(q, p) : x.jacobian(q, p);
}

std::vector<std::vector<double>> phase_samples(std::size_t dim, const PhaseBox& box,
                                               std::size_t count, std::uint64_t seed) {
  ShiftedSobol seq(2 * dim, seed);
  std::vector<std::vector<double>> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<double> z = seq.next();
    for (double& v : z) v = box.lo + (box.hi - box.lo) * v;
    out.push_back(std::move(z));
  }
  return out;
}

HelmholtzReport check_conditions(const VectorField& x, const CheckOptions& options) {
  if (options.samples == 0) throw std::invalid_argument("check_conditions: n_samples must be >= 1");
  const std::size_t d = x.dim();
  const bool fd = options.finite_difference || !x.analytic();

  HelmholtzReport report;
  report.analytic_jacobians = !fd;
  report.tolerance = options.tol.value_or(fd ? 1e-5 : 1e-8);
  report.samples = options.samples;
  {
    std::ostringstream os;
    os.precision(17);
    os << "shifted Sobol, " << options.samples << " points in [" << options.box.lo << ", "
       << options.box.hi << "]^" << 2 * d << ", seed " << options.seed;
    report.sample_description = os.str();
  }

  const auto samples = phase_samples(d, options.box, options.samples, options.seed);
  std::vector<SampleViolation> v(samples.size());
  const auto n = static_cast<std::ptrdiff_t>(samples.size());
#pragma omp parallel for schedule(static) if (options.exec == Execution::parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto& z = samples[static_cast<std::size_t>(k)];
    SampleViolation& out = v[static_cast<std::size_t>(k)];
    try {
      Vec xq, xp;
      x.evaluate(head(z, d), tail(z, d), xq, xp);
      const JacobianBlocks j = jacobian_blocks(x, head(z, d), tail(z, d), fd);
      out.trace = (j.qq + j.pp.transpose()).cwiseAbs().maxCoeff();
      out.asym_qp = (j.qp - j.qp.transpose()).cwiseAbs().maxCoeff();
      out.asym_pq = (j.pq - j.pq.transpose()).cwiseAbs().maxCoeff();
    } catch (const std::exception&) {
      out.failed = true;
    }
  }

  double worst = -1.0;
  std::size_t worst_k = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k].failed) {
      ++report.failed_samples;
      continue;
    }
    report.trace_violation = std::max(report.trace_violation, v[k].trace);
    report.asym_qp = std::max(report.asym_qp, v[k].asym_qp);
    report.asym_pq = std::max(report.asym_pq, v[k].asym_pq);
    const double m = std::max({v[k].trace, v[k].asym_qp, v[k].asym_pq});
    if (m > worst) {
      worst = m;
      worst_k = k;
      report.worst_condition = m == v[k].trace ? "trace" : m == v[k].asym_qp ? "asym_qp" : "asym_pq";
    }
  }
  if (10 * report.failed_samples > report.samples)
    throw expr::EvalError("check_conditions: field could not be evaluated at " +
                          std::to_string(report.failed_samples) + " of " +
                          std::to_string(report.samples) + " samples");
  report.worst_q.assign(samples[worst_k].begin(), samples[worst_k].begin() + static_cast<std::ptrdiff_t>(d));
  report.worst_p.assign(samples[worst_k].begin() + static_cast<std::ptrdiff_t>(d), samples[worst_k].end());

  const bool ok = report.trace_violation <= report.tolerance && report.asym_qp <= report.tolerance &&
                  report.asym_pq <= report.tolerance;
  report.verdict = ok ? Verdict::hamiltonian : Verdict::not_hamiltonian;
  return report;
}

ReconstructedHamiltonian::ReconstructedHamiltonian(VectorField source, std::size_t nodes)
    : source_(std::move(source)), rule_(gauss_legendre_unit(nodes)) {}

double ReconstructedHamiltonian::operator()(std::span<const double> q, std::span<const double> p) const {
  const std::size_t d = source_.dim();
  std::vector<double> lq(d), lp(d), xq(d), xp(d);
  double h = 0.0;
  for (std::size_t k = 0; k < rule_.nodes.size(); ++k) {
    const double lam = rule_.nodes[k];
    for (std::size_t i = 0; i < d; ++i) {
      lq[i] = lam * q[i];
      lp[i] = lam * p[i];
    }
    source_.evaluate(lq, lp, xq, xp);
    double integrand = 0.0;
    for (std::size_t i = 0; i < d; ++i) integrand += p[i] * xq[i] - q[i] * xp[i];
    h += rule_.weights[k] * integrand;
  }
  return h;
}

void ReconstructedHamiltonian::gradient(std::span<const double> q, std::span<const double> p,
                                        std::span<double> hq, std::span<double> hp) const {
  const std::size_t d = source_.dim();
  const auto di = static_cast<Eigen::Index>(d);
  const Vec qv = Eigen::Map<const Vec>(q.data(), di);
  const Vec pv = Eigen::Map<const Vec>(p.data(), di);
  Vec gq = Vec::Zero(di), gp = Vec::Zero(di);
  Vec xq, xp;
  for (std::size_t k = 0; k < rule_.nodes.size(); ++k) {
    const double lam = rule_.nodes[k];
    const Vec lq = lam * qv;
    const Vec lp = lam * pv;
    source_.evaluate(lq, lp, xq, xp);
    const JacobianBlocks j = source_.jacobian(lq, lp);
    // d/dq_i of p·X_q(λz) - q·X_p(λz), and likewise for p_i.
    gq += rule_.weights[k] * (lam * (j.qq.transpose() * pv - j.pq.transpose() * qv) - xp);
    gp += rule_.weights[k] * (xq + lam * (j.qp.transpose() * pv - j.pp.transpose() * qv));
  }
  for (std::size_t i = 0; i < d; ++i) {
    hq[i] = gq(static_cast<Eigen::Index>(i));
    hp[i] = gp(static_cast<Eigen::Index>(i));
  }
}

Hamiltonian ReconstructedHamiltonian::as_hamiltonian() const {
  const ReconstructedHamiltonian self = *this;
  return Hamiltonian::from_callable(
      source_.dim(), [self](std::span<const double> q, std::span<const double> p) { return self(q, p); },
      [self](std::span<const double> q, std::span<const double> p, std::span<double> hq,
             std::span<double> hp) { self.gradient(q, p, hq, hp); },
      "reconstructed from " + source_.label());
}

ReconstructedHamiltonian reconstruct(const VectorField& x, const ReconstructOptions& options) {
  if (options.require_hamiltonian) {
    const HelmholtzReport r = check_conditions(x, options.check);
    if (r.verdict != Verdict::hamiltonian)
      throw NotHamiltonianError("field is not Hamiltonian (trace " + std::to_string(r.trace_violation) +
                                ", asym_qp " + std::to_string(r.asym_qp) + ", asym_pq " +
                                std::to_string(r.asym_pq) + ")");
  }
  ReconstructedHamiltonian h(x, options.nodes);
  // The λ-integral needs X on every ray from the origin to a sample point.
  const std::size_t d = x.dim();
  const QuadratureRule rule = gauss_legendre_unit(options.nodes);
  std::vector<double> lambdas{0.0, 1.0};
  lambdas.insert(lambdas.end(), rule.nodes.begin(), rule.nodes.end());
  std::vector<double> lq(d), lp(d), xq(d), xp(d);
  for (const auto& z : phase_samples(d, options.check.box, options.check.samples, options.check.seed)) {
    for (double lam : lambdas) {
      for (std::size_t i = 0; i < d; ++i) {
        lq[i] = lam * z[i];
        lp[i] = lam * z[d + i];
      }
      try {
        x.evaluate(lq, lp, xq, xp);
      } catch (const expr::EvalError& e) {
        throw DomainError(std::string("reconstruct: field is not evaluable on the segment to a sample point: ") +
                          e.what());
      }
    }
  }
  return h;
}

RoundtripResult roundtrip_residual(const VectorField& x, const ReconstructedHamiltonian& h,
                                   const PhaseBox& box, std::size_t samples, std::uint64_t seed,
                                   Execution exec) {
  const std::size_t d = x.dim();
  const auto points = phase_samples(d, box, samples, seed);
  std::vector<double> res(points.size(), 0.0);
  std::vector<std::string> errors(points.size());
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto& z = points[static_cast<std::size_t>(k)];
    const std::span<const double> q(z.data(), d), p(z.data() + d, d);
    std::vector<double> hq(d), hp(d), xq(d), xp(d);
    try {
      h.gradient(q, p, hq, hp);
      x.evaluate(q, p, xq, xp);
      double a = 0.0, b = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        a = std::max(a, std::abs(hp[i] - xq[i]));
        b = std::max(b, std::abs(hq[i] + xp[i]));
      }
      res[static_cast<std::size_t>(k)] = a + b;
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(k)] = e.what();
    }
  }
  RoundtripResult out;
  std::size_t worst = 0;
  for (std::size_t k = 0; k < res.size(); ++k) {
    if (!errors[k].empty()) throw expr::EvalError(errors[k]);
    if (res[k] > out.residual) {
      out.residual = res[k];
      worst = k;
    }
  }
  out.worst_q.assign(points[worst].begin(), points[worst].begin() + static_cast<std::ptrdiff_t>(d));
  out.worst_p.assign(points[worst].begin() + static_cast<std::ptrdiff_t>(d), points[worst].end());
  return out;
}

}  // namespace tsh
