#include "tsh/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsh {

namespace {

void validate_usage(const expr::Expr& e, std::size_t dim) {
  const expr::Usage u = expr::usage(e);
  if (u.max_q > dim || u.max_p > dim)
    throw std::invalid_argument("expression '" + expr::to_string(e) + "' uses variables beyond dimension " +
                                std::to_string(dim));
  if (u.uses_t)
    throw std::invalid_argument("expression '" + expr::to_string(e) +
                                "' depends on t; fields and Hamiltonians must be autonomous");
}

double fd_step(double z) { return 1e-6 * std::max(1.0, std::abs(z)); }

}  // namespace

VectorField VectorField::from_strings(const std::vector<std::string>& xq,
                                      const std::vector<std::string>& xp) {
  if (xq.size() != xp.size() || xq.empty())
    throw std::invalid_argument("vector field needs d >= 1 expressions for both X_q and X_p");
  const std::size_t d = xq.size();
  std::vector<expr::Expr> eq, ep;
  for (const auto& s : xq) eq.push_back(expr::parse(s, d));
  for (const auto& s : xp) ep.push_back(expr::parse(s, d));
  return from_exprs(std::move(eq), std::move(ep));
}

VectorField VectorField::from_exprs(std::vector<expr::Expr> xq, std::vector<expr::Expr> xp) {
  if (xq.size() != xp.size() || xq.empty())
    throw std::invalid_argument("vector field needs d >= 1 expressions for both X_q and X_p");
  VectorField f;
  f.dim_ = xq.size();
  for (const auto& e : xq) validate_usage(e, f.dim_);
  for (const auto& e : xp) validate_usage(e, f.dim_);
  f.label_ = "X_q = (";
  for (std::size_t i = 0; i < f.dim_; ++i) f.label_ += (i ? ", " : "") + expr::to_string(xq[i]);
  f.label_ += "), X_p = (";
  for (std::size_t i = 0; i < f.dim_; ++i) f.label_ += (i ? ", " : "") + expr::to_string(xp[i]);
  f.label_ += ")";
  f.exprs_q_ = std::move(xq);
  f.exprs_p_ = std::move(xp);
  const std::size_t d = f.dim_;
  f.jac_.assign(2 * d, std::vector<expr::Expr>(2 * d));
  for (std::size_t r = 0; r < 2 * d; ++r) {
    const expr::Expr& comp = r < d ? f.exprs_q_[r] : f.exprs_p_[r - d];
    for (std::size_t c = 0; c < 2 * d; ++c)
      f.jac_[r][c] = c < d ? expr::differentiate(comp, expr::Op::var_q, c)
                           : expr::differentiate(comp, expr::Op::var_p, c - d);
  }
  return f;
}

VectorField VectorField::from_callable(std::size_t dim, Callable fn, std::string label) {
  if (dim == 0) throw std::invalid_argument("vector field dimension must be >= 1");
  VectorField f;
  f.dim_ = dim;
  f.callable_ = std::move(fn);
  f.label_ = std::move(label);
  return f;
}

void VectorField::evaluate(std::span<const double> q, std::span<const double> p,
                           std::span<double> xq, std::span<double> xp) const {
  if (analytic()) {
    const expr::Point at{q, p, 0.0};
    for (std::size_t i = 0; i < dim_; ++i) {
      xq[i] = expr::evaluate_finite(exprs_q_[i], at);
      xp[i] = expr::evaluate_finite(exprs_p_[i], at);
    }
    return;
  }
  callable_(q, p, xq, xp);
  for (std::size_t i = 0; i < dim_; ++i)
    if (!std::isfinite(xq[i]) || !std::isfinite(xp[i]))
      throw expr::EvalError("vector field '" + label_ + "' is not finite here");
}

void VectorField::evaluate(const Vec& q, const Vec& p, Vec& xq, Vec& xp) const {
  xq.resize(static_cast<Eigen::Index>(dim_));
  xp.resize(static_cast<Eigen::Index>(dim_));
  evaluate(std::span<const double>(q.data(), dim_), std::span<const double>(p.data(), dim_),
           std::span<double>(xq.data(), dim_), std::span<double>(xp.data(), dim_));
}

JacobianBlocks VectorField::jacobian(const Vec& q, const Vec& p) const {
  if (!analytic()) return jacobian_fd(q, p);
  const auto d = static_cast<Eigen::Index>(dim_);
  JacobianBlocks j{Mat(d, d), Mat(d, d), Mat(d, d), Mat(d, d)};
  const expr::Point at{std::span<const double>(q.data(), dim_),
                       std::span<const double>(p.data(), dim_), 0.0};
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      const auto ur = static_cast<std::size_t>(r);
      const auto uc = static_cast<std::size_t>(c);
      j.qq(r, c) = expr::evaluate_finite(jac_[ur][uc], at);
      j.qp(r, c) = expr::evaluate_finite(jac_[ur][uc + dim_], at);
      j.pq(r, c) = expr::evaluate_finite(jac_[ur + dim_][uc], at);
      j.pp(r, c) = expr::evaluate_finite(jac_[ur + dim_][uc + dim_], at);
    }
  }
  return j;
}

JacobianBlocks VectorField::jacobian_fd(const Vec& q, const Vec& p) const {
  const auto d = static_cast<Eigen::Index>(dim_);
  JacobianBlocks j{Mat(d, d), Mat(d, d), Mat(d, d), Mat(d, d)};
  Vec xq_plus, xp_plus, xq_minus, xp_minus;
  for (Eigen::Index c = 0; c < 2 * d; ++c) {
    Vec qq = q, pp = p;
    double& z = c < d ? qq(c) : pp(c - d);
    const double z0 = z;
    const double h = fd_step(z0);
    z = z0 + h;
    evaluate(qq, pp, xq_plus, xp_plus);
    z = z0 - h;
    evaluate(qq, pp, xq_minus, xp_minus);
    const Vec dq = (xq_plus - xq_minus) / (2.0 * h);
    const Vec dp = (xp_plus - xp_minus) / (2.0 * h);
    if (c < d) {
      j.qq.col(c) = dq;
      j.pq.col(c) = dp;
    } else {
      j.qp.col(c - d) = dq;
      j.pp.col(c - d) = dp;
    }
  }
  return j;
}

VectorField linear_combination(double alpha, const VectorField& x, double beta, const VectorField& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("linear_combination: dimension mismatch");
  if (x.analytic() && y.analytic()) {
    std::vector<expr::Expr> q, p;
    for (std::size_t i = 0; i < x.dim(); ++i) {
      q.push_back(expr::add(expr::mul(expr::constant(alpha), x.exprs_q()[i]),
                            expr::mul(expr::constant(beta), y.exprs_q()[i])));
      p.push_back(expr::add(expr::mul(expr::constant(alpha), x.exprs_p()[i]),
                            expr::mul(expr::constant(beta), y.exprs_p()[i])));
    }
    return VectorField::from_exprs(std::move(q), std::move(p));
  }
  const std::size_t d = x.dim();
  return VectorField::from_callable(
      d,
      [=](std::span<const double> q, std::span<const double> p, std::span<double> xq,
          std::span<double> xp) {
        std::vector<double> aq(d), ap(d), bq(d), bp(d);
        x.evaluate(q, p, aq, ap);
        y.evaluate(q, p, bq, bp);
        for (std::size_t i = 0; i < d; ++i) {
          xq[i] = alpha * aq[i] + beta * bq[i];
          xp[i] = alpha * ap[i] + beta * bp[i];
        }
      },
      "linear combination");
}

Hamiltonian Hamiltonian::from_string(const std::string& source, std::size_t dim) {
  return from_expr(expr::parse(source, dim), dim);
}

Hamiltonian Hamiltonian::from_expr(expr::Expr e, std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("Hamiltonian dimension must be >= 1");
  validate_usage(e, dim);
  Hamiltonian h;
  h.dim_ = dim;
  h.label_ = expr::to_string(e);
  for (std::size_t i = 0; i < dim; ++i) {
    h.grad_q_.push_back(expr::differentiate(e, expr::Op::var_q, i));
    h.grad_p_.push_back(expr::differentiate(e, expr::Op::var_p, i));
  }
  h.mixed_.assign(dim, std::vector<expr::Expr>(dim));
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      h.mixed_[i][j] = expr::differentiate(h.grad_q_[i], expr::Op::var_p, j);
  h.expr_ = std::move(e);
  return h;
}

Hamiltonian Hamiltonian::from_callable(std::size_t dim, Value value, std::optional<Gradient> gradient,
                                       std::string label) {
  if (dim == 0) throw std::invalid_argument("Hamiltonian dimension must be >= 1");
  Hamiltonian h;
  h.dim_ = dim;
  h.value_ = std::move(value);
  h.gradient_ = std::move(gradient);
  h.label_ = std::move(label);
  return h;
}

double Hamiltonian::value(std::span<const double> q, std::span<const double> p) const {
  if (expr_) return expr::evaluate_finite(expr_, {q, p, 0.0});
  const double v = value_(q, p);
  if (!std::isfinite(v)) throw expr::EvalError("Hamiltonian '" + label_ + "' is not finite here");
  return v;
}

void Hamiltonian::gradient(std::span<const double> q, std::span<const double> p, std::span<double> hq,
                           std::span<double> hp) const {
  if (expr_) {
    const expr::Point at{q, p, 0.0};
    for (std::size_t i = 0; i < dim_; ++i) {
      hq[i] = expr::evaluate_finite(grad_q_[i], at);
      hp[i] = expr::evaluate_finite(grad_p_[i], at);
    }
    return;
  }
  if (gradient_) {
    (*gradient_)(q, p, hq, hp);
    return;
  }
  std::vector<double> qq(q.begin(), q.end()), pp(p.begin(), p.end());
  for (std::size_t i = 0; i < 2 * dim_; ++i) {
    double& z = i < dim_ ? qq[i] : pp[i - dim_];
    const double z0 = z;
    const double h = fd_step(z0);
    z = z0 + h;
    const double up = value(qq, pp);
    z = z0 - h;
    const double down = value(qq, pp);
    z = z0;
    (i < dim_ ? hq[i] : hp[i - dim_]) = (up - down) / (2.0 * h);
  }
}

Mat Hamiltonian::mixed_qp(std::span<const double> q, std::span<const double> p) const {
  const auto d = static_cast<Eigen::Index>(dim_);
  Mat m(d, d);
  if (expr_) {
    const expr::Point at{q, p, 0.0};
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            expr::evaluate_finite(mixed_[i][j], at);
    return m;
  }
  std::vector<double> pp(p.begin(), p.end());
  if (!gradient_) {
    // Nested differences of a differenced gradient lose ~8 digits; a single
    // four-point stencil on H with a wider step loses ~4.
    std::vector<double> qq(q.begin(), q.end());
    auto hv = [&](std::size_t i, double si, double hi, std::size_t j, double sj, double hj) {
      const double qi = qq[i], pj = pp[j];
      qq[i] = qi + si * hi;
      pp[j] = pj + sj * hj;
      const double v = value(qq, pp);
      qq[i] = qi;
      pp[j] = pj;
      return v;
    };
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j < dim_; ++j) {
        const double hi = 1e-4 * std::max(1.0, std::abs(qq[i]));
        const double hj = 1e-4 * std::max(1.0, std::abs(pp[j]));
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            (hv(i, 1, hi, j, 1, hj) - hv(i, 1, hi, j, -1, hj) - hv(i, -1, hi, j, 1, hj) + hv(i, -1, hi, j, -1, hj)) /
            (4.0 * hi * hj);
      }
    }
    return m;
  }
  std::vector<double> hq_up(dim_), hq_down(dim_), hp(dim_);
  for (std::size_t j = 0; j < dim_; ++j) {
    const double z0 = pp[j];
    const double h = fd_step(z0);
    pp[j] = z0 + h;
    gradient(q, pp, hq_up, hp);
    pp[j] = z0 - h;
    gradient(q, pp, hq_down, hp);
    pp[j] = z0;
    for (std::size_t i = 0; i < dim_; ++i)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (hq_up[i] - hq_down[i]) / (2.0 * h);
  }
  return m;
}

VectorField Hamiltonian::field() const {
  if (expr_) {
    std::vector<expr::Expr> q, p;
    for (std::size_t i = 0; i < dim_; ++i) {
      q.push_back(grad_p_[i]);
      p.push_back(expr::neg(grad_q_[i]));
    }
    return VectorField::from_exprs(std::move(q), std::move(p));
  }
  const Hamiltonian self = *this;
  const std::size_t d = dim_;
  return VectorField::from_callable(
      d,
      [self, d](std::span<const double> q, std::span<const double> p, std::span<double> xq,
                std::span<double> xp) {
        std::vector<double> hq(d);
        self.gradient(q, p, hq, xq);
        for (std::size_t i = 0; i < d; ++i) xp[i] = -hq[i];
      },
      "field of " + label_);
}

}  // namespace tsh
