#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsh/expr.hpp"

namespace tsh {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// The four d×d blocks of the Jacobian of X = (X_q, X_p).
struct JacobianBlocks {
  Mat qq;  // ∂X_q/∂q
  Mat qp;  // ∂X_q/∂p
  Mat pq;  // ∂X_p/∂q
  Mat pp;  // ∂X_p/∂p
};

/// Autonomous first-order field on phase space R^d × R^d.
class VectorField {
 public:
  using Callable = std::function<void(std::span<const double> q, std::span<const double> p,
                                      std::span<double> xq, std::span<double> xp)>;

  /// Component expressions X_q = (xq[0..d)), X_p = (xp[0..d)); d = xq.size().
  static VectorField from_strings(const std::vector<std::string>& xq,
                                  const std::vector<std::string>& xp);
  static VectorField from_exprs(std::vector<expr::Expr> xq, std::vector<expr::Expr> xp);
  static VectorField from_callable(std::size_t dim, Callable f, std::string label = "callable");

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] bool analytic() const { return !exprs_q_.empty(); }
  [[nodiscard]] const std::string& label() const { return label_; }

  /// Throws expr::EvalError if any component is not finite.
  void evaluate(std::span<const double> q, std::span<const double> p, std::span<double> xq,
                std::span<double> xp) const;
  void evaluate(const Vec& q, const Vec& p, Vec& xq, Vec& xp) const;

  /// Exact blocks for expression-backed fields, central differences
  /// otherwise.
  [[nodiscard]] JacobianBlocks jacobian(const Vec& q, const Vec& p) const;
  /// Central differences with step 1e-6·max(1, |z_i|), whatever the backing.
  [[nodiscard]] JacobianBlocks jacobian_fd(const Vec& q, const Vec& p) const;

  [[nodiscard]] const std::vector<expr::Expr>& exprs_q() const { return exprs_q_; }
  [[nodiscard]] const std::vector<expr::Expr>& exprs_p() const { return exprs_p_; }

 private:
  std::size_t dim_ = 0;
  std::string label_;
  Callable callable_;
  std::vector<expr::Expr> exprs_q_, exprs_p_;
  // jac_[r][c]: derivative of component r of (X_q, X_p) w.r.t. variable c of (q, p)
  std::vector<std::vector<expr::Expr>> jac_;
};

/// alpha·X + beta·Y; expression-backed when both inputs are.
VectorField linear_combination(double alpha, const VectorField& x, double beta, const VectorField& y);

/// Scalar Hamiltonian H(q, p).
class Hamiltonian {
 public:
  using Value = std::function<double(std::span<const double> q, std::span<const double> p)>;
  using Gradient = std::function<void(std::span<const double> q, std::span<const double> p,
                                      std::span<double> hq, std::span<double> hp)>;

  static Hamiltonian from_string(const std::string& source, std::size_t dim);
  static Hamiltonian from_expr(expr::Expr e, std::size_t dim);
  /// Gradient falls back to central differences when not supplied.
  static Hamiltonian from_callable(std::size_t dim, Value value,
                                   std::optional<Gradient> gradient = std::nullopt,
                                   std::string label = "callable");

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] bool analytic() const { return static_cast<bool>(expr_); }
  [[nodiscard]] const std::string& label() const { return label_; }

  [[nodiscard]] double value(std::span<const double> q, std::span<const double> p) const;
  void gradient(std::span<const double> q, std::span<const double> p, std::span<double> hq,
                std::span<double> hp) const;
  /// ∂²H/∂q_i∂p_j, row i, column j (Jacobian of ∂H/∂q w.r.t. p).
  [[nodiscard]] Mat mixed_qp(std::span<const double> q, std::span<const double> p) const;

  /// The Hamiltonian field X = (∂H/∂p, -∂H/∂q).
  [[nodiscard]] VectorField field() const;

 private:
  std::size_t dim_ = 0;
  std::string label_;
  expr::Expr expr_;
  std::vector<expr::Expr> grad_q_, grad_p_;
  std::vector<std::vector<expr::Expr>> mixed_;  // mixed_[i][j] = ∂²H/∂q_i∂p_j
  Value value_;
  std::optional<Gradient> gradient_;
};

}  // namespace tsh
