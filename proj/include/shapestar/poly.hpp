#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shapestar/preprocess.hpp"

namespace shapestar {

/// Exponent vector over x = (c_1..c_K, r_1..r_9), r = vec(R) column-major.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(int nvars) : exps_(static_cast<std::size_t>(nvars), 0) {}
  explicit Monomial(std::vector<std::uint8_t> exps) : exps_(std::move(exps)) {}

  /// x_i
  static Monomial variable(int nvars, int i);

  int nvars() const { return static_cast<int>(exps_.size()); }
  int degree() const;
  std::uint8_t operator[](int i) const { return exps_[static_cast<std::size_t>(i)]; }
  std::uint8_t& operator[](int i) { return exps_[static_cast<std::size_t>(i)]; }
  const std::vector<std::uint8_t>& exponents() const { return exps_; }
  bool is_constant() const { return degree() == 0; }

  Monomial operator*(const Monomial& other) const;
  double evaluate(const Eigen::VectorXd& x) const;

  /// Graded order; equal degrees are ordered lexicographically with the
  /// first variable leading (c_1 before c_2 before ... before r_9).
  friend bool operator<(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps_ == b.exps_; }

  /// Human-readable form using K to name c/r variables, e.g. "c1^2*r7".
  std::string to_string(int K) const;

 private:
  std::vector<std::uint8_t> exps_;
};

/// Coefficients below this (absolute) are dropped.
inline constexpr double kPruneTol = 1e-14;

class SparsePoly {
 public:
  using Terms = std::map<Monomial, double>;

  SparsePoly() = default;
  explicit SparsePoly(int nvars) : nvars_(nvars) {}
  static SparsePoly constant(int nvars, double value);
  static SparsePoly variable(int nvars, int i);

  int nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  int degree() const;
  double coefficient(const Monomial& m) const;

  /// Adds `value` to the coefficient of `m`, pruning the entry if it cancels.
  void add_term(const Monomial& m, double value);

  double evaluate(const Eigen::VectorXd& x) const;

  SparsePoly& operator+=(const SparsePoly& other);
  SparsePoly& operator-=(const SparsePoly& other);
  SparsePoly& operator*=(double s);
  friend SparsePoly operator+(SparsePoly a, const SparsePoly& b) { return a += b; }
  friend SparsePoly operator-(SparsePoly a, const SparsePoly& b) { return a -= b; }
  friend SparsePoly operator*(SparsePoly a, double s) { return a *= s; }
  friend SparsePoly operator*(double s, SparsePoly a) { return a *= s; }
  friend SparsePoly operator*(const SparsePoly& a, const SparsePoly& b);
  friend bool operator==(const SparsePoly& a, const SparsePoly& b) { return a.terms_ == b.terms_; }

  /// Largest absolute coefficient difference against `other`.
  double max_abs_diff(const SparsePoly& other) const;

  std::string to_string(int K) const;

 private:
  int nvars_ = 0;
  Terms terms_;
};

SparsePoly poly_mul(const SparsePoly& a, const SparsePoly& b);

/// Variable index helpers for x = (c, r).
inline int c_var(int k) { return k; }
inline int r_var(int K, int j) { return K + j; }

/// Polynomial program: minimize objective s.t. equalities == 0, inequalities >= 0.
struct PolyProgram {
  int K = 0;
  int nvars = 0;
  SparsePoly objective;
  std::vector<SparsePoly> equalities;
  std::vector<SparsePoly> inequalities;
  /// Further polynomials vanishing on the feasible set (consequences of the
  /// equalities). They add no constraint; the relaxation only uses them to
  /// drop redundant Gram monomials.
  std::vector<SparsePoly> redundant_equalities;
};

enum class So3ConstraintSet {
  All15,    ///< h1..h15
  Subset12  ///< h1..h3 and h7..h15
};

SparsePoly build_objective(const CenteredProblem& prob);

/// Quadratic equalities describing SO(3) over vec(R) (column-major).
std::vector<SparsePoly> so3_constraints(int K, So3ConstraintSet set = So3ConstraintSet::All15);

/// Rows of R orthonormal (R R^T = I); implied by so3_constraints.
std::vector<SparsePoly> so3_row_quadrics(int K);

/// g_k = c_k, g_{K+k} = 1 - c_k^2.
std::vector<SparsePoly> bound_constraints(int K);

PolyProgram build_program(const CenteredProblem& prob,
                          So3ConstraintSet set = So3ConstraintSet::All15);

/// Residual of (K+3 - |x|^2) - (sum_k g_{K+k} + h1 + h2 + h3).
SparsePoly archimedean_residual(int K, const std::vector<SparsePoly>& h,
                                const std::vector<SparsePoly>& g);

/// Exact check that K+3 - |x|^2 lies in the degree-2 ideal + quadratic module.
bool check_archimedean_identity(int K);

enum class MonomialFamily { Constant, C, CR, CCRR, Other };

struct SupportReport {
  std::map<MonomialFamily, int> family_counts;
  std::vector<Monomial> out_of_family;
  bool clean() const { return out_of_family.empty(); }
};

MonomialFamily classify_monomial(const Monomial& m, int K);

/// Classifies monomials of f into {1, c_k, c_k r_j, c_k1 c_k2 r_j1 r_j2}.
SupportReport objective_support(const SparsePoly& f, int K);

}  // namespace shapestar
