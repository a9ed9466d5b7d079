#include "shapestar/poly.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace shapestar {

Monomial Monomial::variable(int nvars, int i) {
  Monomial m(nvars);
  m[i] = 1;
  return m;
}

int Monomial::degree() const {
  return std::accumulate(exps_.begin(), exps_.end(), 0);
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (other.exps_.size() != exps_.size()) throw InvalidArgument("monomial variable count mismatch");
  Monomial out = *this;
  for (std::size_t i = 0; i < exps_.size(); ++i) out.exps_[i] = static_cast<std::uint8_t>(exps_[i] + other.exps_[i]);
  return out;
}

double Monomial::evaluate(const Eigen::VectorXd& x) const {
  double v = 1.0;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    for (int e = 0; e < exps_[i]; ++e) v *= x[static_cast<Eigen::Index>(i)];
  }
  return v;
}

bool operator<(const Monomial& a, const Monomial& b) {
  const int da = a.degree();
  const int db = b.degree();
  if (da != db) return da < db;
  // Larger exponent in the leading variable sorts first.
  return std::lexicographical_compare(b.exps_.begin(), b.exps_.end(), a.exps_.begin(), a.exps_.end());
}

std::string Monomial::to_string(int K) const {
  if (is_constant()) return "1";
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < nvars(); ++i) {
    if ((*this)[i] == 0) continue;
    if (!first) os << '*';
    first = false;
    if (i < K) {
      os << 'c' << (i + 1);
    } else {
      os << 'r' << (i - K + 1);
    }
    if ((*this)[i] > 1) os << '^' << static_cast<int>((*this)[i]);
  }
  return os.str();
}

SparsePoly SparsePoly::constant(int nvars, double value) {
  SparsePoly p(nvars);
  p.add_term(Monomial(nvars), value);
  return p;
}

SparsePoly SparsePoly::variable(int nvars, int i) {
  SparsePoly p(nvars);
  p.add_term(Monomial::variable(nvars, i), 1.0);
  return p;
}

int SparsePoly::degree() const {
  int d = 0;
  for (const auto& [m, v] : terms_) d = std::max(d, m.degree());
  return d;
}

double SparsePoly::coefficient(const Monomial& m) const {
  const auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void SparsePoly::add_term(const Monomial& m, double value) {
  if (m.nvars() != nvars_) throw InvalidArgument("polynomial variable count mismatch");
  if (value == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(m, value);
  if (!inserted) it->second += value;
  if (std::abs(it->second) < kPruneTol) terms_.erase(it);
}

double SparsePoly::evaluate(const Eigen::VectorXd& x) const {
  if (x.size() != nvars_) throw InvalidArgument("evaluate: point has wrong dimension");
  double v = 0.0;
  for (const auto& [m, coef] : terms_) v += coef * m.evaluate(x);
  return v;
}

SparsePoly& SparsePoly::operator+=(const SparsePoly& other) {
  if (nvars_ == 0 && terms_.empty()) nvars_ = other.nvars_;
  for (const auto& [m, v] : other.terms_) add_term(m, v);
  return *this;
}

SparsePoly& SparsePoly::operator-=(const SparsePoly& other) {
  if (nvars_ == 0 && terms_.empty()) nvars_ = other.nvars_;
  for (const auto& [m, v] : other.terms_) add_term(m, -v);
  return *this;
}

SparsePoly& SparsePoly::operator*=(double s) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= s;
    if (std::abs(it->second) < kPruneTol) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

SparsePoly operator*(const SparsePoly& a, const SparsePoly& b) {
  if (a.nvars_ != b.nvars_) throw InvalidArgument("polynomial variable count mismatch");
  SparsePoly out(a.nvars_);
  for (const auto& [ma, va] : a.terms_) {
    for (const auto& [mb, vb] : b.terms_) {
      auto [it, inserted] = out.terms_.try_emplace(ma * mb, va * vb);
      if (!inserted) it->second += va * vb;
    }
  }
  // Prune only after accumulation so that partial cancellations are exact.
  for (auto it = out.terms_.begin(); it != out.terms_.end();) {
    it = std::abs(it->second) < kPruneTol ? out.terms_.erase(it) : std::next(it);
  }
  return out;
}

SparsePoly poly_mul(const SparsePoly& a, const SparsePoly& b) { return a * b; }

double SparsePoly::max_abs_diff(const SparsePoly& other) const {
  double d = 0.0;
  for (const auto& [m, v] : (*this - other).terms_) d = std::max(d, std::abs(v));
  return d;
}

std::string SparsePoly::to_string(int K) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, v] : terms_) {
    if (!first) os << (v < 0 ? " - " : " + ");
    else if (v < 0) os << '-';
    first = false;
    os << std::abs(v);
    if (!m.is_constant()) os << '*' << m.to_string(K);
  }
  return os.str();
}

SparsePoly build_objective(const CenteredProblem& prob) {
  const int K = prob.K();
  const int nvars = K + 9;
  const int N = prob.N();
  // Row (2i + a) holds the coefficients of the (c_k r_l) bilinear terms of
  // the a-th image coordinate of landmark i.
  const int npairs = 9 * K;
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(2 * N, npairs);
  Eigen::VectorXd target(2 * N);
  for (int i = 0; i < N; ++i) {
    for (int a = 0; a < 2; ++a) {
      target[2 * i + a] = prob.z_tilde(a, i);
      for (int k = 0; k < K; ++k) {
        for (int col = 0; col < 3; ++col) {
          design(2 * i + a, 9 * k + 3 * col + a) = prob.b_tilde[k](col, i);
        }
      }
    }
  }
  const Eigen::MatrixXd gram = design.transpose() * design;
  const Eigen::VectorXd lin = -2.0 * design.transpose() * target;

  auto pair_monomial = [&](int p) {
    Monomial m(nvars);
    m[c_var(p / 9)] += 1;
    m[r_var(K, p % 9)] += 1;
    return m;
  };

  SparsePoly f(nvars);
  f.add_term(Monomial(nvars), target.squaredNorm());
  for (int k = 0; k < K; ++k) f.add_term(Monomial::variable(nvars, c_var(k)), prob.alpha);
  for (int p = 0; p < npairs; ++p) {
    const Monomial mp = pair_monomial(p);
    f.add_term(mp, lin[p]);
    for (int q = p; q < npairs; ++q) {
      const double v = (p == q ? 1.0 : 2.0) * gram(p, q);
      if (v != 0.0) f.add_term(mp * pair_monomial(q), v);
    }
  }
  return f;
}

std::vector<SparsePoly> so3_constraints(int K, So3ConstraintSet set) {
  const int nvars = K + 9;
  // r_{col,row}: entry (row, col) of R.
  auto r = [&](int col, int row) { return SparsePoly::variable(nvars, r_var(K, 3 * col + row)); };
  const SparsePoly one = SparsePoly::constant(nvars, 1.0);

  auto dot = [&](int a, int b) {
    SparsePoly s(nvars);
    for (int row = 0; row < 3; ++row) s += r(a, row) * r(b, row);
    return s;
  };
  // Component `row` of (column a) x (column b).
  auto cross = [&](int a, int b, int row) {
    const int i1 = (row + 1) % 3;
    const int i2 = (row + 2) % 3;
    return r(a, i1) * r(b, i2) - r(a, i2) * r(b, i1);
  };

  std::vector<SparsePoly> h;
  for (int col = 0; col < 3; ++col) h.push_back(one - dot(col, col));
  if (set == So3ConstraintSet::All15) {
    h.push_back(dot(0, 1));
    h.push_back(dot(1, 2));
    h.push_back(dot(2, 0));
  }
  const int triplets[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  for (const auto& t : triplets) {
    for (int row = 0; row < 3; ++row) h.push_back(cross(t[0], t[1], row) - r(t[2], row));
  }
  return h;
}

std::vector<SparsePoly> so3_row_quadrics(int K) {
  const int nvars = K + 9;
  auto r = [&](int col, int row) { return SparsePoly::variable(nvars, r_var(K, 3 * col + row)); };
  auto row_dot = [&](int a, int b) {
    SparsePoly s(nvars);
    for (int col = 0; col < 3; ++col) s += r(col, a) * r(col, b);
    return s;
  };
  std::vector<SparsePoly> q;
  for (int a = 0; a < 3; ++a) q.push_back(SparsePoly::constant(nvars, 1.0) - row_dot(a, a));
  q.push_back(row_dot(0, 1));
  q.push_back(row_dot(1, 2));
  q.push_back(row_dot(2, 0));
  return q;
}

std::vector<SparsePoly> bound_constraints(int K) {
  if (K < 1) throw InvalidArgument("bound_constraints: K must be >= 1");
  const int nvars = K + 9;
  std::vector<SparsePoly> g;
  for (int k = 0; k < K; ++k) g.push_back(SparsePoly::variable(nvars, c_var(k)));
  for (int k = 0; k < K; ++k) {
    const SparsePoly c = SparsePoly::variable(nvars, c_var(k));
    g.push_back(SparsePoly::constant(nvars, 1.0) - c * c);
  }
  return g;
}

PolyProgram build_program(const CenteredProblem& prob, So3ConstraintSet set) {
  PolyProgram prog;
  prog.K = prob.K();
  prog.nvars = prog.K + 9;
  prog.objective = build_objective(prob);
  prog.equalities = so3_constraints(prog.K, set);
  prog.redundant_equalities = so3_row_quadrics(prog.K);
  prog.inequalities = bound_constraints(prog.K);
  return prog;
}

SparsePoly archimedean_residual(int K, const std::vector<SparsePoly>& h,
                                const std::vector<SparsePoly>& g) {
  const int nvars = K + 9;
  SparsePoly lhs = SparsePoly::constant(nvars, K + 3.0);
  for (int i = 0; i < nvars; ++i) {
    const SparsePoly xi = SparsePoly::variable(nvars, i);
    lhs -= xi * xi;
  }
  SparsePoly rhs(nvars);
  for (int k = 0; k < K; ++k) rhs += g.at(static_cast<std::size_t>(K + k));
  for (int i = 0; i < 3; ++i) rhs += h.at(static_cast<std::size_t>(i));
  return lhs - rhs;
}

bool check_archimedean_identity(int K) {
  if (K < 1) throw InvalidArgument("check_archimedean_identity: K must be >= 1");
  return archimedean_residual(K, so3_constraints(K), bound_constraints(K)).empty();
}

MonomialFamily classify_monomial(const Monomial& m, int K) {
  int cdeg = 0;
  int rdeg = 0;
  for (int i = 0; i < m.nvars(); ++i) (i < K ? cdeg : rdeg) += m[i];
  if (cdeg == 0 && rdeg == 0) return MonomialFamily::Constant;
  if (cdeg == 1 && rdeg == 0) return MonomialFamily::C;
  if (cdeg == 1 && rdeg == 1) return MonomialFamily::CR;
  if (cdeg == 2 && rdeg == 2) return MonomialFamily::CCRR;
  return MonomialFamily::Other;
}

SupportReport objective_support(const SparsePoly& f, int K) {
  SupportReport report;
  for (const auto& [m, v] : f.terms()) {
    const auto family = classify_monomial(m, K);
    report.family_counts[family] += 1;
    if (family == MonomialFamily::Other) report.out_of_family.push_back(m);
  }
  return report;
}

}  // namespace shapestar
