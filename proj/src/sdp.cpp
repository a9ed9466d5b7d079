#include "shapestar/sdp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SparseCore>
#include <Eigen/Eigenvalues>

namespace shapestar {

namespace {

using Blocks = std::vector<Eigen::MatrixXd>;

struct Entry {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Entries of one constraint restricted to one block.
struct BlockPart {
  int constraint = 0;
  std::vector<Entry> entries;
};

double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].cwiseProduct(b[i]).sum();
  return s;
}

double frob_sq(const Blocks& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return s;
}

/// Largest step a such that X + a dX stays PSD (infinity if unbounded).
double max_step(const Eigen::MatrixXd& X, const Eigen::MatrixXd& dX) {
  Eigen::LLT<Eigen::MatrixXd> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  Eigen::MatrixXd W = llt.matrixL().solve(dX);
  W = llt.matrixL().solve(W.transpose()).transpose();
  W = 0.5 * (W + W.transpose());
  const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(W, Eigen::EigenvaluesOnly).eigenvalues()[0];
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

/// Greedy pivoted Cholesky; returns (sorted) indices of a maximal well
/// conditioned principal submatrix of the PSD matrix G.
std::vector<int> pivoted_support(const Eigen::MatrixXd& G, double rel_tol) {
  const auto n = G.rows();
  std::vector<int> kept;
  if (n == 0) return kept;
  Eigen::VectorXd diag = G.diagonal();
  const double cut = rel_tol * std::max(diag.maxCoeff(), 1e-300);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = -1;
    double best = cut;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!used[static_cast<std::size_t>(j)] && diag[j] > best) {
        best = diag[j];
        piv = j;
      }
    }
    if (piv < 0) break;
    used[static_cast<std::size_t>(piv)] = true;
    const double lpp = std::sqrt(diag[piv]);
    L.col(col) = (G.col(piv) - L.leftCols(col) * L.row(piv).head(col).transpose()) / lpp;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (used[static_cast<std::size_t>(j)]) {
        L(j, col) = j == piv ? lpp : 0.0;
      } else {
        diag[j] -= L(j, col) * L(j, col);
      }
    }
    kept.push_back(static_cast<int>(piv));
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

class InteriorPoint {
 public:
  InteriorPoint(const SdpProblem& problem, const SdpSettings& settings)
      : problem_(problem), settings_(settings) {}

  SdpSolution run();

 private:
  bool prepare();
  void apply_A(const Blocks& W, Eigen::VectorXd& out) const;
  void apply_At(const Eigen::VectorXd& y, Blocks& out) const;
  bool factor();
  void factor_gram();
  Eigen::MatrixXd reduce(const Eigen::MatrixXd& M) const;
  void repair_primal(Blocks& dX, Eigen::VectorXd& du) const;
  void direction(const Blocks& Rc, Blocks& dX, Eigen::VectorXd& dy, Eigen::VectorXd& du,
                 Blocks& dZ) const;
  void solve_kkt(const Eigen::VectorXd& h, const Eigen::VectorXd& g, Eigen::VectorXd& dy,
                 Eigen::VectorXd& du) const;
  Eigen::VectorXd particular_dual(const Eigen::VectorXd& g) const;
  Eigen::VectorXd null_apply(const Eigen::VectorXd& eta) const;
  Eigen::VectorXd null_apply_t(const Eigen::VectorXd& v) const;
  double step_length(const Blocks& V, const Blocks& dV) const;
  void finish(SdpSolution& sol) const;

  const SdpProblem& problem_;
  const SdpSettings& settings_;

  // Reduced problem data.
  std::vector<int> rows_;         // kept constraint indices
  std::vector<int> free_cols_;    // kept free-variable indices
  std::vector<int> sizes_;
  std::vector<std::vector<BlockPart>> parts_;  // per block
  Eigen::MatrixXd B_;
  Eigen::VectorXd b_;
  Eigen::VectorXd d_;
  double bscale_ = 1.0;
  int ntot_ = 0;

  // Iterate.
  Blocks X_, Z_;
  Eigen::VectorXd y_, u_;

  // Per-iteration quantities.
  Blocks Zinv_, Rd_;
  Eigen::VectorXd rp_, rf_;
  // Null-space basis of B^T from a pivoted LU: with B1 = B(rows1, :) square
  // and nonsingular, N(rows2, :) = I and N(rows1, :) = -W, W = B1^{-T} B2^T.
  std::vector<int> rows1_, rows2_;
  Eigen::SparseMatrix<double> W_;
  Eigen::PartialPivLU<Eigen::MatrixXd> b1_lu_, b1t_lu_;

  Eigen::MatrixXd M_;
  Eigen::LLT<Eigen::MatrixXd> schur_;  // of N^T M N
  // N^T (A A^*) N, used for a least-norm repair of primal feasibility.
  Eigen::LLT<Eigen::MatrixXd> gram_;
  bool has_gram_ = false;

  bool structurally_infeasible_ = false;
};

bool InteriorPoint::prepare() {
  const int m_all = problem_.num_constraints();
  for (int i = 0; i < m_all; ++i) {
    const auto& con = problem_.constraints[static_cast<std::size_t>(i)];
    const bool empty = std::none_of(con.block_entries.begin(), con.block_entries.end(),
                                    [](const BlockEntry& e) { return e.value != 0.0; }) &&
                       std::none_of(con.free_entries.begin(), con.free_entries.end(),
                                    [](const FreeEntry& e) { return e.value != 0.0; });
    if (empty) {
      if (con.rhs != 0.0) structurally_infeasible_ = true;
      continue;
    }
    rows_.push_back(i);
  }
  if (structurally_infeasible_) return false;
  if (problem_.psd_blocks.empty()) throw InvalidArgument("sdp solve: problem has no PSD block");

  const auto m = static_cast<Eigen::Index>(rows_.size());
  const int nb = static_cast<int>(problem_.psd_blocks.size());
  sizes_.resize(static_cast<std::size_t>(nb));
  for (int b = 0; b < nb; ++b) {
    sizes_[static_cast<std::size_t>(b)] = problem_.psd_blocks[static_cast<std::size_t>(b)].size;
    ntot_ += sizes_[static_cast<std::size_t>(b)];
  }
  parts_.assign(static_cast<std::size_t>(nb), {});
  b_.resize(m);
  Eigen::MatrixXd B_all = Eigen::MatrixXd::Zero(m, problem_.num_free);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& con = problem_.constraints[static_cast<std::size_t>(rows_[static_cast<std::size_t>(r)])];
    b_[r] = con.rhs;
    std::vector<BlockPart*> current(static_cast<std::size_t>(nb), nullptr);
    for (const auto& e : con.block_entries) {
      if (e.value == 0.0) continue;
      if (e.block < 0 || e.block >= nb || e.row < 0 || e.col < e.row ||
          e.col >= sizes_[static_cast<std::size_t>(e.block)]) {
        throw InvalidArgument("sdp solve: malformed block entry");
      }
      auto& slot = current[static_cast<std::size_t>(e.block)];
      if (slot == nullptr) {
        parts_[static_cast<std::size_t>(e.block)].push_back({static_cast<int>(r), {}});
        slot = &parts_[static_cast<std::size_t>(e.block)].back();
      }
      slot->entries.push_back({e.row, e.col, e.value});
    }
    for (const auto& e : con.free_entries) {
      if (e.index < 0 || e.index >= problem_.num_free) throw InvalidArgument("sdp solve: malformed free entry");
      B_all(r, e.index) += e.value;
    }
  }

  // Free variables are eliminated through the null space of B^T, which keeps
  // the reduced Schur system well conditioned near the optimum.
  Eigen::FullPivLU<Eigen::MatrixXd> lu(B_all);
  lu.setThreshold(1e-9);
  const auto rank = lu.rank();
  const Eigen::PermutationMatrix<Eigen::Dynamic> pinv(lu.permutationP().inverse());
  free_cols_.clear();
  rows1_.clear();
  rows2_.clear();
  std::vector<bool> pivot_row(static_cast<std::size_t>(m), false);
  for (Eigen::Index j = 0; j < rank; ++j) {
    free_cols_.push_back(lu.permutationQ().indices()[j]);
    rows1_.push_back(pinv.indices()[j]);
    pivot_row[static_cast<std::size_t>(rows1_.back())] = true;
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!pivot_row[static_cast<std::size_t>(i)]) rows2_.push_back(static_cast<int>(i));
  }
  B_.resize(m, rank);
  d_.resize(rank);
  for (std::size_t j = 0; j < free_cols_.size(); ++j) {
    B_.col(static_cast<Eigen::Index>(j)) = B_all.col(free_cols_[j]);
    d_[static_cast<Eigen::Index>(j)] =
        problem_.free_objective.size() == problem_.num_free ? -problem_.free_objective[free_cols_[j]] : 0.0;
  }
  if (rank > 0) {
    const Eigen::MatrixXd B1 = B_(rows1_, Eigen::all);
    b1_lu_.compute(B1);
    b1t_lu_.compute(B1.transpose());
    const Eigen::MatrixXd W = b1t_lu_.solve(Eigen::MatrixXd(B_(rows2_, Eigen::all).transpose()));
    W_ = W.sparseView(1.0, 1e-14);
  }
  bscale_ = std::max(1.0, b_.cwiseAbs().maxCoeff());
  b_ /= bscale_;

  X_.clear();
  Z_.clear();
  for (int n : sizes_) {
    const double start = std::max(10.0, std::sqrt(static_cast<double>(n)));
    X_.push_back(start * Eigen::MatrixXd::Identity(n, n));
    Z_.push_back(start * Eigen::MatrixXd::Identity(n, n));
  }
  factor_gram();
  y_ = particular_dual(d_);
  u_ = Eigen::VectorXd::Zero(B_.cols());
  return true;
}

void InteriorPoint::apply_A(const Blocks& W, Eigen::VectorXd& out) const {
  out.setZero(static_cast<Eigen::Index>(rows_.size()));
  for (std::size_t b = 0; b < parts_.size(); ++b) {
    const auto& Wb = W[b];
    for (const auto& part : parts_[b]) {
      double s = 0.0;
      for (const auto& e : part.entries) {
        s += e.row == e.col ? e.value * Wb(e.row, e.row) : 0.5 * e.value * (Wb(e.row, e.col) + Wb(e.col, e.row));
      }
      out[part.constraint] += s;
    }
  }
}

void InteriorPoint::apply_At(const Eigen::VectorXd& y, Blocks& out) const {
  out.resize(parts_.size());
  for (std::size_t b = 0; b < parts_.size(); ++b) {
    out[b].setZero(sizes_[b], sizes_[b]);
    for (const auto& part : parts_[b]) {
      const double yi = y[part.constraint];
      for (const auto& e : part.entries) {
        if (e.row == e.col) {
          out[b](e.row, e.row) += yi * e.value;
        } else {
          out[b](e.row, e.col) += 0.5 * yi * e.value;
          out[b](e.col, e.row) += 0.5 * yi * e.value;
        }
      }
    }
  }
}

Eigen::MatrixXd InteriorPoint::reduce(const Eigen::MatrixXd& M) const {
  Eigen::MatrixXd MN = M(Eigen::all, rows2_);
  MN.noalias() -= M(Eigen::all, rows1_) * W_;
  Eigen::MatrixXd R = MN(rows2_, Eigen::all);
  R.noalias() -= W_.transpose() * MN(rows1_, Eigen::all);
  return 0.5 * (R + R.transpose());
}

void InteriorPoint::factor_gram() {
  const auto m = static_cast<Eigen::Index>(rows_.size());
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t b = 0; b < parts_.size(); ++b) {
    std::map<std::pair<int, int>, std::vector<std::pair<int, double>>> users;
    for (const auto& part : parts_[b]) {
      for (const auto& e : part.entries) users[{e.row, e.col}].push_back({part.constraint, e.value});
    }
    for (const auto& [key, list] : users) {
      // Off-diagonal coefficients stand for two symmetric entries of half size.
      const double w = key.first == key.second ? 1.0 : 0.5;
      for (const auto& [i, vi] : list) {
        for (const auto& [j, vj] : list) G(i, j) += w * vi * vj;
      }
    }
  }
  Eigen::MatrixXd GR = B_.cols() > 0 ? reduce(G) : G;
  if (B_.cols() > 0) {
    // Directions of the null-space coordinates that A^* annihilates belong to
    // redundant equalities; keeping them would make every Schur matrix singular.
    const std::vector<int> keep = pivoted_support(GR, 1e-10);
    if (static_cast<Eigen::Index>(keep.size()) < GR.rows()) {
      std::vector<int> rows2;
      for (int k : keep) rows2.push_back(rows2_[static_cast<std::size_t>(k)]);
      rows2_ = std::move(rows2);
      Eigen::SparseMatrix<double> W(W_.rows(), static_cast<Eigen::Index>(keep.size()));
      std::vector<Eigen::Triplet<double>> trips;
      for (std::size_t j = 0; j < keep.size(); ++j) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(W_, keep[j]); it; ++it) {
          trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(j), it.value());
        }
      }
      W.setFromTriplets(trips.begin(), trips.end());
      W_ = std::move(W);
      GR = Eigen::MatrixXd(GR(keep, keep));
    }
  }
  gram_.compute(GR);
  has_gram_ = gram_.info() == Eigen::Success;
}

void InteriorPoint::repair_primal(Blocks& dX, Eigen::VectorXd& du) const {
  if (!has_gram_) return;
  Eigen::VectorXd AdX;
  apply_A(dX, AdX);
  Eigen::VectorXd e = rp_ - AdX - B_ * du;
  Eigen::VectorXd t = B_.cols() > 0 ? null_apply(gram_.solve(null_apply_t(e))) : gram_.solve(e);
  Blocks corr;
  apply_At(t, corr);
  for (std::size_t b = 0; b < dX.size(); ++b) dX[b] += corr[b];
  if (B_.cols() > 0) {
    apply_A(dX, AdX);
    e = rp_ - AdX - B_ * du;
    du += b1_lu_.solve(Eigen::VectorXd(e(rows1_)));
  }
}

bool InteriorPoint::factor() {
  const auto m = static_cast<Eigen::Index>(rows_.size());
  Zinv_.resize(Z_.size());
  for (std::size_t b = 0; b < Z_.size(); ++b) {
    Eigen::LLT<Eigen::MatrixXd> llt(Z_[b]);
    if (llt.info() != Eigen::Success) return false;
    Zinv_[b] = llt.solve(Eigen::MatrixXd::Identity(sizes_[b], sizes_[b]));
    Zinv_[b] = 0.5 * (Zinv_[b] + Zinv_[b].transpose());
  }

  // M_ij = tr(A_i X A_j Z^{-1}); only the upper triangle is accumulated.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t b = 0; b < parts_.size(); ++b) {
    const auto& X = X_[b];
    const auto& W = Zinv_[b];
    const auto& parts = parts_[b];
    for (std::size_t a = 0; a < parts.size(); ++a) {
      const auto& ea = parts[a].entries;
      for (std::size_t c = a; c < parts.size(); ++c) {
        const auto& ec = parts[c].entries;
        double s = 0.0;
        for (const auto& e : ea) {
          const int p = e.row;
          const int q = e.col;
          for (const auto& f : ec) {
            const int r = f.row;
            const int t = f.col;
            s += e.value * f.value *
                 (X(q, r) * W(t, p) + X(q, t) * W(r, p) + X(p, r) * W(t, q) + X(p, t) * W(r, q));
          }
        }
        const int i = parts[a].constraint;
        const int j = parts[c].constraint;
        if (i <= j) {
          M(i, j) += 0.25 * s;
        } else {
          M(j, i) += 0.25 * s;
        }
      }
    }
  }
  M.triangularView<Eigen::StrictlyLower>() = M.transpose().triangularView<Eigen::StrictlyLower>();
  M_ = M;
  Eigen::MatrixXd Mr;
  if (B_.cols() > 0) {
    Mr = reduce(M);
  } else {
    Mr = std::move(M);
  }
  schur_.compute(Mr);
  if (schur_.info() != Eigen::Success) {
    const double reg = 1e-13 * std::max(1.0, Mr.diagonal().maxCoeff());
    Mr.diagonal().array() += reg;
    schur_.compute(Mr);
    if (schur_.info() != Eigen::Success) return false;
  }
  return true;
}

void InteriorPoint::direction(const Blocks& Rc, Blocks& dX, Eigen::VectorXd& dy, Eigen::VectorXd& du,
                              Blocks& dZ) const {
  Blocks T(X_.size());
  for (std::size_t b = 0; b < X_.size(); ++b) T[b] = (Rc[b] - X_[b] * Rd_[b]) * Zinv_[b];
  Eigen::VectorXd AT;
  apply_A(T, AT);
  const Eigen::VectorXd h = rp_ - AT;

  solve_kkt(h, rf_, dy, du);
  {
    // One step of iterative refinement against the unreduced system.
    const Eigen::VectorXd r1 = h - M_ * dy - B_ * du;
    const Eigen::VectorXd r2 = rf_ - B_.transpose() * dy;
    Eigen::VectorXd cy, cu;
    solve_kkt(r1, r2, cy, cu);
    dy += cy;
    du += cu;
  }

  Blocks Aty;
  apply_At(dy, Aty);
  dZ.resize(X_.size());
  dX.resize(X_.size());
  for (std::size_t b = 0; b < X_.size(); ++b) {
    dZ[b] = Rd_[b] - Aty[b];
    Eigen::MatrixXd v = (Rc[b] - X_[b] * dZ[b]) * Zinv_[b];
    dX[b] = 0.5 * (v + v.transpose());
  }
}

Eigen::VectorXd InteriorPoint::particular_dual(const Eigen::VectorXd& g) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows_.size()));
  if (B_.cols() > 0) y(rows1_) = Eigen::VectorXd(b1t_lu_.solve(g));
  return y;
}

Eigen::VectorXd InteriorPoint::null_apply(const Eigen::VectorXd& eta) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows_.size()));
  out(rows2_) = eta;
  out(rows1_) = -(W_ * eta);
  return out;
}

Eigen::VectorXd InteriorPoint::null_apply_t(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out = v(rows2_);
  out.noalias() -= W_.transpose() * v(rows1_);
  return out;
}

void InteriorPoint::solve_kkt(const Eigen::VectorXd& h, const Eigen::VectorXd& g, Eigen::VectorXd& dy,
                              Eigen::VectorXd& du) const {
  if (B_.cols() == 0) {
    du.resize(0);
    dy = schur_.solve(h);
    return;
  }
  // dy = dy0 + N eta with B^T dy0 = g; eta from the reduced Schur system,
  // then du from the pivot rows of the first block row.
  const Eigen::VectorXd dy0 = particular_dual(g);
  const Eigen::VectorXd eta = schur_.solve(null_apply_t(h - M_ * dy0));
  dy = dy0 + null_apply(eta);
  const Eigen::VectorXd res = h - M_ * dy;
  du = b1_lu_.solve(Eigen::VectorXd(res(rows1_)));
}

double InteriorPoint::step_length(const Blocks& V, const Blocks& dV) const {
  double a = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < V.size(); ++b) a = std::min(a, max_step(V[b], dV[b]));
  return std::min(1.0, settings_.step_fraction * a);
}

void InteriorPoint::finish(SdpSolution& sol) const {
  sol.gram_blocks.clear();
  for (const auto& X : X_) sol.gram_blocks.push_back(bscale_ * X);
  sol.free_values = Eigen::VectorXd::Zero(problem_.num_free);
  for (std::size_t j = 0; j < free_cols_.size(); ++j) {
    sol.free_values[free_cols_[j]] = bscale_ * u_[static_cast<Eigen::Index>(j)];
  }
  sol.dual = Eigen::VectorXd::Zero(problem_.num_constraints());
  for (std::size_t r = 0; r < rows_.size(); ++r) sol.dual[rows_[r]] = y_[static_cast<Eigen::Index>(r)];
  sol.dual_slacks = Z_;
  sol.objective = problem_.free_objective.size() == problem_.num_free
                      ? problem_.free_objective.dot(sol.free_values)
                      : 0.0;
  if (problem_.gamma_index >= 0) sol.gamma = sol.free_values[problem_.gamma_index];
  sol.lambdas.clear();
  for (int i = 0; i < problem_.num_lambda_vectors; ++i) {
    sol.lambdas.push_back(sol.free_values.segment(static_cast<Eigen::Index>(i) * problem_.lambda_length,
                                                  problem_.lambda_length));
  }
}

SdpSolution InteriorPoint::run() {
  const auto t0 = std::chrono::steady_clock::now();
  SdpSolution sol;
  if (!prepare()) {
    sol.status = SdpStatus::Infeasible;
    sol.primal_residual = std::numeric_limits<double>::infinity();
    return sol;
  }

  const double bnorm = b_.norm();
  const double dnorm = d_.norm();
  sol.status = SdpStatus::IterLimit;
  // Iterate with the smallest merit, returned when the run ends short of tol.
  struct Snapshot {
    double merit = std::numeric_limits<double>::infinity();
    double pinf = 0.0, dinf = 0.0, gap = 0.0;
    Blocks X, Z;
    Eigen::VectorXd y, u;
  } best;
  int stalled = 0;
  int iter = 0;
  for (;; ++iter) {
    // Residuals at the current iterate.
    Eigen::VectorXd AX;
    apply_A(X_, AX);
    rp_ = b_ - AX - B_ * u_;
    Blocks Aty;
    apply_At(y_, Aty);
    Rd_.resize(X_.size());
    for (std::size_t b = 0; b < X_.size(); ++b) Rd_[b] = -Aty[b] - Z_[b];
    rf_ = d_ - B_.transpose() * y_;

    const double pobj = d_.dot(u_);
    const double dobj = b_.dot(y_);
    const double xz = inner(X_, Z_);
    sol.primal_residual = rp_.norm() / (1.0 + bnorm);
    sol.dual_residual = std::sqrt(frob_sq(Rd_) + rf_.squaredNorm()) / (1.0 + dnorm);
    sol.gap = std::max(std::abs(xz), std::abs(pobj - dobj)) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (settings_.verbose) {
      std::fprintf(stderr, "it %3d  pobj %+.10e  dobj %+.10e  pinf %.2e  dinf %.2e  gap %.2e\n", iter,
                   pobj * bscale_, dobj * bscale_, sol.primal_residual, sol.dual_residual, sol.gap);
    }
    const double merit = std::max({sol.primal_residual, sol.dual_residual, sol.gap});
    if (merit <= settings_.tol) {
      sol.status = SdpStatus::Optimal;
      break;
    }
    if (merit < best.merit) {
      best = {merit, sol.primal_residual, sol.dual_residual, sol.gap, X_, Z_, y_, u_};
      stalled = 0;
    } else if (++stalled >= 5) {
      sol.status = SdpStatus::Inaccurate;
      break;
    }
    double xnorm = 0.0;
    for (const auto& X : X_) xnorm = std::max(xnorm, X.cwiseAbs().maxCoeff());
    if (xnorm > 1e12 || y_.cwiseAbs().maxCoeff() > 1e12) {
      sol.status = SdpStatus::Infeasible;
      break;
    }
    if (iter >= settings_.max_iter) {
      sol.status = SdpStatus::IterLimit;
      break;
    }
    if (!factor()) {
      sol.status = SdpStatus::Inaccurate;
      break;
    }

    const double mu = xz / ntot_;
    Blocks Rc(X_.size());
    for (std::size_t b = 0; b < X_.size(); ++b) Rc[b] = -X_[b] * Z_[b];

    Blocks dXa, dZa;
    Eigen::VectorXd dya, dua;
    direction(Rc, dXa, dya, dua, dZa);
    const double ap_aff = step_length(X_, dXa);
    const double ad_aff = step_length(Z_, dZa);
    double mu_aff = 0.0;
    for (std::size_t b = 0; b < X_.size(); ++b) {
      mu_aff += (X_[b] + ap_aff * dXa[b]).cwiseProduct(Z_[b] + ad_aff * dZa[b]).sum();
    }
    mu_aff /= ntot_;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    for (std::size_t b = 0; b < X_.size(); ++b) {
      Rc[b] = sigma * mu * Eigen::MatrixXd::Identity(sizes_[b], sizes_[b]) - X_[b] * Z_[b] - dXa[b] * dZa[b];
    }
    Blocks dX, dZ;
    Eigen::VectorXd dy, du;
    direction(Rc, dX, dy, du, dZ);
    repair_primal(dX, du);
    const double ap = step_length(X_, dX);
    const double ad = step_length(Z_, dZ);
    if (ap < 1e-10 && ad < 1e-10) {
      sol.status = SdpStatus::Inaccurate;
      break;
    }
    for (std::size_t b = 0; b < X_.size(); ++b) {
      X_[b] += ap * dX[b];
      Z_[b] += ad * dZ[b];
    }
    u_ += ap * du;
    y_ += ad * dy;
  }
  sol.iterations = iter;
  if (sol.status != SdpStatus::Optimal && sol.status != SdpStatus::Infeasible && !best.X.empty()) {
    X_ = std::move(best.X);
    Z_ = std::move(best.Z);
    y_ = std::move(best.y);
    u_ = std::move(best.u);
    sol.primal_residual = best.pinf;
    sol.dual_residual = best.dinf;
    sol.gap = best.gap;
  }
  finish(sol);
  sol.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SdpSettings& settings) {
  if (!(settings.tol > 0.0) || settings.max_iter < 0) throw InvalidArgument("sdp solve: invalid settings");
  InteriorPoint ipm(problem, settings);
  return ipm.run();
}

double constraint_residual(const SdpProblem& problem, const std::vector<Eigen::MatrixXd>& blocks,
                           const Eigen::VectorXd& free_values) {
  double worst = 0.0;
  for (const auto& con : problem.constraints) {
    double s = 0.0;
    for (const auto& e : con.block_entries) s += e.value * blocks[static_cast<std::size_t>(e.block)](e.row, e.col);
    for (const auto& e : con.free_entries) s += e.value * free_values[e.index];
    worst = std::max(worst, std::abs(s - con.rhs));
  }
  return worst;
}

}  // namespace shapestar
