#include "shapestar/relax.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

namespace shapestar {

std::string to_string(RelaxVariant v) { return v == RelaxVariant::Full2 ? "full" : "reduced"; }

RelaxVariant parse_variant(const std::string& name) {
  if (name == "full") return RelaxVariant::Full2;
  if (name == "reduced") return RelaxVariant::Reduced2;
  throw InvalidArgument("unknown relaxation variant '" + name + "' (expected full|reduced)");
}

int BasisSpec::gram_index(const Monomial& m) const {
  const auto it = std::find(gram_basis.begin(), gram_basis.end(), m);
  return it == gram_basis.end() ? -1 : static_cast<int>(it - gram_basis.begin());
}

std::vector<Monomial> monomials_up_to(int nvars, const std::vector<int>& vars, int max_degree) {
  std::set<Monomial> out{Monomial(nvars)};
  std::vector<Monomial> frontier{Monomial(nvars)};
  for (int d = 1; d <= max_degree; ++d) {
    std::vector<Monomial> next;
    for (const auto& m : frontier) {
      for (int v : vars) {
        Monomial n = m;
        n[v] += 1;
        if (out.insert(n).second) next.push_back(n);
      }
    }
    frontier = std::move(next);
  }
  return {out.begin(), out.end()};
}

BasisSpec build_basis(int K, RelaxVariant variant) {
  if (K < 1) throw InvalidArgument("build_basis: K must be >= 1");
  BasisSpec spec;
  spec.K = K;
  spec.variant = variant;
  const int nvars = K + 9;
  std::vector<int> all(static_cast<std::size_t>(nvars));
  for (int i = 0; i < nvars; ++i) all[static_cast<std::size_t>(i)] = i;
  std::vector<int> cs;
  std::vector<int> rs;
  for (int k = 0; k < K; ++k) cs.push_back(c_var(k));
  for (int j = 0; j < 9; ++j) rs.push_back(r_var(K, j));

  if (variant == RelaxVariant::Full2) {
    spec.gram_basis = monomials_up_to(nvars, all, 2);
    spec.ineq_basis = monomials_up_to(nvars, all, 1);
    spec.eq_basis = monomials_up_to(nvars, all, 2);
  } else {
    std::set<Monomial> gram{Monomial(nvars)};
    for (int c : cs) gram.insert(Monomial::variable(nvars, c));
    for (int r : rs) gram.insert(Monomial::variable(nvars, r));
    for (int c : cs) {
      for (int r : rs) gram.insert(Monomial::variable(nvars, c) * Monomial::variable(nvars, r));
    }
    spec.gram_basis.assign(gram.begin(), gram.end());
    spec.ineq_basis = monomials_up_to(nvars, rs, 1);
    spec.eq_basis = monomials_up_to(nvars, cs, 2);
  }
  return spec;
}

namespace {

void check_compatible(const PolyProgram& prog, const BasisSpec& spec) {
  if (prog.nvars != spec.nvars() || prog.K != spec.K) {
    throw InvalidArgument("basis spec built for K=" + std::to_string(spec.K) +
                          " does not match program with K=" + std::to_string(prog.K));
  }
  if (prog.objective.degree() > 4) throw InvalidArgument("objective degree exceeds 4");
}

/// Equalities whose support lies in the gram basis and which are themselves
/// admissible multipliers, reduced to echelon form over the gram basis.
/// Pivots prefer quadratic monomials so that 1, c and r stay in the basis.
Eigen::MatrixXd gram_relations(const PolyProgram& prog, const BasisSpec& spec, std::vector<int>& pivots) {
  const auto n = static_cast<Eigen::Index>(spec.gram_basis.size());
  const std::set<Monomial> eq_set(spec.eq_basis.begin(), spec.eq_basis.end());
  std::vector<Eigen::VectorXd> rows;
  std::vector<SparsePoly> candidates = prog.equalities;
  candidates.insert(candidates.end(), prog.redundant_equalities.begin(), prog.redundant_equalities.end());
  for (const auto& h : candidates) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    bool inside = true;
    for (const auto& [m, c] : h.terms()) {
      const int idx = spec.gram_index(m);
      if (idx < 0 || eq_set.count(m) == 0) {
        inside = false;
        break;
      }
      v[idx] = c;
    }
    if (inside) rows.push_back(v);
  }
  Eigen::MatrixXd H(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t i = 0; i < rows.size(); ++i) H.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();

  pivots.clear();
  Eigen::Index rank = 0;
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index r = rank; r < H.rows(); ++r) {
      Eigen::Index best_row = -1;
      Eigen::Index best_col = -1;
      double best = 1e-9;
      for (Eigen::Index i = rank; i < H.rows(); ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          if (pass == 0 && spec.gram_basis[static_cast<std::size_t>(j)].degree() < 2) continue;
          if (std::find(pivots.begin(), pivots.end(), static_cast<int>(j)) != pivots.end()) continue;
          if (std::abs(H(i, j)) > best) {
            best = std::abs(H(i, j));
            best_row = i;
            best_col = j;
          }
        }
      }
      if (best_row < 0) break;
      H.row(rank).swap(H.row(best_row));
      H.row(rank) /= H(rank, best_col);
      for (Eigen::Index i = 0; i < H.rows(); ++i) {
        if (i != rank) H.row(i) -= H(i, best_col) * H.row(rank);
      }
      pivots.push_back(static_cast<int>(best_col));
      ++rank;
    }
  }
  return H.topRows(rank);
}

}  // namespace

std::vector<Monomial> support_union(const PolyProgram& prog, const BasisSpec& spec) {
  check_compatible(prog, spec);
  std::set<Monomial> support;
  for (const auto& [m, v] : prog.objective.terms()) support.insert(m);
  const auto& gb = spec.gram_basis;
  for (std::size_t p = 0; p < gb.size(); ++p) {
    for (std::size_t q = p; q < gb.size(); ++q) support.insert(gb[p] * gb[q]);
  }
  const auto& ib = spec.ineq_basis;
  for (const auto& g : prog.inequalities) {
    for (std::size_t p = 0; p < ib.size(); ++p) {
      for (std::size_t q = p; q < ib.size(); ++q) {
        const Monomial pq = ib[p] * ib[q];
        for (const auto& [m, v] : g.terms()) support.insert(pq * m);
      }
    }
  }
  for (const auto& h : prog.equalities) {
    for (const auto& e : spec.eq_basis) {
      for (const auto& [m, v] : h.terms()) support.insert(e * m);
    }
  }
  return {support.begin(), support.end()};
}

SdpProblem assemble_sdp(const PolyProgram& prog, const BasisSpec& spec) {
  const std::vector<Monomial> support = support_union(prog, spec);
  std::map<Monomial, int> row_of;
  for (std::size_t i = 0; i < support.size(); ++i) row_of.emplace(support[i], static_cast<int>(i));

  SdpProblem sdp;
  std::vector<int> pivots;
  sdp.gram_relations = gram_relations(prog, spec, pivots);
  for (int i = 0; i < static_cast<int>(spec.gram_basis.size()); ++i) {
    if (std::find(pivots.begin(), pivots.end(), i) == pivots.end()) sdp.gram_support.push_back(i);
  }
  const int n0 = static_cast<int>(sdp.gram_support.size());
  const int ns = static_cast<int>(spec.ineq_basis.size());
  sdp.psd_blocks.push_back({"S0", n0});
  for (std::size_t k = 0; k < prog.inequalities.size(); ++k) {
    sdp.psd_blocks.push_back({"S" + std::to_string(k + 1), ns});
  }
  sdp.num_lambda_vectors = static_cast<int>(prog.equalities.size());
  sdp.lambda_length = static_cast<int>(spec.eq_basis.size());
  sdp.gamma_index = sdp.num_lambda_vectors * sdp.lambda_length;
  sdp.num_free = sdp.gamma_index + 1;
  sdp.free_objective = Eigen::VectorXd::Zero(sdp.num_free);
  sdp.free_objective[sdp.gamma_index] = 1.0;

  // Accumulate per row so that coincident contributions merge.
  std::vector<std::map<std::tuple<int, int, int>, double>> block_acc(support.size());
  std::vector<std::map<int, double>> free_acc(support.size());

  const auto& gb = spec.gram_basis;
  for (int p = 0; p < n0; ++p) {
    for (int q = p; q < n0; ++q) {
      const int row = row_of.at(gb[static_cast<std::size_t>(sdp.gram_support[static_cast<std::size_t>(p)])] *
                                gb[static_cast<std::size_t>(sdp.gram_support[static_cast<std::size_t>(q)])]);
      block_acc[static_cast<std::size_t>(row)][{0, p, q}] += (p == q ? 1.0 : 2.0);
    }
  }
  const auto& ib = spec.ineq_basis;
  for (std::size_t k = 0; k < prog.inequalities.size(); ++k) {
    const int block = static_cast<int>(k) + 1;
    for (int p = 0; p < ns; ++p) {
      for (int q = p; q < ns; ++q) {
        const Monomial pq = ib[static_cast<std::size_t>(p)] * ib[static_cast<std::size_t>(q)];
        for (const auto& [m, v] : prog.inequalities[k].terms()) {
          const int row = row_of.at(pq * m);
          block_acc[static_cast<std::size_t>(row)][{block, p, q}] += (p == q ? 1.0 : 2.0) * v;
        }
      }
    }
  }
  for (std::size_t i = 0; i < prog.equalities.size(); ++i) {
    for (std::size_t e = 0; e < spec.eq_basis.size(); ++e) {
      const int idx = static_cast<int>(i) * sdp.lambda_length + static_cast<int>(e);
      for (const auto& [m, v] : prog.equalities[i].terms()) {
        const int row = row_of.at(spec.eq_basis[e] * m);
        free_acc[static_cast<std::size_t>(row)][idx] += v;
      }
    }
  }

  sdp.constraints.resize(support.size());
  for (std::size_t r = 0; r < support.size(); ++r) {
    auto& con = sdp.constraints[r];
    con.monomial = support[r];
    con.rhs = prog.objective.coefficient(support[r]);
    for (const auto& [key, v] : block_acc[r]) {
      if (v != 0.0) con.block_entries.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), v});
    }
    for (const auto& [idx, v] : free_acc[r]) {
      if (v != 0.0) con.free_entries.push_back({idx, v});
    }
    if (support[r].is_constant()) con.free_entries.push_back({sdp.gamma_index, 1.0});
    if (con.rhs != 0.0 && con.block_entries.empty() && con.free_entries.empty()) {
      throw InfeasibleStructure("objective monomial " + support[r].to_string(spec.K) +
                                " is not representable by the relaxation basis");
    }
  }
  return sdp;
}

Eigen::MatrixXd lift_gram(const SdpProblem& problem, const Eigen::MatrixXd& X, int gram_size) {
  const auto n0 = static_cast<Eigen::Index>(problem.gram_support.size());
  if (X.rows() != n0 || X.cols() != n0) throw InvalidArgument("lift_gram: block size does not match gram support");
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(gram_size, gram_size);
  for (Eigen::Index i = 0; i < n0; ++i) {
    for (Eigen::Index j = 0; j < n0; ++j) {
      S(problem.gram_support[static_cast<std::size_t>(i)], problem.gram_support[static_cast<std::size_t>(j)]) = X(i, j);
    }
  }
  if (problem.gram_relations.rows() > 0) {
    // h^T S h-type additions are multiples of h_i * h_j, i.e. ideal members.
    const Eigen::MatrixXd& H = problem.gram_relations;
    const double scale = std::max(X.diagonal().maxCoeff(), 1e-12);
    S += scale * H.transpose() * H;
  }
  return S;
}

void write_sdp_text(std::ostream& os, const SdpProblem& problem) {
  os.precision(17);
  os << "shapestar-sdp 1\n";
  os << "blocks " << problem.psd_blocks.size();
  for (const auto& b : problem.psd_blocks) os << ' ' << b.size;
  os << '\n';
  os << "free " << problem.num_free << " gamma " << problem.gamma_index << '\n';
  for (Eigen::Index i = 0; i < problem.free_objective.size(); ++i) {
    if (problem.free_objective[i] != 0.0) os << "c " << i << ' ' << problem.free_objective[i] << '\n';
  }
  os << "constraints " << problem.constraints.size() << '\n';
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    const auto& con = problem.constraints[i];
    os << "b " << i << ' ' << con.rhs << '\n';
    for (const auto& e : con.block_entries) {
      os << "a " << i << ' ' << e.block << ' ' << e.row << ' ' << e.col << ' ' << e.value << '\n';
    }
    for (const auto& e : con.free_entries) os << "u " << i << ' ' << e.index << ' ' << e.value << '\n';
  }
}

}  // namespace shapestar
