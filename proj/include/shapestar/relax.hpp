#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shapestar/poly.hpp"

namespace shapestar {

enum class RelaxVariant {
  Full2,    ///< dense order-2 bases [x]_2 / [x]_1 / [x]_2
  Reduced2  ///< m2(x) = [1, c, r, c (x) r] / [1, r] / [c]_2
};

std::string to_string(RelaxVariant v);
RelaxVariant parse_variant(const std::string& name);

struct BasisSpec {
  RelaxVariant variant = RelaxVariant::Reduced2;
  int K = 0;
  std::vector<Monomial> gram_basis;  ///< basis of S_0
  std::vector<Monomial> ineq_basis;  ///< basis of every S_k
  std::vector<Monomial> eq_basis;    ///< basis of every multiplier lambda_i

  int nvars() const { return K + 9; }
  /// Position of `m` in gram_basis, or -1.
  int gram_index(const Monomial& m) const;
};

/// All monomials of degree <= max_degree in the listed variables, sorted.
std::vector<Monomial> monomials_up_to(int nvars, const std::vector<int>& vars, int max_degree);

BasisSpec build_basis(int K, RelaxVariant variant);

struct PsdBlock {
  std::string name;
  int size = 0;
};

/// Coefficient `value` multiplies entry (row, col), row <= col, of a PSD block.
/// Off-diagonal entries already carry the factor 2 of the symmetric pair.
struct BlockEntry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

struct FreeEntry {
  int index = 0;
  double value = 0.0;
};

/// sum(block entries) + sum(free entries) == rhs
struct LinearConstraint {
  Monomial monomial;
  double rhs = 0.0;
  std::vector<BlockEntry> block_entries;
  std::vector<FreeEntry> free_entries;
};

/// Maximize free_objective . u over PSD blocks X_b and free variables u,
/// subject to one linear equality per monomial.
struct SdpProblem {
  std::vector<PsdBlock> psd_blocks;
  int num_free = 0;
  /// Free variables are laid out as lambda_1 .. lambda_L (each of
  /// lambda_length entries) followed by gamma.
  int num_lambda_vectors = 0;
  int lambda_length = 0;
  int gamma_index = -1;
  std::vector<LinearConstraint> constraints;
  Eigen::VectorXd free_objective;

  /// Block S0 is indexed by gram_support (positions in the gram basis). When
  /// equalities h_i lie inside span(gram basis), their pivot monomials are
  /// dropped: every Gram form over the full basis equals one over the rest
  /// modulo the ideal, and the dropped directions would otherwise be forced
  /// into the kernel of every dual solution. The rows of gram_relations are
  /// those equalities over the full gram basis, in reduced echelon form.
  std::vector<int> gram_support;
  Eigen::MatrixXd gram_relations;

  int num_constraints() const { return static_cast<int>(constraints.size()); }
};

/// Sorted monomials reachable by f and by every product on the SOS side.
std::vector<Monomial> support_union(const PolyProgram& prog, const BasisSpec& spec);

/// Coefficient matching f - gamma = s0 + sum_k s_k g_k + sum_i lambda_i h_i.
SdpProblem assemble_sdp(const PolyProgram& prog, const BasisSpec& spec);

/// Gram matrix over the full gram basis equivalent (modulo the equalities) to
/// the solved block S0: X on gram_support plus a multiple of the relation
/// Gram, so that its null space matches that of X.
Eigen::MatrixXd lift_gram(const SdpProblem& problem, const Eigen::MatrixXd& X, int gram_size);

/// Sparse text dump: header, block sizes, objective, rhs and coefficient
/// triplets (see README).
void write_sdp_text(std::ostream& os, const SdpProblem& problem);

}  // namespace shapestar
