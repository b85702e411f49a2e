#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vbsq/rng.hpp"

namespace vbsq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

struct SunBasis {
  int n = 0;
  std::vector<Matrix> generators;
  std::string ordering_tag;

  int dim() const { return n * n - 1; }
  const Matrix& operator[](int a) const { return generators[a]; }
};

struct StructureConstants {
  int n = 0;
  int dim = 0;
  std::vector<double> f;  // row-major (a, b, c)

  double operator()(int a, int b, int c) const { return f[(static_cast<size_t>(a) * dim + b) * dim + c]; }
};

struct AdjointGenerators {
  int n = 0;
  std::vector<Matrix> T;
};

struct PauliOperator {
  int n = 0;
  int j = 0;
  int k = 0;
  Matrix matrix;
};

struct ParityOperator {
  int n = 0;
  RealMatrix matrix_ebasis;
  Matrix matrix_pauli;
  RealMatrix matrix_gellmann;
};

enum class BasisKind { gellmann, pauli };

// Generalized Gell-Mann matrices t^a with tr(t^a t^b) = delta_ab / 2.
// Order: symmetric off-diagonal pairs, antisymmetric pairs, Cartan elements;
// pairs (i<j) run lexicographically.
SunBasis gell_mann_basis(int n);

// Index of the pair (i, j), i < j, zero based, in the lexicographic pair list.
int pair_index(int n, int i, int j);

StructureConstants structure_constants(const SunBasis& basis);
AdjointGenerators adjoint_generators(const StructureConstants& f);

PauliOperator heisenberg_weyl(int n, int j, int k);
Matrix shift_x(int n);
Matrix clock_z(int n);

// (j, k) labels of the non-identity Heisenberg-Weyl operators in basis order.
std::vector<std::pair<int, int>> pauli_basis_labels(int n);

// Adjoint action X -> V X V^dag as a matrix on the (N^2-1)-dim operator space.
// Gell-Mann basis: 2 tr(t^a V t^b V^dag). Pauli basis: kets are P_a^dag / sqrt(N),
// entries tr(P_a V P_b^dag V^dag) / N.
Matrix adjoint_rep(const SunBasis& basis, const Matrix& v, BasisKind kind = BasisKind::gellmann);

// ad(X) in the Gell-Mann basis: entries 2 tr(t^a [X, t^b]).
Matrix adjoint_action(const SunBasis& basis, const Matrix& x);

// Operators of the E-basis: E_12, E_21, E_13, E_31, ..., then hs-normalized Cartan elements.
std::vector<Matrix> e_basis_operators(int n);

// Unitary changes of basis (columns = source basis kets in the target basis).
Matrix gellmann_to_pauli(int n);
Matrix ebasis_to_pauli(int n);
Matrix ebasis_to_gellmann(int n);

Matrix basis_change(const Matrix& op_ebasis);
Matrix basis_change_inverse(const Matrix& op_pauli);

ParityOperator parity_operator(int n);

Matrix haar_unitary(int d, Rng& rng);

bool is_unitary(const Matrix& m, double tol = 1e-10);

}  // namespace vbsq
