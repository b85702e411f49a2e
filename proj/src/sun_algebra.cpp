#include "vbsq/sun_algebra.hpp"

#include <cmath>
#include <stdexcept>

namespace vbsq {

namespace {

const Complex I(0.0, 1.0);

void require_n(int n) {
  if (n < 2) throw std::invalid_argument("SU(N) requires n >= 2, got " + std::to_string(n));
}

// Cartan element k (1 based): diag(1,...,1,-k,0,...)/sqrt(2k(k+1)).
Matrix cartan(int n, int k) {
  Matrix h = Matrix::Zero(n, n);
  double norm = 1.0 / std::sqrt(2.0 * k * (k + 1));
  for (int i = 0; i < k; ++i) h(i, i) = norm;
  h(k, k) = -k * norm;
  return h;
}

}  // namespace

int pair_index(int n, int i, int j) {
  // rows 0..i-1 contribute (n-1) + (n-2) + ... pairs
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

SunBasis gell_mann_basis(int n) {
  require_n(n);
  SunBasis b;
  b.n = n;
  b.ordering_tag = "sym-antisym-cartan/lex";
  int pairs = n * (n - 1) / 2;
  b.generators.assign(n * n - 1, Matrix::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      int p = pair_index(n, i, j);
      Matrix& s = b.generators[p];
      s(i, j) = 0.5;
      s(j, i) = 0.5;
      Matrix& a = b.generators[pairs + p];
      a(i, j) = -0.5 * I;
      a(j, i) = 0.5 * I;
    }
  }
  for (int k = 1; k < n; ++k) b.generators[2 * pairs + k - 1] = cartan(n, k);
  return b;
}

StructureConstants structure_constants(const SunBasis& basis) {
  StructureConstants sc;
  sc.n = basis.n;
  sc.dim = basis.dim();
  int d = sc.dim;
  sc.f.assign(static_cast<size_t>(d) * d * d, 0.0);
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      Matrix comm = basis[a] * basis[b] - basis[b] * basis[a];
      for (int c = 0; c < d; ++c) {
        double v = (-2.0 * I * (comm * basis[c]).trace()).real();
        sc.f[(static_cast<size_t>(a) * d + b) * d + c] = v;
        sc.f[(static_cast<size_t>(b) * d + a) * d + c] = -v;
      }
    }
  }
  return sc;
}

AdjointGenerators adjoint_generators(const StructureConstants& f) {
  AdjointGenerators g;
  g.n = f.n;
  int d = f.dim;
  g.T.assign(d, Matrix::Zero(d, d));
  for (int a = 0; a < d; ++a)
    for (int m = 0; m < d; ++m)
      for (int k = 0; k < d; ++k) g.T[a](m, k) = -I * f(a, m, k);
  return g;
}

Matrix shift_x(int n) {
  Matrix x = Matrix::Zero(n, n);
  for (int a = 0; a < n; ++a) x(a, (a + 1) % n) = 1.0;
  return x;
}

Matrix clock_z(int n) {
  Matrix z = Matrix::Zero(n, n);
  for (int a = 0; a < n; ++a) z(a, a) = std::polar(1.0, 2.0 * kPi * a / n);
  return z;
}

PauliOperator heisenberg_weyl(int n, int j, int k) {
  require_n(n);
  PauliOperator p;
  p.n = n;
  p.j = ((j % n) + n) % n;
  p.k = ((k % n) + n) % n;
  p.matrix = Matrix::Zero(n, n);
  // X^j Z^k : |a> <a+j| times omega^{k (a+j)}
  for (int a = 0; a < n; ++a) {
    int c = (a + p.j) % n;
    p.matrix(a, c) = std::polar(1.0, 2.0 * kPi * static_cast<double>((p.k * c) % n) / n);
  }
  return p;
}

std::vector<std::pair<int, int>> pauli_basis_labels(int n) {
  require_n(n);
  std::vector<std::pair<int, int>> out;
  if (n == 3) {
    out = {{1, 0}, {2, 0}, {1, 1}, {2, 1}, {1, 2}, {2, 2}, {0, 1}, {0, 2}};
  } else if (n == 4) {
    for (int k = 0; k < 4; ++k) {
      out.push_back({1, k});
      out.push_back({3, k});
    }
    for (int k = 0; k < 4; ++k) out.push_back({2, k});
    for (int k = 1; k < 4; ++k) out.push_back({0, k});
  } else {
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (j != 0 || k != 0) out.push_back({j, k});
  }
  return out;
}

bool is_unitary(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

Matrix adjoint_rep(const SunBasis& basis, const Matrix& v, BasisKind kind) {
  int n = basis.n;
  if (v.rows() != n || v.cols() != n) throw std::invalid_argument("adjoint_rep: matrix is not N x N");
  if (!is_unitary(v)) throw std::invalid_argument("adjoint_rep: matrix is not unitary");
  int d = basis.dim();
  Matrix out(d, d);
  Matrix vd = v.adjoint();
  if (kind == BasisKind::gellmann) {
    for (int b = 0; b < d; ++b) {
      Matrix rot = v * basis[b] * vd;
      for (int a = 0; a < d; ++a) out(a, b) = 2.0 * (basis[a] * rot).trace();
    }
  } else {
    auto labels = pauli_basis_labels(n);
    std::vector<Matrix> p;
    for (auto [j, k] : labels) p.push_back(heisenberg_weyl(n, j, k).matrix);
    for (int b = 0; b < d; ++b) {
      Matrix rot = v * p[b].adjoint() * vd;
      for (int a = 0; a < d; ++a) out(a, b) = (p[a] * rot).trace() / static_cast<double>(n);
    }
  }
  return out;
}

Matrix adjoint_action(const SunBasis& basis, const Matrix& x) {
  int d = basis.dim();
  Matrix out(d, d);
  for (int b = 0; b < d; ++b) {
    Matrix comm = x * basis[b] - basis[b] * x;
    for (int a = 0; a < d; ++a) out(a, b) = 2.0 * (basis[a] * comm).trace();
  }
  return out;
}

std::vector<Matrix> e_basis_operators(int n) {
  require_n(n);
  std::vector<Matrix> out;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Matrix eij = Matrix::Zero(n, n);
      eij(i, j) = 1.0;
      out.push_back(eij);
      out.push_back(eij.transpose());
    }
  }
  for (int k = 1; k < n; ++k) out.push_back(std::sqrt(2.0) * cartan(n, k));
  return out;
}

namespace {

std::vector<Matrix> pauli_kets(int n) {
  std::vector<Matrix> out;
  for (auto [j, k] : pauli_basis_labels(n))
    out.push_back(heisenberg_weyl(n, j, k).matrix.adjoint() / std::sqrt(static_cast<double>(n)));
  return out;
}

std::vector<Matrix> gellmann_kets(int n) {
  SunBasis b = gell_mann_basis(n);
  std::vector<Matrix> out;
  for (auto& t : b.generators) out.push_back(std::sqrt(2.0) * t);
  return out;
}

Matrix overlap_matrix(const std::vector<Matrix>& target, const std::vector<Matrix>& source) {
  Matrix c(target.size(), source.size());
  for (size_t a = 0; a < target.size(); ++a)
    for (size_t s = 0; s < source.size(); ++s) c(a, s) = (target[a].adjoint() * source[s]).trace();
  return c;
}

}  // namespace

Matrix gellmann_to_pauli(int n) { return overlap_matrix(pauli_kets(n), gellmann_kets(n)); }
Matrix ebasis_to_pauli(int n) { return overlap_matrix(pauli_kets(n), e_basis_operators(n)); }
Matrix ebasis_to_gellmann(int n) { return overlap_matrix(gellmann_kets(n), e_basis_operators(n)); }

namespace {

int n_from_dim(Eigen::Index d) {
  int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d + 1))));
  if (n < 2 || n * n - 1 != d) throw std::invalid_argument("basis_change: dimension is not N^2-1");
  return n;
}

}  // namespace

Matrix basis_change(const Matrix& op_ebasis) {
  if (op_ebasis.rows() != op_ebasis.cols()) throw std::invalid_argument("basis_change: matrix not square");
  Matrix c = ebasis_to_pauli(n_from_dim(op_ebasis.rows()));
  return c * op_ebasis * c.adjoint();
}

Matrix basis_change_inverse(const Matrix& op_pauli) {
  if (op_pauli.rows() != op_pauli.cols()) throw std::invalid_argument("basis_change: matrix not square");
  Matrix c = ebasis_to_pauli(n_from_dim(op_pauli.rows()));
  return c.adjoint() * op_pauli * c;
}

ParityOperator parity_operator(int n) {
  require_n(n);
  ParityOperator p;
  p.n = n;
  int d = n * n - 1;
  int offdiag = n * (n - 1);
  p.matrix_ebasis = RealMatrix::Zero(d, d);
  for (int q = 0; q < offdiag; q += 2) {
    p.matrix_ebasis(q, q + 1) = 1.0;
    p.matrix_ebasis(q + 1, q) = 1.0;
  }
  for (int q = offdiag; q < d; ++q) p.matrix_ebasis(q, q) = 1.0;
  Matrix pe = p.matrix_ebasis.cast<Complex>();
  p.matrix_pauli = basis_change(pe);
  Matrix cg = ebasis_to_gellmann(n);
  p.matrix_gellmann = (cg * pe * cg.adjoint()).real();
  return p;
}

Matrix haar_unitary(int d, Rng& rng) {
  if (d < 1) throw std::invalid_argument("haar_unitary: d must be >= 1");
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  Matrix z(d, d);
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < d; ++r) z(r, c) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < d; ++c) {
    Complex rc = r(c, c);
    double a = std::abs(rc);
    q.col(c) *= (a > 0.0 ? rc / a : Complex(1.0));
  }
  Complex det = q.determinant();
  q /= std::pow(det, 1.0 / d);
  return q;
}

}  // namespace vbsq
