#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "vbsq/dense_state.hpp"
#include "vbsq/transfer_engine.hpp"

using namespace vbsq;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::vector<double> sorted_real_eigs(const Matrix& m) {
  Eigen::ComplexEigenSolver<Matrix> es(m);
  std::vector<double> out;
  for (int i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i).real());
  std::sort(out.begin(), out.end());
  return out;
}

// Exact <L|R> on a ring from the spectra of both factors.
double exact_lr(int n, int l) {
  double n2 = n * n;
  double num = n * (n + 1) / 2.0 * std::pow((n - 1) / n2, l) + n * (n - 1) / 2.0 * std::pow(-(n + 1) / n2, l);
  double den = std::pow((n2 - 1) / n2, l) + (n2 - 1) * std::pow(-1.0 / n2, l);
  return num / den;
}

Vector vec_of(const Matrix& x) {
  int n = static_cast<int>(x.rows());
  Vector v(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v(i * n + j) = x(i, j);
  return v;
}

}  // namespace

TEST(Scaled, ComplexArithmetic) {
  ScaledComplex a = ScaledComplex::from({3.0, -4.0});
  EXPECT_GE(std::abs(a.mantissa), 1.0);
  EXPECT_LT(std::abs(a.mantissa), 2.0);
  EXPECT_LT(std::abs(a.value() - Complex(3.0, -4.0)), 1e-15);
  ScaledComplex b = ScaledComplex::from({1e-200, 1e-200});
  ScaledComplex p = b * b * b;
  EXPECT_FALSE(p.is_zero());
  EXPECT_NEAR(p.log_abs(), 3.0 * std::log(std::sqrt(2.0) * 1e-200), 1e-10);
  EXPECT_LT(rel((a + a).value(), Complex(6.0, -8.0)), 1e-15);
  EXPECT_LT(std::abs((a - a).value()), 1e-15);
  EXPECT_LT(rel((a / a).value(), 1.0), 1e-15);
  EXPECT_TRUE(ScaledComplex::from(0.0).is_zero());
  EXPECT_TRUE((ScaledComplex::from(0.0) * a).is_zero());
}

TEST(Scaled, PowerMatchesRepeatedProduct) {
  Matrix m = Matrix::Random(4, 4);
  ScaledMatrix acc = ScaledMatrix::from(m);
  for (int i = 1; i < 37; ++i) acc = acc * m;
  ScaledMatrix p = scaled_power(m, 37);
  EXPECT_LT(rel(p.trace().value(), acc.trace().value()), 1e-10);
  EXPECT_LT(max_abs(scaled_power(m, 0).value() - Matrix::Identity(4, 4)), 1e-15);
}

TEST(Transfer, SpectrumOfM) {
  for (int n = 2; n <= 6; ++n) {
    SunBasis b = gell_mann_basis(n);
    Matrix m = plain_factor(b, Chirality::L, Chirality::L);
    EXPECT_LT(m.imag().cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT(std::abs(m.trace()), 1e-12);
    double n2 = n * n;
    auto e = sorted_real_eigs(m);
    for (int i = 0; i + 1 < n * n; ++i) EXPECT_NEAR(e[i], -1.0 / n2, 1e-12);
    EXPECT_NEAR(e.back(), (n2 - 1) / n2, 1e-12);
    // eigenvectors: the singlet and the vectorized generators
    Vector omega = vec_of(Matrix::Identity(n, n)) / std::sqrt(static_cast<double>(n));
    EXPECT_LT((m * omega - (n2 - 1) / n2 * omega).cwiseAbs().maxCoeff(), 1e-12);
    for (int a = 0; a < b.dim(); ++a) {
      Vector v = vec_of(b[a]);
      EXPECT_LT((m * v + v / n2).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Transfer, SpectrumOfN) {
  for (int n = 2; n <= 6; ++n) {
    SunBasis b = gell_mann_basis(n);
    Matrix nn = plain_factor(b, Chirality::L, Chirality::R);
    EXPECT_LT(std::abs(nn.trace()), 1e-12);
    EXPECT_LT(nn.imag().cwiseAbs().maxCoeff(), 1e-14);
    auto e = sorted_real_eigs(nn);
    double n2 = n * n;
    int neg = n * (n - 1) / 2;
    for (int i = 0; i < n * n; ++i) EXPECT_NEAR(e[i], i < neg ? -(n + 1) / n2 : (n - 1) / n2, 1e-12);
  }
}

TEST(Transfer, FactorSpecVariants) {
  SunBasis b = gell_mann_basis(3);
  int d = b.dim();
  Matrix m = plain_factor(b, Chirality::L, Chirality::L);
  FactorSpec s;
  EXPECT_LT(max_abs(transfer_factor(b, s).matrix - m), 1e-15);
  s.phys_op = Matrix::Identity(d, d);
  EXPECT_LT(max_abs(transfer_factor(b, s).matrix - m), 1e-15);
  double ell = 0.4;
  Matrix v = Matrix::Identity(3, 3);
  v(0, 0) = std::polar(1.0, ell);
  FactorSpec g;
  g.virt_left = v;
  EXPECT_LT(max_abs(transfer_factor(b, g).matrix - kron(v, Matrix::Identity(3, 3)) * m), 1e-14);
  FactorSpec pl;
  pl.ket = Chirality::R;
  pl.virt_left = v;
  EXPECT_LT(max_abs(transfer_factor(b, pl).matrix - kron(v, Matrix::Identity(3, 3)) * plain_factor(b, Chirality::L, Chirality::R)),
            1e-14);
  FactorSpec bad;
  bad.phys_op = Matrix::Identity(3, 3);
  EXPECT_THROW(transfer_factor(b, bad), std::invalid_argument);
  FactorSpec bad2;
  bad2.virt_right = Matrix::Identity(2, 2);
  EXPECT_THROW(transfer_factor(b, bad2), std::invalid_argument);
}

TEST(Transfer, TwistedDominantEigenvalue) {
  for (int n = 3; n <= 5; ++n) {
    SunBasis b = gell_mann_basis(n);
    double ell = 1e-3;
    Matrix v = Matrix::Identity(n, n);
    v(0, 0) = std::polar(1.0, ell);
    FactorSpec g;
    g.virt_left = v;
    Eigen::ComplexEigenSolver<Matrix> es(transfer_factor(b, g).matrix);
    Complex top(0.0);
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      if (std::abs(es.eigenvalues()(i)) > std::abs(top)) top = es.eigenvalues()(i);
    double n2 = n * n;
    Complex expect = (n2 - 1) / n2 * std::polar(1.0, ell / n);
    EXPECT_LT(std::abs(top - expect), 10 * ell * ell);
  }
}

TEST(Transfer, PhysicalAdjointIsVirtualConjugation) {
  Rng rng(8);
  for (int n = 2; n <= 5; ++n) {
    SunBasis b = gell_mann_basis(n);
    Matrix u = haar_unitary(n, rng);
    Matrix o = adjoint_rep(b, u);
    auto l = apply_physical(site_tensors(b, Chirality::L), o);
    auto r = apply_physical(site_tensors(b, Chirality::R), o);
    auto l0 = site_tensors(b, Chirality::L);
    auto r0 = site_tensors(b, Chirality::R);
    for (int i = 0; i < b.dim(); ++i) {
      EXPECT_LT(max_abs(l[i] - u.adjoint() * l0[i] * u), 1e-12);
      EXPECT_LT(max_abs(r[i] - u.transpose() * r0[i] * u.conjugate()), 1e-12);
    }
    // parity sends L tensors to R tensors
    Matrix pi = parity_operator(n).matrix_gellmann.cast<Complex>();
    auto pl = apply_physical(l0, pi);
    for (int i = 0; i < b.dim(); ++i) EXPECT_LT(max_abs(pl[i] - r0[i]), 1e-12);
  }
}

TEST(Chain, NormalizationAndCyclicity) {
  SunBasis b = gell_mann_basis(3);
  Matrix m = plain_factor(b, Chirality::L, Chirality::L);
  std::vector<TransferFactor> fs(12, TransferFactor{m, {}});
  EXPECT_EQ((chain_trace(fs) / chain_trace(fs)).value(), Complex(1.0));
  Rng rng(4);
  for (int s : {2, 5, 9}) {
    FactorSpec sp;
    sp.phys_op = adjoint_rep(b, haar_unitary(3, rng));
    fs[s] = transfer_factor(b, sp);
  }
  Complex base = chain_trace(fs).value();
  for (int k = 1; k < 12; ++k) {
    std::vector<TransferFactor> rot(fs.begin() + k, fs.end());
    rot.insert(rot.end(), fs.begin(), fs.begin() + k);
    EXPECT_LT(rel(chain_trace(rot).value(), base), 1e-12);
  }
  EXPECT_THROW(chain_trace(std::vector<TransferFactor>{}), std::invalid_argument);
}

TEST(Chain, GroundOverlapExactSpectralForm) {
  for (int n = 3; n <= 6; ++n) {
    SunBasis b = gell_mann_basis(n);
    Matrix nn = plain_factor(b, Chirality::L, Chirality::R);
    for (int l : {3, 4, 5, 10, 11, 50, 200}) {
      std::vector<TransferFactor> fs(l, TransferFactor{nn, {}});
      Overlap o = normalized_overlap(b, fs, l);
      double expect = exact_lr(n, l);
      EXPECT_LT(std::abs(o.value.real() - expect) / std::abs(expect), 1e-10) << n << " " << l;
      EXPECT_LT(std::abs(o.value.imag()), 1e-12 * std::abs(expect));
      // magnitude decays with rate 1/(N-1); sign alternates with l for large l
      if (l >= 50) EXPECT_EQ(o.value.real() > 0, l % 2 == 0);
    }
  }
}

TEST(Chain, ScaleManagementLongRing) {
  for (int n = 2; n <= 6; ++n) {
    SunBasis b = gell_mann_basis(n);
    Matrix m = plain_factor(b, Chirality::L, Chirality::L);
    std::vector<Matrix> fs(2000, m);
    ScaledComplex t = chain_trace(fs);
    double n2 = n * n, eps = (n2 - 1) / n2, eps1 = -1.0 / n2;
    double expect = 2000 * std::log(eps) + std::log1p((n2 - 1) * std::pow(eps1 / eps, 2000));
    EXPECT_NEAR(t.log_abs(), expect, 1e-9 * std::abs(expect));
    EXPECT_FALSE(t.is_zero());
  }
}

TEST(Chain, SinglePauliInsertion) {
  for (int n = 2; n <= 5; ++n) {
    SunBasis b = gell_mann_basis(n);
    Matrix m = plain_factor(b, Chirality::L, Chirality::L);
    int l = 40;
    for (auto [j, k] : pauli_basis_labels(n)) {
      std::vector<TransferFactor> fs(l, TransferFactor{m, {}});
      FactorSpec sp;
      sp.phys_op = adjoint_rep(b, heisenberg_weyl(n, j, k).matrix);
      fs[7] = transfer_factor(b, sp);
      Overlap o = normalized_overlap(b, fs, l);
      EXPECT_NEAR(o.value.real(), -1.0 / (n * n - 1.0), 1e-12);
      EXPECT_TRUE(o.representable);
    }
  }
  SunBasis b = gell_mann_basis(3);
  EXPECT_THROW(normalized_overlap(b, std::vector<TransferFactor>(3, TransferFactor{plain_factor(b, Chirality::L, Chirality::L), {}}), 4),
               std::invalid_argument);
}

TEST(Chain, UnrepresentableRatioIsFlagged) {
  SunBasis b = gell_mann_basis(3);
  Matrix nn = plain_factor(b, Chirality::L, Chirality::R);
  std::vector<TransferFactor> fs(4000, TransferFactor{nn, {}});
  Overlap o = normalized_overlap(b, fs, 4000);
  EXPECT_FALSE(o.representable);
  EXPECT_NEAR(o.log_abs, 4000 * std::log(0.5) + std::log(3.0), 1e-8 * 4000);
}

TEST(Ring, MatchesExplicitChain) {
  SunBasis b = gell_mann_basis(3);
  Matrix m = plain_factor(b, Chirality::L, Chirality::L);
  Rng rng(17);
  int l = 30;
  RingContractor ring(m, l);
  std::vector<std::pair<int, Matrix>> ins;
  std::vector<Matrix> explicit_chain(l, m);
  for (int s : {3, 4, 17, 30}) {
    FactorSpec sp;
    sp.phys_op = adjoint_rep(b, haar_unitary(3, rng));
    Matrix f = transfer_factor(b, sp).matrix;
    ins.push_back({s, f});
    explicit_chain[s - 1] = f;
  }
  EXPECT_LT(rel(ring.trace(ins).value(), chain_trace(explicit_chain).value()), 1e-12);
  Matrix span = ins[0].second * ins[1].second;
  EXPECT_LT(rel(ring.trace_spans({{3, span, 2}, {17, ins[2].second, 1}, {30, ins[3].second, 1}}).value(),
                chain_trace(explicit_chain).value()),
            1e-12);
  EXPECT_THROW(ring.trace({{3, m}, {3, m}}), std::invalid_argument);
  EXPECT_THROW(ring.trace({{31, m}}), std::invalid_argument);
  EXPECT_THROW(ring.trace_spans({{30, m * m, 2}}), std::invalid_argument);
}

TEST(Dense, NormalizationAndOverlap) {
  SunBasis b = gell_mann_basis(3);
  for (int l = 3; l <= 6; ++l) {
    DenseState sl = dense_state_oracle(b, l, Chirality::L);
    DenseState sr = dense_state_oracle(b, l, Chirality::R);
    EXPECT_NEAR(sl.amplitudes.norm(), 1.0, 1e-10);
    EXPECT_NEAR(sr.amplitudes.norm(), 1.0, 1e-10);
    Complex dense = inner(sl.amplitudes, sr.amplitudes);
    std::vector<TransferFactor> fs(l, TransferFactor{plain_factor(b, Chirality::L, Chirality::R), {}});
    EXPECT_LT(rel(normalized_overlap(b, fs, l).value, dense), 1e-10) << l;
    EXPECT_LT(std::abs(dense.real() - exact_lr(3, l)) / std::abs(exact_lr(3, l)), 1e-10);
  }
  EXPECT_THROW(dense_state_oracle(b, 8, Chirality::L), std::invalid_argument);
}

TEST(Dense, PauliPairMatchesChain) {
  SunBasis b = gell_mann_basis(3);
  int l = 6;
  DenseState s = dense_state_oracle(b, l, Chirality::L);
  Matrix m = plain_factor(b, Chirality::L, Chirality::L);
  Matrix p = adjoint_rep(b, heisenberg_weyl(3, 1, 2).matrix);
  for (int r = 1; r <= 3; ++r) {
    Vector psi = apply_site(apply_site(s.amplitudes, 8, l, 1, p), 8, l, 1 + r, p);
    Complex dense = inner(s.amplitudes, psi);
    std::vector<TransferFactor> fs(l, TransferFactor{m, {}});
    FactorSpec sp;
    sp.phys_op = p;
    fs[0] = transfer_factor(b, sp);
    fs[r] = transfer_factor(b, sp);
    EXPECT_LT(rel(normalized_overlap(b, fs, l).value, dense), 1e-10) << r;
  }
}
