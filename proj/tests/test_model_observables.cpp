#include <gtest/gtest.h>

#include <cmath>

#include "vbsq/model_observables.hpp"

using namespace vbsq;

namespace {

const Complex I(0.0, 1.0);

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Vector adjointor_dense(const Model& m, int l, int bond, int alpha, Chirality c) {
  std::vector<std::vector<Matrix>> ts(l, m.tensors(c));
  Matrix t = std::sqrt(2.0 * m.n) * m.basis[alpha];
  if (c == Chirality::R) t = t.conjugate();
  for (auto& a : ts[bond - 1]) a = a * t;
  return dense_mps(ts);
}

Complex dense_bond(const Vector& bra, const Vector& ket, int d, int l, int site, const TwoSiteOperator& op) {
  return inner(bra, apply_two_site(ket, d, l, site, op)) / std::sqrt(bra.squaredNorm() * ket.squaredNorm());
}

}  // namespace

TEST(Hamiltonian, Coefficients) {
  for (int n = 2; n <= 6; ++n) {
    HamiltonianCoeffs k = hamiltonian_coeffs(n);
    EXPECT_DOUBLE_EQ(k.j1, 1.0);
    EXPECT_NEAR(k.j1, 1.5 * n * k.j2, 1e-15);
    EXPECT_NEAR(k.j1, 3.0 / n * k.j0, 1e-15);
  }
}

TEST(EnergyH, ClosedForms) {
  EXPECT_DOUBLE_EQ(energy_h(3, Route::closed_form), -27.0 / 16.0);
  EXPECT_NEAR(energy_h(4, Route::closed_form), -32.0 / 15.0, 1e-15);
  EXPECT_DOUBLE_EQ(energy_h2(3, Route::closed_form), 99.0 / 32.0);
  EXPECT_DOUBLE_EQ(energy_h2(2, Route::closed_form), 2.0);
}

TEST(EnergyH, TransferMatchesClosedForm) {
  for (int n = 2; n <= 6; ++n) {
    for (Chirality c : {Chirality::L, Chirality::R}) {
      EXPECT_NEAR(energy_h(n, Route::transfer, 200, c), energy_h(n, Route::closed_form), 1e-10) << n;
      EXPECT_NEAR(energy_h2(n, Route::transfer, 200, c), energy_h2(n, Route::closed_form), 1e-10) << n;
      EXPECT_NEAR(energy_bond_H(n, Route::transfer, 200, c), 0.0, 1e-10) << n;
    }
    EXPECT_NEAR(energy_bond_H(n, Route::closed_form), 0.0, 1e-12);
  }
}

TEST(EnergyH, ChiralitySymmetryAtFiniteL) {
  for (int l : {4, 7, 12}) {
    EXPECT_NEAR(energy_h(3, Route::transfer, l, Chirality::L), energy_h(3, Route::transfer, l, Chirality::R), 1e-12);
    EXPECT_NEAR(energy_h2(4, Route::transfer, l, Chirality::L), energy_h2(4, Route::transfer, l, Chirality::R), 1e-12);
  }
}

TEST(EnergyH, DenseOracleAgreement) {
  auto m = model(3);
  for (int l = 3; l <= 6; ++l) {
    for (Chirality c : {Chirality::L, Chirality::R}) {
      DenseState s = dense_state_oracle(m->basis, l, c);
      double h = dense_bond(s.amplitudes, s.amplitudes, 8, l, 2, bond_h(*m)).real();
      EXPECT_LT(rel(energy_h(3, Route::transfer, l, c), h), 1e-10) << l;
      if (l <= 5) {
        double h2 = dense_bond(s.amplitudes, s.amplitudes, 8, l, l, bond_h2(*m)).real();
        EXPECT_LT(rel(energy_h2(3, Route::transfer, l, c), h2), 1e-10) << l;
      }
    }
  }
}

TEST(SiteMoments, Values) {
  for (int n : {3, 5}) {
    SiteMoments t = single_site_moments(n, Route::transfer);
    SiteMoments c = single_site_moments(n, Route::closed_form);
    EXPECT_LT(t.polarization, 1e-12);
    EXPECT_NEAR(t.fluctuation, n / (n * n - 1.0), 1e-10);
    EXPECT_NEAR(c.fluctuation, n / (n * n - 1.0), 1e-15);
    double sum = 0.0;
    for (double v : t.per_color_square) {
      EXPECT_NEAR(v, n / (n * n - 1.0), 1e-10);
      sum += v;
    }
    EXPECT_NEAR(sum, n, 1e-9);
  }
  EXPECT_NEAR(single_site_moments(3, Route::closed_form).fluctuation, 3.0 / 8.0, 1e-15);
  EXPECT_NEAR(single_site_moments(5, Route::closed_form).fluctuation, 5.0 / 24.0, 1e-15);
}

TEST(Correlation, ClosedFormValues) {
  EXPECT_NEAR(correlation(3, 1, 2, 4, 4, 200, Route::closed_form), -27.0 / 128.0, 1e-15);
  EXPECT_NEAR(correlation(3, 5, 7, 4, 4, 200, Route::closed_form), 27.0 / 1024.0, 1e-15);
  EXPECT_EQ(correlation(3, 5, 7, 4, 3, 200, Route::closed_form), 0.0);
  EXPECT_EQ(ring_distance(1, 200, 200), 1);
}

TEST(Correlation, TransferMatchesClosedForm) {
  for (int n = 3; n <= 5; ++n) {
    int d = n * n - 1;
    for (int r = 0; r <= 5; ++r) {
      for (int a : {0, d / 2, d - 1}) {
        double t = correlation(n, 10, 10 + r, a, a, 200, Route::transfer);
        double c = correlation(n, 10, 10 + r, a, a, 200, Route::closed_form);
        EXPECT_NEAR(t, c, 1e-10) << n << " r=" << r;
        if (r > 0) EXPECT_EQ(t > 0, r % 2 == 0);
      }
      EXPECT_NEAR(correlation(n, 10, 10 + r, 0, 1, 200, Route::transfer), 0.0, 1e-12);
    }
    // summed over colors at r=1 the correlation is the bond energy
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += correlation(n, 3, 4, a, a, 200, Route::transfer);
    EXPECT_NEAR(s, energy_h(n, Route::closed_form), 1e-10);
  }
  EXPECT_NEAR(correlation(3, 1, 200, 2, 2, 200, Route::transfer), -27.0 / 128.0, 1e-10);
  EXPECT_THROW(correlation(3, 0, 2, 0, 0, 10, Route::transfer), std::invalid_argument);
}

TEST(Correlation, DenseOracleAgreement) {
  auto m = model(3);
  int l = 6;
  for (Chirality c : {Chirality::L, Chirality::R}) {
    DenseState s = dense_state_oracle(m->basis, l, c);
    for (int r = 0; r <= 3; ++r)
      for (int a : {0, 3, 7}) {
        Vector psi = apply_site(apply_site(s.amplitudes, 8, l, 1 + r, m->adj.T[a]), 8, l, 1, m->adj.T[a]);
        double dense = inner(s.amplitudes, psi).real();
        EXPECT_LT(rel(correlation(3, 1, 1 + r, a, a, l, Route::transfer, c), dense), 1e-10);
      }
  }
}

TEST(Adjointor, OverlapValues) {
  EXPECT_NEAR(adjointor_overlap(3, 5, 5, 2, 2, Route::transfer), 1.0, 1e-10);
  EXPECT_NEAR(adjointor_overlap(3, 5, 8, 2, 2, Route::closed_form), -1.0 / 512.0, 1e-15);
  for (int n = 3; n <= 5; ++n)
    for (int r = 0; r <= 4; ++r) {
      for (Chirality c : {Chirality::L, Chirality::R})
        EXPECT_NEAR(adjointor_overlap(n, 20, 20 + r, 1, 1, Route::transfer, 200, c),
                    adjointor_overlap(n, 20, 20 + r, 1, 1, Route::closed_form), 1e-10);
      EXPECT_NEAR(adjointor_overlap(n, 20, 20 + r, 1, 2, Route::transfer), 0.0, 1e-12);
    }
}

TEST(Adjointor, DenseOracleAgreement) {
  auto m = model(3);
  int l = 5;
  for (Chirality c : {Chirality::L, Chirality::R})
    for (int r = 0; r <= 2; ++r) {
      Vector a = adjointor_dense(*m, l, 2, 4, c);
      Vector b = adjointor_dense(*m, l, 2 + r, 4, c);
      double dense = (inner(b, a) / std::sqrt(a.squaredNorm() * b.squaredNorm())).real();
      // same normalization as the chain: divide by the ground state norm
      DenseState g = dense_state_oracle(m->basis, l, c);
      double ratio = (inner(b, a) / (g.theta_norm * g.theta_norm)).real();
      double theta2 = std::pow(9.0 / 8.0, l);
      EXPECT_LT(rel(adjointor_overlap(3, 2 + r, 2, 4, 4, Route::transfer, l, c), ratio * theta2), 1e-10);
      if (r == 0) EXPECT_NEAR(dense, 1.0, 1e-12);
    }
}

TEST(Adjointor, Energies) {
  AdjointorEnergy c3 = adjointor_energy(3, Route::closed_form);
  EXPECT_NEAR(c3.h, 27.0 / 128.0, 1e-15);
  EXPECT_NEAR(c3.h2, 225.0 / 256.0, 1e-15);
  EXPECT_NEAR(c3.H, 1.40625, 1e-14);
  EXPECT_NEAR(adjointor_energy(10, Route::closed_form).H, 1000.0 * 101.0 / (3.0 * 9801.0), 1e-12);
  for (int n = 2; n <= 6; ++n) {
    double q = n * n - 1.0;
    AdjointorEnergy c = adjointor_energy(n, Route::closed_form);
    EXPECT_NEAR(c.H, std::pow(n, 3) * (n * n + 1.0) / (3.0 * q * q), 1e-12);
    for (int a : {0, q > 3 ? 4 : 1}) {
      for (Chirality ch : {Chirality::L, Chirality::R}) {
        AdjointorEnergy t = adjointor_energy(n, Route::transfer, a, 200, ch);
        EXPECT_NEAR(t.h, c.h, 1e-10) << n;
        EXPECT_NEAR(t.h2, c.h2, 1e-10) << n;
        EXPECT_NEAR(t.H, c.H, 1e-10) << n;
      }
    }
  }
}

TEST(Adjointor, EnergyDenseOracle) {
  auto m = model(3);
  int l = 5;
  Vector a = adjointor_dense(*m, l, 2, 6, Chirality::L);
  double h = dense_bond(a, a, 8, l, 2, bond_h(*m)).real();
  double h2 = dense_bond(a, a, 8, l, 2, bond_h2(*m)).real();
  AdjointorEnergy t = adjointor_energy(3, Route::transfer, 6, l, Chirality::L);
  EXPECT_LT(rel(t.h, h), 1e-10);
  EXPECT_LT(rel(t.h2, h2), 1e-10);
}

TEST(Dimer, ClosedFormsAndTransfer) {
  EXPECT_DOUBLE_EQ(dimer_energy(3, DimerTerm::case_I_h, Route::closed_form), -3.0);
  EXPECT_NEAR(dimer_energy(3, DimerTerm::case_II_H, Route::closed_form), 1.25, 1e-15);
  EXPECT_NEAR(dimer_energy(3, DimerTerm::total, Route::closed_form, 8), 5.0, 1e-14);
  EXPECT_THROW(dimer_energy(3, DimerTerm::total, Route::closed_form, 7), std::invalid_argument);
  for (int n = 2; n <= 6; ++n) {
    for (DimerTerm w : {DimerTerm::case_I_h, DimerTerm::case_I_h2, DimerTerm::case_I_H, DimerTerm::case_II_h,
                        DimerTerm::case_II_h2, DimerTerm::case_II_H})
      EXPECT_NEAR(dimer_energy(n, w, Route::transfer), dimer_energy(n, w, Route::closed_form), 1e-10) << n;
    EXPECT_NEAR(dimer_energy(n, DimerTerm::case_I_H, Route::closed_form), 0.0, 1e-12);
    EXPECT_NEAR(dimer_energy(n, DimerTerm::total, Route::transfer, 10),
                10.0 * n * (n * n + 1.0) / (6.0 * (n * n - 1.0)), 1e-10);
  }
}

TEST(Dimer, DenseOracle) {
  auto m = model(3);
  Vector pair = dense_mps(std::vector<std::vector<Matrix>>(2, m->tensors_l));
  pair /= pair.norm();
  Vector d(pair.size() * pair.size());
  for (Eigen::Index i = 0; i < pair.size(); ++i) d.segment(i * pair.size(), pair.size()) = pair(i) * pair;
  double i_h = dense_bond(d, d, 8, 4, 1, bond_h(*m)).real();
  double ii_h2 = dense_bond(d, d, 8, 4, 2, bond_h2(*m)).real();
  EXPECT_NEAR(i_h, dimer_energy(3, DimerTerm::case_I_h, Route::transfer), 1e-10);
  EXPECT_NEAR(ii_h2, dimer_energy(3, DimerTerm::case_II_h2, Route::transfer), 1e-10);
}

TEST(Parity, HamiltonianInvariance) {
  for (int n = 2; n <= 6; ++n) {
    ParityReport r = verify_parity_symmetry(n);
    EXPECT_TRUE(r.ok) << n << " " << r.diagnostic;
  }
}

TEST(Parity, RandomPermutationControl) {
  Rng rng(77);
  for (int n : {3, 5}) {
    int d = n * n - 1;
    std::vector<int> perm(d);
    for (int i = 0; i < d; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    RealMatrix p = RealMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) p(i, perm[i]) = 1.0;
    ParityReport r = verify_parity_symmetry(n, p);
    EXPECT_FALSE(r.ok);
    EXPECT_GT(r.max_residual, 1e-3);
    EXPECT_FALSE(r.diagnostic.empty());
  }
}
