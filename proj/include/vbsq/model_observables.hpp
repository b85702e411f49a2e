#pragma once

#include <memory>
#include <string>
#include <vector>

#include "vbsq/dense_state.hpp"
#include "vbsq/transfer_engine.hpp"

namespace vbsq {

// Color indices (alpha, beta) are zero based positions in the generator list.
// Site and bond labels are one based; bond n joins sites n and n+1.

struct HamiltonianCoeffs {
  double j1 = 1.0;
  double j2 = 0.0;
  double j0 = 0.0;
};

HamiltonianCoeffs hamiltonian_coeffs(int n);

enum class Route { closed_form, transfer };

inline constexpr int kTransferLength = 200;

struct Model {
  explicit Model(int n);

  int n;
  SunBasis basis;
  StructureConstants f;
  AdjointGenerators adj;
  std::vector<Matrix> tensors_l;
  std::vector<Matrix> tensors_r;

  int dim() const { return basis.dim(); }
  const std::vector<Matrix>& tensors(Chirality c) const { return c == Chirality::L ? tensors_l : tensors_r; }
  // sum_j O_ji ket^i (x) conj(bra^j); op may be null for identity
  Matrix factor(Chirality bra, Chirality ket, const Matrix* op = nullptr) const;
};

// Shared, lazily built model for SU(n). Safe to call from several threads.
std::shared_ptr<const Model> model(int n);

TwoSiteOperator bond_h(const Model& m);
TwoSiteOperator bond_h2(const Model& m);
// Dense d^2 x d^2 matrix of a two-site operator.
Matrix two_site_matrix(const TwoSiteOperator& op);

// sum_k F(A_k) X F(B_k), the two-site span of a bond operator with an
// optional bond insertion X between the two sites.
Matrix bond_block(const Model& m, Chirality bra, Chirality ket, const TwoSiteOperator& op, const Matrix* bond = nullptr);

// Bond insertions for adjointor states: sqrt(2N) t^alpha (conjugated for R)
// on the ket and/or bra side of a bond.
Matrix adjointor_bond(const Model& m, Chirality c, int alpha_ket, int alpha_bra);
Matrix adjointor_ket_bond(const Model& m, Chirality c, int alpha);
Matrix adjointor_bra_bond(const Model& m, Chirality c, int alpha);

double energy_h(int n, Route via, int l = kTransferLength, Chirality c = Chirality::L);
double energy_h2(int n, Route via, int l = kTransferLength, Chirality c = Chirality::L);
double energy_bond_H(int n, Route via, int l = kTransferLength, Chirality c = Chirality::L);

// <L|R> on a ring of l sites from the spectra of the LL and LR factors.
double ground_overlap_exact(int n, int l);
// Transfer route for <L|R>. lr_factor replaces the LR factor when given.
Overlap ground_overlap(int n, int l, const Matrix* lr_factor = nullptr);

struct SiteMoments {
  double polarization = 0.0;  // max_alpha |<T^alpha>|
  double fluctuation = 0.0;   // mean_alpha <(T^alpha)^2>
  std::vector<double> per_color_mean;
  std::vector<double> per_color_square;
};

SiteMoments single_site_moments(int n, Route via = Route::transfer, int l = kTransferLength,
                                Chirality c = Chirality::L);

int ring_distance(int m, int n, int l);

double correlation(int n_sun, int m, int n, int alpha, int beta, int l, Route via, Chirality c = Chirality::L);

double adjointor_overlap(int n_sun, int m, int n, int alpha, int beta, Route via, int l = kTransferLength,
                         Chirality c = Chirality::L);

struct AdjointorEnergy {
  double h = 0.0;
  double h2 = 0.0;
  double H = 0.0;
};

AdjointorEnergy adjointor_energy(int n, Route via, int alpha = 0, int l = kTransferLength,
                                 Chirality c = Chirality::L);

enum class DimerTerm { case_I_h, case_I_h2, case_I_H, case_II_h, case_II_h2, case_II_H, total };

double dimer_energy(int n, DimerTerm which, Route via, int l = 0);

struct ParityReport {
  bool ok = false;
  double max_residual = 0.0;
  std::string diagnostic;
};

// Checks (P x P) h (P x P) = h and the generator identities with the
// physical parity P in the Gell-Mann basis, or with a caller supplied P.
ParityReport verify_parity_symmetry(int n);
ParityReport verify_parity_symmetry(int n, const RealMatrix& pi_gellmann);

}  // namespace vbsq
