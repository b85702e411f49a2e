#pragma once

#include <vector>

#include "vbsq/model_observables.hpp"

namespace vbsq {

// Flavors are one based positions 1..N on the diagonal of V.
struct TwistSpec {
  int flavor = 1;
  double fraction = 1.0;
  std::vector<double> per_bond_angles;  // empty: uniform 2 pi f Omega / L
  int winding = 1;
};

enum class TwistMethod { transfer, closed_form, fermionic };

struct TwistResult {
  Complex on_L;
  Complex on_R;
  Complex cross_LR;
  TwistMethod method = TwistMethod::transfer;
};

// Hermitian matrix exponential exp(i theta h).
Matrix expm_i(const Matrix& h, double theta);

// diag(1,..,e^{i angle},..,1) with the phase at the flavor position.
Matrix flavor_phase(int n, int flavor, double angle);

// O = ad(e_f) in the Gell-Mann basis, e_f the flavor projector.
Matrix twist_generator(int n, int flavor);

// Bond angles l_b, b = 1..L (bond L closes the ring), for a TwistSpec on a ring of length l.
std::vector<double> bond_angles(const TwistSpec& spec, int l);

// Site phases theta_s = l_1 + ... + l_s.
std::vector<double> site_phases(const std::vector<double>& bond_angles);

// Angles for a twist acting only on sites start .. start+length-1.
std::vector<double> segment_angles(int l, int start, int length, double total = 2.0 * kPi);

// The physical rotation on site s is exp(-i theta_s O), i.e. the virtual
// conjugation V_s A V_s^dag on L kets and conj(V_s) A V_s^T on R kets.
std::vector<Matrix> twisted_tensors(const Model& m, Chirality ket, int flavor, double theta);

// <bra| U_TW |ket> / tr(M^L) with explicit per-site factors.
Complex twisted_overlap(const Model& m, Chirality bra, Chirality ket, int flavor, const std::vector<double>& phases);

// Uniform per-bond angle ell on every bond but the seam, where the
// phase mismatch theta_1 - theta_L appears; uses binary powering.
Complex uniform_twisted_overlap(const Model& m, Chirality bra, Chirality ket, int flavor, double ell, std::int64_t l);

TwistResult twist_overlap(int n, int l, const TwistSpec& spec);

// Relative phase of the logical gate diag(on_L, on_R) ~ diag(1, on_R/on_L).
inline double logical_phase(const TwistResult& r) { return std::arg(r.on_R / r.on_L); }

// Large-L limit of the uniform twist by Richardson extrapolation over
// lengths l0, 2 l0, ..., 2^(levels-1) l0.
TwistResult twist_overlap_limit(int n, const TwistSpec& spec, std::int64_t l0 = 256, int levels = 5);

// ((N-1+e^{il})/N)^L for L, conjugate for R.
Complex closed_form_twist(int n, int l, double ell, Chirality c = Chirality::L);

// (1/N) e^{i 2 pi f/N} (N - 1 + e^{-i 2 pi f}) for L, conjugate for R.
Complex fractional_twist_closed_form(int n, double f, Chirality c = Chirality::L);

// Leading eigenvalue route: (lambda/eps)^L with lambda = eps e^{i ell/N}.
Complex eigenvalue_twist(int n, int l, double ell);

struct HomotopyCheck {
  Complex on_L;
  double phase_deviation = 0.0;  // |arg(on_L) - 2 pi Omega/N| wrapped
  double sum_sq_angles = 0.0;
  double constant = 0.0;  // phase_deviation / sum_sq_angles
};

// Rejects angle sets that do not sum to 2 pi Omega.
HomotopyCheck nonuniform_twist_check(int n, const std::vector<double>& angles, int flavor = 1, int winding = 1);

struct TwistEnergyCost {
  double e1 = 0.0;
  double e2 = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  double ec = 0.0;
};

// Trace-formula energies of the bonds off (I) and on (II) the seam. l <= 0
// takes the large-L limit V -> 1, W -> Lambda.
TwistEnergyCost twist_energy_cost(int n, double f, int l = 0, int flavor = 1);

// E_II from the identity/Z^i expansion of W.
double twist_e2_expansion(int n, double f, int l = 0);

// Energy of H_n on bond b (1..L, L = seam) of the fractionally twisted state,
// from the full twisted ring.
struct BondEnergy {
  double h = 0.0;
  double h2 = 0.0;
  double H = 0.0;
};
BondEnergy twisted_bond_energy(int n, int l, double f, int bond, int flavor = 1, Chirality c = Chirality::L);

// sum_s t^s X t^s for the Gell-Mann set, via completeness.
Matrix fierz_contract(const Matrix& x);

struct AdjointorTwist {
  Complex value;       // <A|U|A>/<A|A>
  Complex diagonal;    // (1/L) sum_n <A(n)|U|A(n)> / <A|A>
  Complex off_diagonal;
};

AdjointorTwist twist_on_adjointor(int n, int l, int alpha, Chirality c = Chirality::L, int flavor = 1);

struct DimerTwist {
  Complex transfer;
  double closed_form = 0.0;
  double fermionic = 0.0;
};

DimerTwist twist_on_dimer(int n, int l, int flavor = 1);
DimerTwist twist_on_dimer_angle(int n, int l, double ell, int flavor = 1);

}  // namespace vbsq
