#include "vbsq/twist.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vbsq {

namespace {

const Complex I(0.0, 1.0);

void check_flavor(int n, int flavor) {
  if (flavor < 1 || flavor > n) throw std::invalid_argument("twist: flavor out of range");
}

double wrap_phase(double x) { return std::remainder(x, 2.0 * kPi); }

// Diagonal of the ket-side virtual unitary at phase theta.
Vector ket_phase_diag(int n, int flavor, double theta, Chirality ket) {
  Vector d = Vector::Ones(n);
  d(flavor - 1) = std::polar(1.0, ket == Chirality::L ? theta : -theta);
  return d;
}

// (D x 1) F (D^dag x 1) for diagonal D.
Matrix conj_ket_side(const Matrix& f, const Vector& d) {
  Eigen::Index n = d.size();
  Matrix out = f;
  for (Eigen::Index r = 0; r < n * n; ++r)
    for (Eigen::Index c = 0; c < n * n; ++c) out(r, c) *= d(r / n) * std::conj(d(c / n));
  return out;
}

Matrix left_ket_side(const Matrix& f, const Vector& d) {
  Eigen::Index n = d.size();
  Matrix out = f;
  for (Eigen::Index r = 0; r < n * n; ++r) out.row(r) *= d(r / n);
  return out;
}

ScaledComplex ground_norm(const Model& m, std::int64_t l) {
  return scaled_power(m.factor(Chirality::L, Chirality::L), l).trace();
}

}  // namespace

Matrix expm_i(const Matrix& h, double theta) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector ph(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::polar(1.0, theta * es.eigenvalues()(i));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix flavor_phase(int n, int flavor, double angle) {
  check_flavor(n, flavor);
  Matrix v = Matrix::Identity(n, n);
  v(flavor - 1, flavor - 1) = std::polar(1.0, angle);
  return v;
}

Matrix twist_generator(int n, int flavor) {
  check_flavor(n, flavor);
  Matrix e = Matrix::Zero(n, n);
  e(flavor - 1, flavor - 1) = 1.0;
  return adjoint_action(model(n)->basis, e);
}

std::vector<double> bond_angles(const TwistSpec& spec, int l) {
  if (l < 1) throw std::invalid_argument("twist: l must be >= 1");
  if (!spec.per_bond_angles.empty()) {
    if (static_cast<int>(spec.per_bond_angles.size()) != l)
      throw std::invalid_argument("twist: per_bond_angles must have one entry per bond");
    return spec.per_bond_angles;
  }
  return std::vector<double>(l, 2.0 * kPi * spec.fraction * spec.winding / l);
}

std::vector<double> site_phases(const std::vector<double>& angles) {
  std::vector<double> out(angles.size());
  std::partial_sum(angles.begin(), angles.end(), out.begin());
  return out;
}

std::vector<double> segment_angles(int l, int start, int length, double total) {
  if (length < 1 || start < 1 || start + length - 1 > l) throw std::invalid_argument("segment_angles: bad segment");
  std::vector<double> out(l, 0.0);
  for (int s = start; s < start + length; ++s) out[s - 1] = total / length;
  return out;
}

std::vector<Matrix> twisted_tensors(const Model& m, Chirality ket, int flavor, double theta) {
  Vector d = ket_phase_diag(m.n, flavor, theta, ket);
  std::vector<Matrix> out = m.tensors(ket);
  for (auto& a : out) a = d.asDiagonal() * a * d.conjugate().asDiagonal();
  return out;
}

Complex twisted_overlap(const Model& m, Chirality bra, Chirality ket, int flavor, const std::vector<double>& phases) {
  check_flavor(m.n, flavor);
  Matrix f = m.factor(bra, ket);
  std::vector<Matrix> chain;
  chain.reserve(phases.size());
  for (double th : phases) chain.push_back(conj_ket_side(f, ket_phase_diag(m.n, flavor, th, ket)));
  return (chain_trace(chain) / ground_norm(m, static_cast<std::int64_t>(phases.size()))).value();
}

Complex uniform_twisted_overlap(const Model& m, Chirality bra, Chirality ket, int flavor, double ell, std::int64_t l) {
  check_flavor(m.n, flavor);
  Matrix f = m.factor(bra, ket);
  Matrix step = left_ket_side(f, ket_phase_diag(m.n, flavor, ell, ket));
  double seam = ell - static_cast<double>(l) * ell;
  Matrix first = left_ket_side(f, ket_phase_diag(m.n, flavor, seam, ket));
  ScaledMatrix prod = first * scaled_power(step, l - 1);
  return (prod.trace() / ground_norm(m, l)).value();
}

TwistResult twist_overlap(int n, int l, const TwistSpec& spec) {
  auto m = model(n);
  check_flavor(n, spec.flavor);
  TwistResult r;
  r.method = TwistMethod::transfer;
  if (spec.per_bond_angles.empty()) {
    double ell = 2.0 * kPi * spec.fraction * spec.winding / l;
    r.on_L = uniform_twisted_overlap(*m, Chirality::L, Chirality::L, spec.flavor, ell, l);
    r.on_R = uniform_twisted_overlap(*m, Chirality::R, Chirality::R, spec.flavor, ell, l);
    r.cross_LR = uniform_twisted_overlap(*m, Chirality::L, Chirality::R, spec.flavor, ell, l);
  } else {
    std::vector<double> ph = site_phases(bond_angles(spec, l));
    r.on_L = twisted_overlap(*m, Chirality::L, Chirality::L, spec.flavor, ph);
    r.on_R = twisted_overlap(*m, Chirality::R, Chirality::R, spec.flavor, ph);
    r.cross_LR = twisted_overlap(*m, Chirality::L, Chirality::R, spec.flavor, ph);
  }
  return r;
}

TwistResult twist_overlap_limit(int n, const TwistSpec& spec, std::int64_t l0, int levels) {
  if (levels < 1 || l0 < 2) throw std::invalid_argument("twist_overlap_limit: bad extrapolation grid");
  if (!spec.per_bond_angles.empty()) throw std::invalid_argument("twist_overlap_limit: uniform twists only");
  auto m = model(n);
  double total = 2.0 * kPi * spec.fraction * spec.winding;
  auto extrapolate = [&](Chirality bra, Chirality ket) {
    std::vector<std::vector<Complex>> t(levels);
    for (int k = 0; k < levels; ++k) {
      std::int64_t l = l0 << k;
      t[k].push_back(uniform_twisted_overlap(*m, bra, ket, spec.flavor, total / static_cast<double>(l), l));
      for (int j = 1; j <= k; ++j) {
        double p = std::ldexp(1.0, j);
        t[k].push_back((p * t[k][j - 1] - t[k - 1][j - 1]) / (p - 1.0));
      }
    }
    return t[levels - 1][levels - 1];
  };
  TwistResult r;
  r.method = TwistMethod::transfer;
  r.on_L = extrapolate(Chirality::L, Chirality::L);
  r.on_R = extrapolate(Chirality::R, Chirality::R);
  r.cross_LR = 0.0;
  return r;
}

Complex closed_form_twist(int n, int l, double ell, Chirality c) {
  Complex z = std::pow((n - 1.0 + std::polar(1.0, ell)) / static_cast<double>(n), l);
  return c == Chirality::L ? z : std::conj(z);
}

Complex fractional_twist_closed_form(int n, double f, Chirality c) {
  Complex z = std::polar(1.0, 2.0 * kPi * f / n) * (n - 1.0 + std::polar(1.0, -2.0 * kPi * f)) / static_cast<double>(n);
  return c == Chirality::L ? z : std::conj(z);
}

Complex eigenvalue_twist(int n, int l, double ell) { return std::polar(1.0, ell * l / n); }

HomotopyCheck nonuniform_twist_check(int n, const std::vector<double>& angles, int flavor, int winding) {
  if (angles.empty()) throw std::invalid_argument("nonuniform_twist_check: no angles");
  double sum = std::accumulate(angles.begin(), angles.end(), 0.0);
  if (std::abs(sum - 2.0 * kPi * winding) > 1e-9) throw std::invalid_argument("nonuniform_twist_check: angles must sum to 2 pi");
  auto m = model(n);
  HomotopyCheck h;
  h.on_L = twisted_overlap(*m, Chirality::L, Chirality::L, flavor, site_phases(angles));
  h.phase_deviation = std::abs(wrap_phase(std::arg(h.on_L) - 2.0 * kPi * winding / n));
  for (double a : angles) h.sum_sq_angles += a * a;
  h.constant = h.phase_deviation / h.sum_sq_angles;
  return h;
}

Matrix fierz_contract(const Matrix& x) {
  double n = static_cast<double>(x.rows());
  return 0.5 * (x.trace() * Matrix::Identity(x.rows(), x.cols()) - x / n);
}

namespace {

double trace_energy_h(int n, const Matrix& x) {
  double pref = std::pow(n * n / (n * n - 1.0), 2);
  return -pref * (fierz_contract(x.adjoint()) * x).trace().real() / n;
}

double trace_energy_h2(int n, const Matrix& x) {
  double pref = std::pow(n * n / (n * n - 1.0), 2);
  double q = n * n - 1.0;
  return pref * (3.0 * q / (4.0 * n * n) + (fierz_contract(fierz_contract(x.adjoint())) * x).trace().real() / n);
}

}  // namespace

TwistEnergyCost twist_energy_cost(int n, double f, int l, int flavor) {
  if (f < 0.0 || f > 1.0) throw std::invalid_argument("twist_energy_cost: f must lie in [0, 1]");
  double ell = l > 0 ? 2.0 * kPi / l : 0.0;
  Matrix v = flavor_phase(n, flavor, ell * f);
  Matrix lambda = flavor_phase(n, flavor, -2.0 * kPi * f);
  Matrix w = v * lambda;
  TwistEnergyCost c;
  c.e1 = trace_energy_h(n, v);
  c.e2 = trace_energy_h(n, w);
  c.f1 = trace_energy_h2(n, v);
  c.f2 = trace_energy_h2(n, w);
  c.ec = c.e2 + 2.0 / (3.0 * n) * c.f2 + n / 3.0;
  return c;
}

double twist_e2_expansion(int n, double f, int l) {
  double ell = l > 0 ? 2.0 * kPi / l : 0.0;
  double phi = l > 0 ? ell * f * (1.0 - l) : -2.0 * kPi * f;
  Complex w0 = (1.0 - 1.0 / n) + std::polar(1.0, phi) / static_cast<double>(n);
  Complex wi = (std::polar(1.0, phi) - 1.0) / static_cast<double>(n);
  double q = n * n - 1.0;
  return std::pow(n, 3) / (2.0 * q) * (-std::norm(w0) + (n - 1.0) * std::norm(wi) / q);
}

BondEnergy twisted_bond_energy(int n, int l, double f, int bond, int flavor, Chirality c) {
  if (bond < 1 || bond > l || l < 3) throw std::invalid_argument("twisted_bond_energy: bad bond");
  auto m = model(n);
  double ell = 2.0 * kPi * f / l;
  std::vector<std::vector<Matrix>> ket(l);
  for (int s = 1; s <= l; ++s) ket[s - 1] = twisted_tensors(*m, c, flavor, ell * s);
  int a = bond, b = bond % l + 1;
  // remaining sites in ring order after b
  ScaledMatrix rest = ScaledMatrix::identity(n * n);
  for (int k = 1; k <= l - 2; ++k) {
    int s = (b - 1 + k) % l + 1;
    rest = rest * factor_from_tensors(ket[s - 1], ket[s - 1]);
  }
  Matrix fa = factor_from_tensors(ket[a - 1], ket[a - 1]);
  Matrix fb = factor_from_tensors(ket[b - 1], ket[b - 1]);
  ScaledComplex norm = ((fa * fb) * rest).trace();
  auto expect = [&](const TwoSiteOperator& op) {
    Matrix block = Matrix::Zero(n * n, n * n);
    for (const auto& [x, y] : op)
      block += factor_from_tensors(apply_physical(ket[a - 1], x), ket[a - 1]) *
               factor_from_tensors(apply_physical(ket[b - 1], y), ket[b - 1]);
    return ((block * rest).trace() / norm).value().real();
  };
  BondEnergy e;
  HamiltonianCoeffs k = hamiltonian_coeffs(n);
  e.h = expect(bond_h(*m));
  e.h2 = expect(bond_h2(*m));
  e.H = k.j1 * e.h + k.j2 * e.h2 + k.j0;
  return e;
}

AdjointorTwist twist_on_adjointor(int n, int l, int alpha, Chirality c, int flavor) {
  auto m = model(n);
  check_flavor(n, flavor);
  int d2 = n * n;
  Matrix xk = adjointor_ket_bond(*m, c, alpha);
  Matrix xb = adjointor_bra_bond(*m, c, alpha);
  Matrix xx = adjointor_bond(*m, c, alpha, alpha);
  Matrix f = m->factor(c, c);
  double ell = 2.0 * kPi / l;
  // blocks: 0 none, 1 ket bond placed, 2 bra bond placed, 3 both
  auto run = [&](bool twisted) {
    ScaledMatrix full = ScaledMatrix::identity(4 * d2);
    ScaledMatrix diag = ScaledMatrix::identity(2 * d2);
    for (int s = 1; s <= l; ++s) {
      Matrix fs = twisted ? conj_ket_side(f, ket_phase_diag(n, flavor, ell * s, c)) : f;
      Matrix t = Matrix::Zero(4 * d2, 4 * d2);
      for (int q = 0; q < 4; ++q) t.block(q * d2, q * d2, d2, d2) = fs;
      t.block(0, d2, d2, d2) = fs * xk;
      t.block(0, 2 * d2, d2, d2) = fs * xb;
      t.block(0, 3 * d2, d2, d2) = fs * xx;
      t.block(d2, 3 * d2, d2, d2) = fs * xb;
      t.block(2 * d2, 3 * d2, d2, d2) = fs * xk;
      full = full * t;
      Matrix u = Matrix::Zero(2 * d2, 2 * d2);
      u.block(0, 0, d2, d2) = fs;
      u.block(d2, d2, d2, d2) = fs;
      u.block(0, d2, d2, d2) = fs * xx;
      diag = diag * u;
    }
    ScaledComplex all = ScaledComplex::from_parts(full.mantissa.block(0, 3 * d2, d2, d2).trace(), full.log2_scale);
    ScaledComplex same = ScaledComplex::from_parts(diag.mantissa.block(0, d2, d2, d2).trace(), diag.log2_scale);
    return std::make_pair(all, same);
  };
  auto [plain_all, plain_same] = run(false);
  auto [tw_all, tw_same] = run(true);
  AdjointorTwist r;
  r.value = (tw_all / plain_all).value();
  r.diagonal = (tw_same / plain_all).value();
  r.off_diagonal = r.value - r.diagonal;
  (void)plain_same;
  return r;
}

DimerTwist twist_on_dimer_angle(int n, int l, double ell, int flavor) {
  if (l < 2 || l % 2 != 0) throw std::invalid_argument("twist_on_dimer: l must be even");
  auto m = model(n);
  Matrix f = m->factor(Chirality::L, Chirality::L);
  Complex norm = (f * f).trace();
  Complex prod(1.0);
  for (int k = 1; k <= l / 2; ++k) {
    Matrix a = conj_ket_side(f, ket_phase_diag(n, flavor, ell * (2 * k - 1), Chirality::L));
    Matrix b = conj_ket_side(f, ket_phase_diag(n, flavor, ell * (2 * k), Chirality::L));
    prod *= (a * b).trace() / norm;
  }
  DimerTwist r;
  r.transfer = prod;
  double s2 = std::pow(std::sin(ell / 2.0), 2);
  r.closed_form = std::pow(1.0 - 4.0 / (n + 1.0) * s2, l / 2);
  r.fermionic = std::pow(1.0 - 4.0 * (n - 1.0) / (n * n) * s2, l / 2);
  return r;
}

DimerTwist twist_on_dimer(int n, int l, int flavor) { return twist_on_dimer_angle(n, l, 2.0 * kPi / l, flavor); }

}  // namespace vbsq
