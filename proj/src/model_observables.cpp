#include "vbsq/model_observables.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace vbsq {

HamiltonianCoeffs hamiltonian_coeffs(int n) { return {1.0, 2.0 / (3.0 * n), n / 3.0}; }

Model::Model(int n_)
    : n(n_),
      basis(gell_mann_basis(n_)),
      f(structure_constants(basis)),
      adj(adjoint_generators(f)),
      tensors_l(site_tensors(basis, Chirality::L)),
      tensors_r(site_tensors(basis, Chirality::R)) {}

Matrix Model::factor(Chirality bra, Chirality ket, const Matrix* op) const {
  if (!op) return factor_from_tensors(tensors(ket), tensors(bra));
  return factor_from_tensors(apply_physical(tensors(ket), *op), tensors(bra));
}

std::shared_ptr<const Model> model(int n) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const Model>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto m = std::make_shared<const Model>(n);
  cache.emplace(n, m);
  return m;
}

TwoSiteOperator bond_h(const Model& m) {
  TwoSiteOperator op;
  for (const auto& t : m.adj.T) op.push_back({t, t});
  return op;
}

TwoSiteOperator bond_h2(const Model& m) {
  TwoSiteOperator op;
  for (const auto& a : m.adj.T)
    for (const auto& b : m.adj.T) {
      Matrix ab = a * b;
      op.push_back({ab, ab});
    }
  return op;
}

Matrix two_site_matrix(const TwoSiteOperator& op) {
  Matrix out = Matrix::Zero(op[0].first.rows() * op[0].second.rows(), op[0].first.cols() * op[0].second.cols());
  for (const auto& [a, b] : op) out += kron(a, b);
  return out;
}

Matrix bond_block(const Model& m, Chirality bra, Chirality ket, const TwoSiteOperator& op, const Matrix* bond) {
  Eigen::Index d2 = m.n * m.n;
  Matrix out = Matrix::Zero(d2, d2);
  for (const auto& [a, b] : op) {
    Matrix left = m.factor(bra, ket, &a);
    if (bond) left = left * *bond;
    out += left * m.factor(bra, ket, &b);
  }
  return out;
}

namespace {

Matrix bond_generator(const Model& m, Chirality c, int alpha) {
  if (alpha < 0 || alpha >= m.dim()) throw std::invalid_argument("color index out of range");
  Matrix t = std::sqrt(2.0 * m.n) * m.basis[alpha];
  return c == Chirality::L ? t : Matrix(t.conjugate());
}

Matrix id(const Model& m) { return Matrix::Identity(m.n, m.n); }

RingContractor ring(const Model& m, Chirality c, int l) { return RingContractor(m.factor(c, c), l); }

double n2m1(int n) { return static_cast<double>(n) * n - 1.0; }

double bond_expectation(const Model& m, const TwoSiteOperator& op, int l, Chirality c) {
  if (l < 2) throw std::invalid_argument("bond expectation needs l >= 2");
  RingContractor r = ring(m, c, l);
  Matrix block = bond_block(m, c, c, op);
  return (r.trace_spans(std::vector<Insertion>{{1, block, 2}}) / r.background_trace()).value().real();
}

}  // namespace

Matrix adjointor_bond(const Model& m, Chirality c, int alpha_ket, int alpha_bra) {
  return kron(bond_generator(m, c, alpha_ket), bond_generator(m, c, alpha_bra).conjugate());
}

Matrix adjointor_ket_bond(const Model& m, Chirality c, int alpha) { return kron(bond_generator(m, c, alpha), id(m)); }

Matrix adjointor_bra_bond(const Model& m, Chirality c, int alpha) {
  return kron(id(m), bond_generator(m, c, alpha).conjugate());
}

double ground_overlap_exact(int n, int l) {
  double n2 = static_cast<double>(n) * n;
  double num = n * (n + 1) / 2.0 * std::pow((n - 1) / n2, l) + n * (n - 1) / 2.0 * std::pow(-(n + 1) / n2, l);
  double den = std::pow((n2 - 1) / n2, l) + (n2 - 1) * std::pow(-1.0 / n2, l);
  return num / den;
}

Overlap ground_overlap(int n, int l, const Matrix* lr_factor) {
  auto m = model(n);
  Matrix f = lr_factor ? *lr_factor : m->factor(Chirality::L, Chirality::R);
  return make_overlap(scaled_power(f, l).trace() / scaled_power(m->factor(Chirality::L, Chirality::L), l).trace());
}

double energy_h(int n, Route via, int l, Chirality c) {
  if (via == Route::closed_form) return -std::pow(n, 3) / (2.0 * n2m1(n));
  auto m = model(n);
  return bond_expectation(*m, bond_h(*m), l, c);
}

double energy_h2(int n, Route via, int l, Chirality c) {
  if (via == Route::closed_form) return static_cast<double>(n) * n * (n * n + 2.0) / (4.0 * n2m1(n));
  auto m = model(n);
  return bond_expectation(*m, bond_h2(*m), l, c);
}

double energy_bond_H(int n, Route via, int l, Chirality c) {
  HamiltonianCoeffs k = hamiltonian_coeffs(n);
  return k.j1 * energy_h(n, via, l, c) + k.j2 * energy_h2(n, via, l, c) + k.j0;
}

SiteMoments single_site_moments(int n, Route via, int l, Chirality c) {
  SiteMoments s;
  int d = n * n - 1;
  if (via == Route::closed_form) {
    s.per_color_mean.assign(d, 0.0);
    s.per_color_square.assign(d, n / n2m1(n));
  } else {
    auto m = model(n);
    RingContractor r = ring(*m, c, l);
    ScaledComplex z = r.background_trace();
    for (const auto& t : m->adj.T) {
      Matrix t2 = t * t;
      s.per_color_mean.push_back((r.trace({{1, m->factor(c, c, &t)}}) / z).value().real());
      s.per_color_square.push_back((r.trace({{1, m->factor(c, c, &t2)}}) / z).value().real());
    }
  }
  for (int a = 0; a < d; ++a) {
    s.polarization = std::max(s.polarization, std::abs(s.per_color_mean[a]));
    s.fluctuation += s.per_color_square[a] / d;
  }
  return s;
}

int ring_distance(int m, int n, int l) {
  int r = std::abs(n - m) % l;
  return std::min(r, l - r);
}

double correlation(int n_sun, int m, int n, int alpha, int beta, int l, Route via, Chirality c) {
  if (m < 1 || n < 1 || m > l || n > l) throw std::invalid_argument("correlation: site out of range");
  int d = n_sun * n_sun - 1;
  if (alpha < 0 || beta < 0 || alpha >= d || beta >= d) throw std::invalid_argument("correlation: color out of range");
  int r = ring_distance(m, n, l);
  if (via == Route::closed_form) {
    if (alpha != beta) return 0.0;
    if (r == 0) return n_sun / n2m1(n_sun);
    return std::pow(n_sun, 3) / (2.0 * n2m1(n_sun)) * std::pow(-1.0 / n2m1(n_sun), r);
  }
  auto md = model(n_sun);
  RingContractor ringc = ring(*md, c, l);
  const Matrix& ta = md->adj.T[alpha];
  const Matrix& tb = md->adj.T[beta];
  ScaledComplex num;
  if (m == n) {
    Matrix ab = ta * tb;
    num = ringc.trace({{m, md->factor(c, c, &ab)}});
  } else {
    num = ringc.trace({{m, md->factor(c, c, &ta)}, {n, md->factor(c, c, &tb)}});
  }
  return (num / ringc.background_trace()).value().real();
}

double adjointor_overlap(int n_sun, int m, int n, int alpha, int beta, Route via, int l, Chirality c) {
  if (m < 1 || n < 1 || m > l || n > l) throw std::invalid_argument("adjointor_overlap: bond out of range");
  if (via == Route::closed_form) {
    if (alpha != beta) return 0.0;
    return std::pow(-1.0 / n2m1(n_sun), ring_distance(m, n, l));
  }
  auto md = model(n_sun);
  RingContractor r = ring(*md, c, l);
  const Matrix& f = r.background();
  ScaledComplex num;
  if (m == n) {
    num = r.trace({{n, f * adjointor_bond(*md, c, alpha, beta)}});
  } else {
    num = r.trace({{n, f * adjointor_ket_bond(*md, c, alpha)}, {m, f * adjointor_bra_bond(*md, c, beta)}});
  }
  return (num / r.background_trace()).value().real();
}

AdjointorEnergy adjointor_energy(int n, Route via, int alpha, int l, Chirality c) {
  AdjointorEnergy e;
  HamiltonianCoeffs k = hamiltonian_coeffs(n);
  double q = n2m1(n);
  if (via == Route::closed_form) {
    e.h = std::pow(n, 3) / (2.0 * q * q);
    e.h2 = static_cast<double>(n) * n * (3.0 * n * n - 2.0) / (4.0 * q * q);
  } else {
    auto m = model(n);
    RingContractor r = ring(*m, c, l);
    Matrix x = adjointor_bond(*m, c, alpha, alpha);
    ScaledComplex norm = r.trace({{1, r.background() * x}});
    e.h = (r.trace_spans(std::vector<Insertion>{{1, bond_block(*m, c, c, bond_h(*m), &x), 2}}) / norm).value().real();
    e.h2 = (r.trace_spans(std::vector<Insertion>{{1, bond_block(*m, c, c, bond_h2(*m), &x), 2}}) / norm).value().real();
  }
  e.H = k.j1 * e.h + k.j2 * e.h2 + k.j0;
  return e;
}

namespace {

struct DimerParts {
  double i_h, i_h2, ii_h, ii_h2;
};

DimerParts compute_dimer_parts(int n, Route via) {
  double q = n2m1(n);
  if (via == Route::closed_form) return {-static_cast<double>(n), static_cast<double>(n) * n, 0.0, n * n / q};
  auto m = model(n);
  Matrix f = m->factor(Chirality::L, Chirality::L);
  Complex z = (f * f).trace();
  auto paired = [&](const TwoSiteOperator& op) { return (bond_block(*m, Chirality::L, Chirality::L, op).trace() / z).real(); };
  // across two independent pairs the expectation factorizes into single-site values
  auto split = [&](const TwoSiteOperator& op) {
    double s = 0.0;
    for (const auto& [a, b] : op) {
      Complex ea = (m->factor(Chirality::L, Chirality::L, &a) * f).trace() / z;
      Complex eb = (m->factor(Chirality::L, Chirality::L, &b) * f).trace() / z;
      s += (ea * eb).real();
    }
    return s;
  };
  TwoSiteOperator h = bond_h(*m), h2 = bond_h2(*m);
  return {paired(h), paired(h2), split(h), split(h2)};
}

DimerParts dimer_parts(int n, Route via) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, DimerParts> cache;
  std::pair<int, int> key{n, static_cast<int>(via)};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  DimerParts p = compute_dimer_parts(n, via);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, p);
  return p;
}

}  // namespace

double dimer_energy(int n, DimerTerm which, Route via, int l) {
  if (which == DimerTerm::total && (l <= 0 || l % 2 != 0)) throw std::invalid_argument("dimer_energy: total needs even l");
  HamiltonianCoeffs k = hamiltonian_coeffs(n);
  DimerParts p = dimer_parts(n, via);
  double big_i = k.j1 * p.i_h + k.j2 * p.i_h2 + k.j0;
  double big_ii = k.j1 * p.ii_h + k.j2 * p.ii_h2 + k.j0;
  switch (which) {
    case DimerTerm::case_I_h: return p.i_h;
    case DimerTerm::case_I_h2: return p.i_h2;
    case DimerTerm::case_I_H: return big_i;
    case DimerTerm::case_II_h: return p.ii_h;
    case DimerTerm::case_II_h2: return p.ii_h2;
    case DimerTerm::case_II_H: return big_ii;
    case DimerTerm::total: return 0.5 * l * (big_i + big_ii);
  }
  return 0.0;
}

ParityReport verify_parity_symmetry(int n) { return verify_parity_symmetry(n, parity_operator(n).matrix_gellmann); }

ParityReport verify_parity_symmetry(int n, const RealMatrix& pi_gellmann) {
  auto m = model(n);
  int d = m->dim();
  if (pi_gellmann.rows() != d || pi_gellmann.cols() != d) throw std::invalid_argument("parity matrix has wrong size");
  Matrix p = pi_gellmann.cast<Complex>();
  ParityReport rep;
  double gen_res = 0.0;
  std::vector<Matrix> e = e_basis_operators(n);
  int offdiag = n * (n - 1);
  for (int q = 0; q < d; ++q) {
    // partner: E_ij <-> E_ji, Cartan fixed
    int partner = q < offdiag ? (q % 2 == 0 ? q + 1 : q - 1) : q;
    Matrix lhs = p * adjoint_action(m->basis, e[q]) * p;
    Matrix rhs = -adjoint_action(m->basis, e[partner]);
    gen_res = std::max(gen_res, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  // (P x P)(sum T x T)(P x P) = sum PTP x PTP
  TwoSiteOperator conj_h;
  for (const auto& t : m->adj.T) {
    Matrix c = p * t * p;
    conj_h.push_back({c, c});
  }
  double h_res = (two_site_matrix(conj_h) - two_site_matrix(bond_h(*m))).cwiseAbs().maxCoeff();
  rep.max_residual = std::max(gen_res, h_res);
  rep.ok = rep.max_residual <= 1e-12;
  std::ostringstream os;
  os << "generator residual " << gen_res << ", hamiltonian residual " << h_res;
  rep.diagnostic = os.str();
  return rep;
}

}  // namespace vbsq
