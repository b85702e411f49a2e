#include "vbsq/error_correction.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "vbsq/parallel.hpp"

namespace vbsq {

namespace {

double n2m1(int n) { return static_cast<double>(n) * n - 1.0; }

struct DiscreteOps {
  Matrix parity;
  std::vector<Matrix> pauli;  // index j * n + k
};

const DiscreteOps& discrete_ops(const Model& m) {
  static std::mutex mu;
  static std::map<int, DiscreteOps> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m.n);
  if (it != cache.end()) return it->second;
  DiscreteOps ops;
  ops.parity = parity_operator(m.n).matrix_gellmann.cast<Complex>();
  ops.pauli.resize(m.n * m.n);
  for (int j = 0; j < m.n; ++j)
    for (int k = 0; k < m.n; ++k)
      if (j || k) ops.pauli[j * m.n + k] = adjoint_rep(m.basis, heisenberg_weyl(m.n, j, k).matrix);
  return cache.emplace(m.n, std::move(ops)).first->second;
}

int index(Chirality bra, Chirality ket) { return 2 * (bra == Chirality::R) + (ket == Chirality::R); }

const std::array<std::pair<Chirality, Chirality>, 4> kPairs = {
    {{Chirality::L, Chirality::L}, {Chirality::L, Chirality::R}, {Chirality::R, Chirality::L}, {Chirality::R, Chirality::R}}};

// Composite physical operator per site, events composed in list order.
std::map<int, Matrix> site_ops(const Model& m, int l, const std::vector<ErrorEvent>& events) {
  std::map<int, Matrix> ops;
  for (const auto& e : events) {
    if (e.site < 1 || e.site > l) throw std::invalid_argument("error event site out of range");
    Matrix p = physical_op(m, e);
    auto it = ops.find(e.site);
    if (it == ops.end())
      ops.emplace(e.site, std::move(p));
    else
      it->second = p * it->second;
  }
  return ops;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

int ring_gap(int a, int b, int l) {
  int d = std::abs(a - b) % l;
  return std::min(d, l - d);
}

}  // namespace

ErrorEvent parity_error(int site) { return ErrorEvent{site, ErrorKind::parity, 0, 0, {}}; }

ErrorEvent pauli_error(int site, int j, int k) { return ErrorEvent{site, ErrorKind::pauli, j, k, {}}; }

ErrorEvent virtual_unitary_error(int site, const Matrix& v) {
  return ErrorEvent{site, ErrorKind::virtual_unitary, 0, 0, v};
}

ErrorEvent physical_unitary_error(int site, const Matrix& u) {
  return ErrorEvent{site, ErrorKind::physical_unitary, 0, 0, u};
}

Matrix physical_op(const Model& m, const ErrorEvent& e) {
  int d = m.dim();
  switch (e.kind) {
    case ErrorKind::parity:
      return discrete_ops(m).parity;
    case ErrorKind::pauli: {
      int j = ((e.j % m.n) + m.n) % m.n, k = ((e.k % m.n) + m.n) % m.n;
      if (j == 0 && k == 0) throw std::invalid_argument("pauli error (0,0) is the identity");
      return discrete_ops(m).pauli[j * m.n + k];
    }
    case ErrorKind::virtual_unitary:
      if (e.matrix.rows() != m.n || e.matrix.cols() != m.n)
        throw std::invalid_argument("virtual unitary must be N x N");
      if (!is_unitary(e.matrix)) throw std::invalid_argument("virtual error is not unitary");
      return adjoint_rep(m.basis, e.matrix);
    case ErrorKind::physical_unitary:
      if (e.matrix.rows() != d || e.matrix.cols() != d)
        throw std::invalid_argument("physical unitary must be (N^2-1) x (N^2-1)");
      if (!is_unitary(e.matrix)) throw std::invalid_argument("physical error is not unitary");
      return e.matrix;
  }
  throw std::invalid_argument("unknown error kind");
}

std::vector<ErrorEvent> adjoint_events(int n, const std::vector<ErrorEvent>& events) {
  auto m = model(n);
  std::vector<ErrorEvent> out;
  for (auto it = events.rbegin(); it != events.rend(); ++it)
    out.push_back(physical_unitary_error(it->site, physical_op(*m, *it).adjoint()));
  return out;
}

LogicalMatrix make_logical(const std::array<ScaledComplex, 4>& e, bool warn) {
  std::int64_t top = INT64_MIN;
  for (const auto& x : e)
    if (!x.is_zero()) top = std::max(top, x.log2_scale);
  LogicalMatrix r;
  r.finite_size_warning = warn;
  if (top == INT64_MIN) {
    r.u.setZero();
    return r;
  }
  // keep plain values when they are representable
  r.log2_scale = top < -900 || top > 900 ? top : 0;
  auto rel = [&](const ScaledComplex& x) {
    return x.is_zero() ? Complex(0.0) : x.mantissa * std::ldexp(1.0, static_cast<int>(x.log2_scale - r.log2_scale));
  };
  r.u << rel(e[0]), rel(e[1]), rel(e[2]), rel(e[3]);
  const auto& u = r.u;
  r.s0 = u(0, 0) + u(1, 1);
  r.s_vec = {u(0, 1) + u(1, 0), Complex(0.0, 1.0) * (u(0, 1) - u(1, 0)), u(0, 0) - u(1, 1)};
  double sn = std::sqrt(std::norm(r.s_vec[0]) + std::norm(r.s_vec[1]) + std::norm(r.s_vec[2]));
  r.delta = std::abs(r.s0) > 0.0 ? sn / std::abs(r.s0) : INFINITY;
  return r;
}

LogicalContext::LogicalContext(int n, int l) : n_(n), l_(l), model_(vbsq::model(n)) {
  if (l < 2) throw std::invalid_argument("LogicalContext: l must be >= 2");
  for (const auto& [b, k] : kPairs) rings_[index(b, k)].emplace(model_->factor(b, k), l);
  norm_ = rings_[0]->background_trace();
}

ScaledComplex LogicalContext::entry(Chirality bra, Chirality ket, const std::vector<ErrorEvent>& events) const {
  const RingContractor& r = *rings_[index(bra, ket)];
  std::vector<std::pair<int, Matrix>> ins;
  for (const auto& [site, op] : site_ops(*model_, l_, events)) ins.emplace_back(site, model_->factor(bra, ket, &op));
  return (ins.empty() ? r.background_trace() : r.trace(std::move(ins))) / norm_;
}

LogicalMatrix LogicalContext::logical(const std::vector<ErrorEvent>& events) const {
  std::array<ScaledComplex, 4> e;
  for (const auto& [b, k] : kPairs) e[index(b, k)] = entry(b, k, events);
  return make_logical(e, std::pow(1.0 / (n_ - 1.0), l_) >= 1e-12);
}

ScaledComplex LogicalContext::entry_parity_transposed(Chirality bra, Chirality ket, const std::vector<int>& sites) const {
  const RingContractor& r = *rings_[index(bra, ket)];
  std::map<int, int> count;
  for (int s : sites) {
    if (s < 1 || s > l_) throw std::invalid_argument("parity site out of range");
    ++count[s];
  }
  std::vector<Matrix> kt = model_->tensors(ket);
  for (auto& a : kt) a.transposeInPlace();
  Matrix flipped = factor_from_tensors(kt, model_->tensors(bra));
  std::vector<std::pair<int, Matrix>> ins;
  for (const auto& [s, c] : count)
    if (c % 2) ins.emplace_back(s, flipped);
  return (ins.empty() ? r.background_trace() : r.trace(std::move(ins))) / norm_;
}

LogicalMatrix effective_logical(int n, int l, const std::vector<ErrorEvent>& events) {
  return LogicalContext(n, l).logical(events);
}

SweepRecord record_events(const LogicalContext& ctx, std::uint64_t seed, std::vector<ErrorEvent> events) {
  auto t0 = std::chrono::steady_clock::now();
  SweepRecord r;
  r.n_sun = ctx.n();
  r.l = ctx.l();
  r.seed = seed;
  r.logical = ctx.logical(events);
  r.events = std::move(events);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

Eigen::Matrix2cd detection_matrix(int n, int l, const std::vector<ErrorEvent>& events) {
  return effective_logical(n, l, events).value();
}

namespace {

CorrectionCheck check_from(const Eigen::Matrix2cd& u) {
  CorrectionCheck c;
  c.c_ll = u(0, 0);
  c.c_lr = u(0, 1);
  c.c_rl = u(1, 0);
  c.c_rr = u(1, 1);
  double scale = std::max(std::abs(c.c_ll), std::abs(c.c_rr));
  c.correctable = std::abs(c.c_ll - c.c_rr) <= 1e-10 * scale && std::abs(c.c_lr) <= 1e-10 * scale &&
                  std::abs(c.c_rl) <= 1e-10 * scale;
  return c;
}

}  // namespace

CorrectionCheck correction_condition_check(int n, int l, const std::vector<ErrorEvent>& events_i,
                                           const std::vector<ErrorEvent>& events_j) {
  std::vector<ErrorEvent> prod = events_j;
  for (auto& e : adjoint_events(n, events_i)) prod.push_back(std::move(e));
  return check_from(effective_logical(n, l, prod).u);
}

CorrectionCheck detection_check(int n, int l, const std::vector<ErrorEvent>& events) {
  return check_from(effective_logical(n, l, events).u);
}

ErrorEvent random_discrete_error(int n, int site, Rng& rng, bool pauli_only) {
  std::uniform_int_distribution<int> pick(pauli_only ? 1 : 0, n * n - 1);
  int c = pick(rng);
  if (c == 0) return parity_error(site);
  // c = j * n + k runs over all non-identity labels
  return pauli_error(site, c / n, c % n);
}

std::vector<int> random_sites(int l, int count, Rng& rng) {
  if (count > l || count < 0) throw std::invalid_argument("random_sites: count exceeds ring length");
  std::vector<int> all(l);
  std::iota(all.begin(), all.end(), 1);
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<int> pick(i, l - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  all.resize(count);
  return all;
}

std::vector<KneeResult> critical_error_sweep(int n, const std::vector<int>& l_list, const SweepOptions& opt) {
  if (opt.samples < 1) throw std::invalid_argument("critical_error_sweep: samples must be >= 1");
  if (opt.n_step < 1) throw std::invalid_argument("critical_error_sweep: n_step must be >= 1");
  std::vector<KneeResult> out;
  std::vector<std::unique_ptr<LogicalContext>> ctx;
  struct Task {
    std::size_t li, pi;
    int sample;
  };
  std::vector<Task> tasks;
  for (std::size_t li = 0; li < l_list.size(); ++li) {
    int l = l_list[li];
    ctx.push_back(std::make_unique<LogicalContext>(n, l));
    KneeResult k;
    k.l = l;
    int top = std::min(l, static_cast<int>(std::floor(opt.max_fraction * l)));
    for (int e = 1; e <= top; e += opt.n_step) {
      SweepPoint p;
      p.l = l;
      p.errors = e;
      p.log10_delta.assign(opt.samples, 0.0);
      for (int s = 0; s < opt.samples; ++s) tasks.push_back({li, k.points.size(), s});
      k.points.push_back(std::move(p));
    }
    out.push_back(std::move(k));
  }
  parallel_for(tasks.size(), opt.threads, [&](std::size_t t) {
    const Task& task = tasks[t];
    SweepPoint& p = out[task.li].points[task.pi];
    Rng rng = task_rng(opt.seed, {static_cast<std::uint64_t>(p.l), static_cast<std::uint64_t>(p.errors),
                                  static_cast<std::uint64_t>(task.sample)});
    std::vector<ErrorEvent> ev;
    for (int s : random_sites(p.l, p.errors, rng)) ev.push_back(random_discrete_error(n, s, rng, opt.pauli_only));
    double d = ctx[task.li]->logical(ev).delta;
    p.log10_delta[task.sample] = d > 0.0 ? std::log10(d) : -320.0;
  });
  for (auto& k : out) {
    for (auto& p : k.points) {
      p.median_log10_delta = median(p.log10_delta);
      if (k.critical_n == 0 && p.median_log10_delta > opt.delta_threshold) k.critical_n = p.errors;
    }
  }
  return out;
}

double knee_slope(const std::vector<KneeResult>& knees) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& k : knees) {
    if (k.critical_n == 0) continue;
    sx += k.l;
    sy += k.critical_n;
    sxx += double(k.l) * k.l;
    sxy += double(k.l) * k.critical_n;
    ++m;
  }
  if (m < 2) throw std::invalid_argument("knee_slope: need two knees");
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

ParityScaling parity_flip_scaling(int n, int r, int l, int samples, std::uint64_t seed, const LogicalContext* ctx) {
  if (samples < 1) throw std::invalid_argument("parity_flip_scaling: samples must be >= 1");
  std::unique_ptr<LogicalContext> own;
  if (!ctx || ctx->n() != n || ctx->l() != l) {
    own = std::make_unique<LogicalContext>(n, l);
    ctx = own.get();
  }
  ParityScaling p;
  for (int s = 0; s < samples; ++s) {
    Rng rng = task_rng(seed, {static_cast<std::uint64_t>(l), static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(s)});
    std::vector<ErrorEvent> ev;
    for (int site : random_sites(l, r, rng)) ev.push_back(parity_error(site));
    ScaledComplex d = ctx->entry(Chirality::L, Chirality::L, ev);
    ScaledComplex x = ctx->entry(Chirality::L, Chirality::R, ev);
    p.diag += d.value().real() / samples;
    p.cross += x.abs() / samples;
    p.log_diag += d.log_abs() / samples;
    p.log_cross += x.log_abs() / samples;
  }
  return p;
}

double parity_diag_law(int n, int r, int l) {
  return std::pow(1.0 / (n + 1.0), std::min<double>(r, 1.5 * l - r));
}

double parity_cross_law(int n, int r, int l, double eta) {
  return std::pow(1.0 / (n + 1.0), std::min<double>(eta * l + r, static_cast<double>(l) - r));
}

TwoUnitary two_unitary_overlap(const Matrix& v, const Matrix& u, int r, int l) {
  int n = static_cast<int>(v.rows());
  if (r < 0 || r + 2 > l) throw std::invalid_argument("two_unitary_overlap: bad separation");
  LogicalContext ctx(n, l);
  TwoUnitary t;
  t.measured = ctx.entry(Chirality::L, Chirality::L, {virtual_unitary_error(1, v), virtual_unitary_error(r + 2, u)}).value();
  double nn = static_cast<double>(n) * n;
  double u0 = std::norm(u.trace() / static_cast<double>(n)), v0 = std::norm(v.trace() / static_cast<double>(n));
  t.alpha = (nn * u0 - 1.0) * (nn * v0 - 1.0) / (n2m1(n) * n2m1(n));
  t.beta = t.measured - t.alpha;
  return t;
}

double violation_measure(const LogicalMatrix& m) {
  const auto& u = m.u;
  double den = 0.5 * (std::abs(u(0, 0)) + std::abs(u(1, 1)));
  return (std::abs(u(0, 0) - u(1, 1)) + std::abs(u(0, 1)) + std::abs(u(1, 0))) / den;
}

std::vector<DilutePoint> dilute_error_sweep(int n, int l, const std::vector<int>& counts, int min_distance,
                                            int samples, std::uint64_t seed, int threads) {
  if (samples < 1) throw std::invalid_argument("dilute_error_sweep: samples must be >= 1");
  int spacing = std::max(1, min_distance);
  for (int c : counts)
    if (c < 1 || static_cast<long>(c) * (min_distance + 1) > l)
      throw std::invalid_argument("dilute_error_sweep: infeasible packing");
  LogicalContext ctx(n, l);
  std::vector<DilutePoint> out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out[i].count = counts[i];
    out[i].violations.assign(samples, 0.0);
  }
  parallel_for(counts.size() * samples, threads, [&](std::size_t t) {
    std::size_t ci = t / samples;
    int s = static_cast<int>(t % samples);
    int count = counts[ci];
    Rng rng = task_rng(seed, {static_cast<std::uint64_t>(l), static_cast<std::uint64_t>(count),
                              static_cast<std::uint64_t>(min_distance), static_cast<std::uint64_t>(s)});
    int start = std::uniform_int_distribution<int>(1, l)(rng);
    std::vector<ErrorEvent> ev;
    for (int k = 0; k < count; ++k) ev.push_back(virtual_unitary_error((start - 1 + k * spacing) % l + 1, haar_unitary(n, rng)));
    out[ci].violations[s] = violation_measure(ctx.logical(ev));
  });
  for (auto& p : out) p.median_violation = median(p.violations);
  return out;
}

int approx_distance(int l, int r) {
  if (r < 1) throw std::invalid_argument("approx_distance: r must be >= 1");
  return 2 * ((l - 1) / (r + 1)) + 1;
}

double two_unitary_infidelity(const Matrix& v, const Matrix& u, int r, int l) {
  int n = static_cast<int>(v.rows());
  Eigen::Matrix2cd m = LogicalContext(n, l).logical({virtual_unitary_error(1, v), virtual_unitary_error(r + 2, u)}).u;
  // row index is the bra: the image of |b> has components m(a, b)
  Eigen::Vector2cd psi(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
  Eigen::Vector2cd phi = m * psi;
  Eigen::Vector2cd perp = phi - psi * psi.dot(phi);
  return perp.squaredNorm() / phi.squaredNorm();
}

ApproxEcResult approx_ec_check(int n, int l, const std::vector<ErrorEvent>& events_i,
                               const std::vector<ErrorEvent>& events_j) {
  CorrectionCheck c = correction_condition_check(n, l, events_i, events_j);
  ApproxEcResult r;
  r.c_a = c.c_ll;
  r.c_b = c.c_rr;
  r.off_diagonal = std::max(std::abs(c.c_lr), std::abs(c.c_rl));
  r.difference = std::abs(c.c_ll - c.c_rr);
  std::vector<int> sites;
  for (const auto* list : {&events_i, &events_j})
    for (const auto& e : *list) sites.push_back(e.site);
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  r.r = l;
  for (std::size_t a = 0; a < sites.size(); ++a)
    for (std::size_t b = a + 1; b < sites.size(); ++b) r.r = std::min(r.r, ring_gap(sites[a], sites[b], l) - 1);
  if (sites.size() >= 2) {
    r.epsilon = std::pow(n2m1(n), -r.r);
    r.constant = r.difference / r.epsilon;
  }
  return r;
}

double bond_energy_with_errors(int n, const std::vector<ErrorEvent>& events, int bond, EnergyTerm term, Chirality c,
                               int l) {
  if (bond < 1 || bond > l) throw std::invalid_argument("bond out of range");
  auto m = model(n);
  auto ops = site_ops(*m, l, events);
  int sa = bond, sb = bond % l + 1;
  auto dress = [&](int site, const Matrix& x) -> Matrix {
    auto it = ops.find(site);
    return it == ops.end() ? x : Matrix(it->second.adjoint() * x * it->second);
  };
  auto value = [&](const TwoSiteOperator& op) {
    TwoSiteOperator d;
    for (const auto& [a, b] : op) d.emplace_back(dress(sa, a), dress(sb, b));
    // E^dag E = 1 away from the bond, so the bond can sit at site 1
    RingContractor ring(m->factor(c, c), l);
    return (ring.trace_spans(std::vector<Insertion>{{1, bond_block(*m, c, c, d), 2}}) / ring.background_trace())
        .value()
        .real();
  };
  HamiltonianCoeffs k = hamiltonian_coeffs(n);
  switch (term) {
    case EnergyTerm::h:
      return value(bond_h(*m));
    case EnergyTerm::h2:
      return value(bond_h2(*m));
    case EnergyTerm::H:
      return k.j1 * value(bond_h(*m)) + k.j2 * value(bond_h2(*m)) + k.j0;
  }
  return 0.0;
}

double energy_syndrome(int n, const ErrorEvent& error, EnergyTerm term, Side side, Chirality c, int l) {
  int bond = side == Side::right ? error.site : (error.site - 2 + l) % l + 1;
  return bond_energy_with_errors(n, {error}, bond, term, c, l);
}

double pauli_syndrome_closed_form(int n, EnergyTerm term) {
  double q2 = n2m1(n) * n2m1(n);
  switch (term) {
    case EnergyTerm::h:
      return std::pow(n, 3) / (2.0 * q2);
    case EnergyTerm::h2:
      return n * n * (3.0 * n * n - 2.0) / (4.0 * q2);
    case EnergyTerm::H:
      return std::pow(n, 3) * (n * n + 1.0) / (3.0 * q2);
  }
  return 0.0;
}

double virtual_syndrome_closed_form(int n, Complex c0, EnergyTerm term) {
  double q = n2m1(n), a = std::norm(c0), rest = 1.0 - a;
  double h = -a * std::pow(n, 3) / (2.0 * q) + std::pow(n, 3) / (2.0 * q * q) * rest;
  double h2 = 3.0 * n * n / (4.0 * q) + n * n * a / 4.0 + n * n / (4.0 * q * q) * rest;
  HamiltonianCoeffs k = hamiltonian_coeffs(n);
  switch (term) {
    case EnergyTerm::h:
      return h;
    case EnergyTerm::h2:
      return h2;
    case EnergyTerm::H:
      return k.j1 * h + k.j2 * h2 + k.j0;
  }
  return 0.0;
}

}  // namespace vbsq
