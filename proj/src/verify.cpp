#include "vbsq/verify.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include "vbsq/error_correction.hpp"
#include "vbsq/experiments.hpp"
#include "vbsq/twist.hpp"

namespace vbsq {

namespace {

struct Collector {
  std::vector<CheckResult> out;

  void close(const std::string& name, double got, double want, double tol, bool relative = false) {
    double scale = relative ? std::max(std::abs(want), 1e-300) : 1.0;
    double res = std::abs(got - want) / scale;
    std::ostringstream d;
    d << "got " << format_double(got) << " want " << format_double(want);
    out.push_back({name, std::isfinite(res) && res <= tol, res, tol, d.str()});
  }

  void truth(const std::string& name, bool ok, const std::string& detail) { out.push_back({name, ok, ok ? 0.0 : 1.0, 0.0, detail}); }

  // Exceptions in one check are reported as its failure.
  void guarded(const std::string& name, const std::function<void()>& f) {
    try {
      f();
    } catch (const std::exception& e) {
      truth(name, false, std::string("threw: ") + e.what());
    }
  }
};

std::string tag(int n) { return "N" + std::to_string(n); }
std::string tag(int n, int l) { return tag(n) + "_L" + std::to_string(l); }

void algebra_checks(Collector& c, const std::vector<int>& ns) {
  for (int n : ns) {
    c.guarded("algebra.normalization_" + tag(n), [&] {
      SunBasis b = gell_mann_basis(n);
      double worst = 0.0;
      for (int a = 0; a < b.dim(); ++a)
        for (int s = 0; s < b.dim(); ++s) worst = std::max(worst, std::abs((b[a] * b[s]).trace() - (a == s ? 0.5 : 0.0)));
      c.close("algebra.normalization_" + tag(n), worst, 0.0, 1e-12);
    });
    c.guarded("algebra.pauli_unitary_" + tag(n), [&] {
      bool ok = true;
      for (auto [j, k] : pauli_basis_labels(n)) ok = ok && is_unitary(heisenberg_weyl(n, j, k).matrix);
      c.truth("algebra.pauli_unitary_" + tag(n), ok, "X^j Z^k unitary for all labels");
    });
    c.guarded("algebra.parity_symmetry_" + tag(n), [&] {
      ParityReport r = verify_parity_symmetry(n);
      c.close("algebra.parity_symmetry_" + tag(n), r.max_residual, 0.0, 1e-10);
    });
  }
}

void overlap_checks(Collector& c, const std::vector<int>& ns, const VerifyOptions& opt) {
  for (int n : ns)
    for (int l : {5, 7, 12}) {
      std::string name = "overlap.ground_" + tag(n, l);
      c.guarded(name, [&] {
        Matrix f = model(n)->factor(Chirality::L, Chirality::R);
        if (opt.mutate_lr_sign) f = -f;
        c.close(name, ground_overlap(n, l, &f).value.real(), ground_overlap_exact(n, l), 1e-9, true);
      });
    }
}

void energy_checks(Collector& c, const std::vector<int>& ns) {
  for (int n : ns) {
    c.guarded("energy.h_" + tag(n), [&] { c.close("energy.h_" + tag(n), energy_h(n, Route::transfer), energy_h(n, Route::closed_form), 1e-10); });
    c.guarded("energy.h2_" + tag(n),
              [&] { c.close("energy.h2_" + tag(n), energy_h2(n, Route::transfer), energy_h2(n, Route::closed_form), 1e-10); });
    c.guarded("energy.H_" + tag(n), [&] {
      c.close("energy.H_" + tag(n), energy_bond_H(n, Route::transfer, kTransferLength, Chirality::R),
              energy_bond_H(n, Route::closed_form), 1e-10);
    });
    for (int r = 1; r <= 3; ++r) {
      std::string name = "correlation." + tag(n) + "_r" + std::to_string(r);
      c.guarded(name, [&] {
        c.close(name, correlation(n, 1, 1 + r, 0, 0, kTransferLength, Route::transfer),
                correlation(n, 1, 1 + r, 0, 0, kTransferLength, Route::closed_form), 1e-10);
      });
    }
  }
}

void dense_checks(Collector& c, bool fast) {
  std::vector<std::pair<int, int>> cases = {{2, 4}, {3, 4}};
  if (!fast) cases.push_back({3, 6});
  for (auto [n, l] : cases) {
    std::string name = "dense.bond_h_" + tag(n, l);
    c.guarded(name, [&] {
      auto m = model(n);
      Vector psi = dense_state_oracle(m->basis, l, Chirality::L).amplitudes;
      Vector hpsi = apply_two_site(psi, m->dim(), l, 1, bond_h(*m));
      c.close(name, inner(psi, hpsi).real(), energy_h(n, Route::transfer, l), 1e-10);
    });
  }
}

void twist_checks(Collector& c, const std::vector<int>& ns) {
  for (int n : ns) {
    std::string name = "twist.full_phase_" + tag(n);
    c.guarded(name, [&] {
      TwistResult r = twist_overlap_limit(n, TwistSpec{});
      c.close(name, std::abs(r.on_L - std::polar(1.0, 2.0 * kPi / n)), 0.0, 1e-6);
    });
  }
}

void syndrome_checks(Collector& c, const std::vector<int>& ns) {
  for (int n : ns)
    for (auto [t, tn] : {std::pair{EnergyTerm::h, "h"}, std::pair{EnergyTerm::h2, "h2"}}) {
      std::string name = "syndrome.pauli_" + std::string(tn) + "_" + tag(n);
      c.guarded(name, [&] {
        c.close(name, energy_syndrome(n, pauli_error(5, 1, 1), t, Side::right, Chirality::L, 60), pauli_syndrome_closed_form(n, t),
                1e-10);
      });
    }
}

void code_checks(Collector& c, bool fast) {
  c.guarded("code.parity_diag_law_N3", [&] {
    int l = 24;
    LogicalContext ctx(3, l);
    double worst = 0.0;
    for (int r : {2, 5, 9}) {
      ParityScaling s = parity_flip_scaling(3, r, l, fast ? 4 : 16, 11, &ctx);
      worst = std::max(worst, std::abs(s.log_diag - std::log(parity_diag_law(3, r, l))));
    }
    c.close("code.parity_diag_law_N3", worst, 0.0, 1e-8);
  });
  c.guarded("code.sweep_thread_invariance", [&] {
    SweepOptions o;
    o.samples = 3;
    o.max_fraction = 0.5;
    o.n_step = 4;
    o.seed = 5;
    auto a = critical_error_sweep(3, {16, 24}, o);
    o.threads = 3;
    auto b = critical_error_sweep(3, {16, 24}, o);
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i)
      for (std::size_t j = 0; same && j < a[i].points.size(); ++j) same = a[i].points[j].log10_delta == b[i].points[j].log10_delta;
    c.truth("code.sweep_thread_invariance", same, "1 and 3 threads give identical samples");
  });
}

}  // namespace

std::vector<CheckResult> run_verify(const VerifyOptions& opt) {
  Collector c;
  std::vector<int> ns = opt.fast ? std::vector<int>{3} : std::vector<int>{2, 3, 4, 5};
  algebra_checks(c, ns);
  overlap_checks(c, ns, opt);
  energy_checks(c, ns);
  dense_checks(c, opt.fast);
  twist_checks(c, opt.fast ? std::vector<int>{3} : std::vector<int>{3, 4});
  syndrome_checks(c, opt.fast ? std::vector<int>{3} : std::vector<int>{3, 4, 5});
  code_checks(c, opt.fast);
  return c.out;
}

int report_verify(const std::vector<CheckResult>& results, std::ostream& out) {
  std::size_t failed = 0;
  for (const auto& r : results) {
    out << (r.pass ? "PASS " : "FAIL ") << r.name << "  residual=" << format_double(r.residual) << "\n";
    failed += !r.pass;
  }
  out << results.size() - failed << "/" << results.size() << " checks passed\n";
  if (!failed) return 0;
  out << "failures:\n";
  std::size_t shown = 0;
  for (const auto& r : results)
    if (!r.pass && shown++ < 20) out << "  " << r.name << ": " << r.detail << " (tol " << format_double(r.tolerance) << ")\n";
  if (failed > 20) out << "  ... " << failed - 20 << " more\n";
  return 1;
}

}  // namespace vbsq
