#include "vbsq/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "vbsq/error_correction.hpp"
#include "vbsq/twist.hpp"

namespace vbsq {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<int> range(int a, int b, int step) {
  std::vector<int> v;
  for (int x = a; x <= b; x += step) v.push_back(x);
  return v;
}

// Typed access to the parameter object with field-named errors.
class Params {
 public:
  explicit Params(const Json& j) : j_(j) {}

  int integer(const std::string& key, int lo, int hi = 1 << 30) const {
    const Json& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
    long long x = v.get<long long>();
    if (x < lo || x > hi) throw ConfigError(key, "value " + std::to_string(x) + " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(x);
  }

  double real(const std::string& key, double lo = -1e300, double hi = 1e300) const {
    const Json& v = at(key);
    if (!v.is_number()) throw ConfigError(key, "expected a number");
    double x = v.get<double>();
    if (!(x >= lo && x <= hi)) throw ConfigError(key, "value out of range");
    return x;
  }

  bool flag(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
    return v.get<bool>();
  }

  std::vector<int> integers(const std::string& key, int lo, int hi = 1 << 30) const {
    const Json& v = at(key);
    if (!v.is_array() || v.empty()) throw ConfigError(key, "expected a non-empty list of integers");
    std::vector<int> out;
    for (const auto& e : v) {
      if (!e.is_number_integer()) throw ConfigError(key, "expected a non-empty list of integers");
      long long x = e.get<long long>();
      if (x < lo || x > hi) throw ConfigError(key, "entry " + std::to_string(x) + " out of range");
      out.push_back(static_cast<int>(x));
    }
    return out;
  }

 private:
  const Json& at(const std::string& key) const {
    auto it = j_.find(key);
    if (it == j_.end()) throw ConfigError(key, "missing");
    return *it;
  }
  const Json& j_;
};

struct Experiment {
  Json defaults;
  std::function<void(const ExperimentConfig&, ExperimentResult&)> run;
  std::function<void(const Params&)> validate;
};

const std::map<std::string, Experiment>& registry();

Cell cnum(double x) { return Cell{x}; }
Cell cint(long long x) { return Cell{static_cast<std::int64_t>(x)}; }
Cell cstr(std::string s) { return Cell{std::move(s)}; }

void add_complex(std::vector<Cell>& row, Complex z) {
  row.push_back(z.real());
  row.push_back(z.imag());
}

template <class F>
auto timed(ExperimentResult& r, const std::string& name, F&& f) {
  auto t0 = Clock::now();
  if constexpr (std::is_void_v<decltype(f())>) {
    f();
    r.stages.push_back({name, seconds_since(t0)});
  } else {
    auto v = f();
    r.stages.push_back({name, seconds_since(t0)});
    return v;
  }
}

std::string plot_header(const std::string& xlabel, const std::string& ylabel) {
  return "set datafile separator ','\nset key autotitle columnhead\nset xlabel '" + xlabel + "'\nset ylabel '" + ylabel +
         "'\n";
}

// fig3 / fig_sa1 --------------------------------------------------------------

void knee_rows(int n, const std::vector<KneeResult>& knees, ExperimentResult& r, bool with_n) {
  for (const auto& k : knees)
    for (const auto& p : k.points)
      for (std::size_t s = 0; s < p.log10_delta.size(); ++s) {
        std::vector<Cell> row;
        if (with_n) row.push_back(cint(n));
        row.push_back(cint(k.l));
        row.push_back(cint(p.errors));
        row.push_back(cint(static_cast<long long>(s)));
        row.push_back(cnum(std::pow(10.0, p.log10_delta[s])));
        row.push_back(cnum(p.log10_delta[s]));
        r.table.rows.push_back(std::move(row));
      }
}

Json knee_summary(const std::vector<KneeResult>& knees) {
  Json j = Json::object();
  Json list = Json::array();
  for (const auto& k : knees) list.push_back({{"L", k.l}, {"critical_n", k.critical_n}});
  j["knees"] = list;
  try {
    j["slope"] = knee_slope(knees);
  } catch (const std::invalid_argument&) {
    j["slope"] = nullptr;
  }
  return j;
}

SweepOptions sweep_options(const ExperimentConfig& cfg) {
  Params p(cfg.params);
  SweepOptions o;
  o.samples = p.integer("samples", 1);
  o.delta_threshold = p.real("delta_threshold");
  o.n_step = p.integer("n_step", 1);
  o.max_fraction = p.real("max_fraction", 0.0, 1.0);
  o.seed = cfg.seed;
  o.threads = cfg.threads;
  return o;
}

void run_fig3(const ExperimentConfig& cfg, ExperimentResult& r) {
  Params p(cfg.params);
  int n = p.integer("n_sun", 2, 8);
  SweepOptions o = sweep_options(cfg);
  o.pauli_only = p.flag("pauli_only");
  std::vector<int> ls = p.integers("l_list", 3, 100000);
  auto knees = timed(r, "sweep", [&] { return critical_error_sweep(n, ls, o); });
  r.table.columns = {"L", "n", "sample", "delta", "log10_delta"};
  knee_rows(n, knees, r, false);
  r.summary = knee_summary(knees);
  std::string plot = plot_header("n", "log10 delta") + "plot ";
  for (std::size_t i = 0; i < ls.size(); ++i)
    plot += std::string(i ? ", \\\n     " : "") + "'results.csv' using ($1==" + std::to_string(ls[i]) +
            " ? $2 : 1/0):5 with points title 'L=" + std::to_string(ls[i]) + "'";
  r.plot = plot + "\n";
}

void run_fig_sa1(const ExperimentConfig& cfg, ExperimentResult& r) {
  Params p(cfg.params);
  SweepOptions o = sweep_options(cfg);
  std::vector<int> ns = p.integers("n_list", 2, 8);
  std::vector<int> ls = p.integers("l_list", 3, 100000);
  r.table.columns = {"N", "L", "n", "sample", "delta", "log10_delta"};
  Json per_n = Json::object();
  for (int n : ns) {
    auto knees = timed(r, "sweep_N" + std::to_string(n), [&] { return critical_error_sweep(n, ls, o); });
    knee_rows(n, knees, r, true);
    per_n[std::to_string(n)] = knee_summary(knees);
  }
  r.summary["by_N"] = per_n;
  std::string plot = plot_header("n", "log10 delta") + "plot ";
  bool first = true;
  for (int n : ns)
    for (int l : ls) {
      plot += std::string(first ? "" : ", \\\n     ") + "'results.csv' using (($1==" + std::to_string(n) + " && $2==" +
              std::to_string(l) + ") ? $3 : 1/0):6 with points title 'N=" + std::to_string(n) + " L=" + std::to_string(l) + "'";
      first = false;
    }
  r.plot = plot + "\n";
}

// table_sa1 -------------------------------------------------------------------

void run_table_sa1(const ExperimentConfig& cfg, ExperimentResult& r) {
  Params p(cfg.params);
  int n = p.integer("n_sun", 2, 6);
  int l = p.integer("l", 4);
  int site = p.integer("site", 1, l - 1);
  int gap = p.integer("two_unitary_gap", 1, l - 1);
  int d = n * n - 1;
  Rng rng = task_rng(cfg.seed, {0x5a1});
  Matrix u1 = haar_unitary(d, rng), u2 = haar_unitary(d, rng), u3 = haar_unitary(d, rng);
  Matrix v1 = haar_unitary(n, rng), v2 = haar_unitary(n, rng);
  LogicalContext ctx(n, l);
  std::vector<Eigen::Matrix2cd> cols;
  timed(r, "entries", [&] {
    cols.push_back(ctx.logical({physical_unitary_error(site, u1)}).value());
    cols.push_back(ctx.logical({physical_unitary_error(site, u2), physical_unitary_error((site - 1 + gap) % l + 1, u3)}).value());
    cols.push_back(ctx.logical({virtual_unitary_error(site, v1), virtual_unitary_error(site + 1, v2)}).value());
  });
  r.table.columns = {"element", "single_physical_re", "single_physical_im", "two_physical_re", "two_physical_im",
                     "nn_virtual_re", "nn_virtual_im"};
  const std::array<std::pair<const char*, std::pair<int, int>>, 4> el = {
      {{"u_LL", {0, 0}}, {"u_RR", {1, 1}}, {"u_LR", {0, 1}}, {"u_RL", {1, 0}}}};
  for (const auto& [name, ij] : el) {
    std::vector<Cell> row{cstr(name)};
    for (const auto& c : cols) add_complex(row, c(ij.first, ij.second));
    r.table.rows.push_back(std::move(row));
  }
  Json s;
  Complex tr = u1.trace() / static_cast<double>(d);
  s["single_physical_trU_over_dim"] = {tr.real(), tr.imag()};
  s["single_physical_residual"] = std::max(std::abs(cols[0](0, 0) - tr), std::abs(cols[0](1, 1) - tr));
  s["nn_virtual_conjugation_residual"] = std::abs(cols[2](1, 1) - std::conj(cols[2](0, 0)));
  r.summary = s;
  r.plot = "# table experiment: no figure\nset datafile separator ','\n";
}

// fig_ranu --------------------------------------------------------------------

void validate_ranu(const Params& p) {
  int l = p.integer("l", 4);
  for (int c : p.integers("counts", 1))
    for (int md : p.integers("min_distances", 0))
      if (static_cast<long>(c) * (md + 1) > l) throw ConfigError("counts", "count " + std::to_string(c) + " does not fit with min_distance " + std::to_string(md));
}

void run_fig_ranu(const ExperimentConfig& cfg, ExperimentResult& r) {
  Params p(cfg.params);
  int n = p.integer("n_sun", 2, 6);
  int l = p.integer("l", 4);
  int samples = p.integer("samples", 1);
  std::vector<int> counts = p.integers("counts", 1);
  std::vector<int> mds = p.integers("min_distances", 0);
  r.table.columns = {"min_distance", "count", "sample", "violation", "log10_violation"};
  Json med = Json::object();
  for (int md : mds) {
    auto pts = timed(r, "min_distance_" + std::to_string(md),
                     [&] { return dilute_error_sweep(n, l, counts, md, samples, cfg.seed, cfg.threads); });
    Json m = Json::array();
    for (const auto& pt : pts) {
      for (int s = 0; s < samples; ++s) {
        double v = pt.violations[s];
        r.table.rows.push_back({cint(md), cint(pt.count), cint(s), cnum(v), cnum(v > 0 ? std::log10(v) : -320.0)});
      }
      m.push_back({{"count", pt.count}, {"median_violation", pt.median_violation}});
    }
    med[std::to_string(md)] = m;
  }
  r.summary["medians"] = med;
  r.summary["approx_distance"] = Json::object();
  for (int md : mds)
    if (md >= 1) r.summary["approx_distance"][std::to_string(md)] = approx_distance(l, md);
  std::string plot = plot_header("number of errors", "log10 violation") + "plot ";
  for (std::size_t i = 0; i < mds.size(); ++i)
    plot += std::string(i ? ", \\\n     " : "") + "'results.csv' using ($1==" + std::to_string(mds[i]) +
            " ? $2 : 1/0):5 with points title 'min distance " + std::to_string(mds[i]) + "'";
  r.plot = plot + "\n";
}

// closed_forms ----------------------------------------------------------------

void run_closed_forms(const ExperimentConfig& cfg, ExperimentResult& r) {
  Params p(cfg.params);
  std::vector<int> ns = p.integers("n_list", 2, 6);
  int l = p.integer("l", 10);
  r.table.columns = {"quantity", "N", "closed_form", "transfer", "residual"};
  double worst = 0.0;
  auto add = [&](const std::string& q, int n, double a, double b) {
    double res = std::abs(a - b) / std::max(1.0, std::abs(a));
    worst = std::max(worst, res);
    r.table.rows.push_back({cstr(q), cint(n), cnum(a), cnum(b), cnum(res)});
  };
  timed(r, "closed_forms", [&] {
    for (int n : ns) {
      add("energy_h", n, energy_h(n, Route::closed_form), energy_h(n, Route::transfer, l));
      add("energy_h2", n, energy_h2(n, Route::closed_form), energy_h2(n, Route::transfer, l));
      add("energy_H", n, energy_bond_H(n, Route::closed_form), energy_bond_H(n, Route::transfer, l));
      for (int rr = 0; rr <= 5; ++rr)
        add("correlation_r" + std::to_string(rr), n, correlation(n, 1, 1 + rr, 0, 0, l, Route::closed_form),
            correlation(n, 1, 1 + rr, 0, 0, l, Route::transfer));
      for (int rr = 0; rr <= 3; ++rr)
        add("adjointor_overlap_r" + std::to_string(rr), n, adjointor_overlap(n, 1, 1 + rr, 0, 0, Route::closed_form, l),
            adjointor_overlap(n, 1, 1 + rr, 0, 0, Route::transfer, l));
      AdjointorEnergy ac = adjointor_energy(n, Route::closed_form), at = adjointor_energy(n, Route::transfer, 0, l);
      add("adjointor_h", n, ac.h, at.h);
      add("adjointor_h2", n, ac.h2, at.h2);
      add("adjointor_H", n, ac.H, at.H);
      const std::array<std::pair<const char*, DimerTerm>, 6> dt = {{{"dimer_I_h", DimerTerm::case_I_h},
                                                                     {"dimer_I_h2", DimerTerm::case_I_h2},
                                                                     {"dimer_I_H", DimerTerm::case_I_H},
                                                                     {"dimer_II_h", DimerTerm::case_II_h},
                                                                     {"dimer_II_h2", DimerTerm::case_II_h2},
                                                                     {"dimer_II_H", DimerTerm::case_II_H}}};
      for (const auto& [name, t] : dt) add(name, n, dimer_energy(n, t, Route::closed_form), dimer_energy(n, t, Route::transfer));
      for (int gl : {5, 10, 50})
        add("log_abs_ground_overlap_L" + std::to_string(gl), n, std::log(std::abs(ground_overlap_exact(n, gl))),
            ground_overlap(n, gl).log_abs);
      for (EnergyTerm t : {EnergyTerm::h, EnergyTerm::h2, EnergyTerm::H}) {
        const char* nm = t == EnergyTerm::h ? "pauli_syndrome_h" : t == EnergyTerm::h2 ? "pauli_syndrome_h2" : "pauli_syndrome_H";
        add(nm, n, pauli_syndrome_closed_form(n, t), energy_syndrome(n, pauli_error(5, 1, 0), t, Side::right, Chirality::L, l));
      }
      TwistSpec half;
      half.fraction = 0.5;
      Complex lim = twist_overlap_limit(n, half).on_L, cf = fractional_twist_closed_form(n, 0.5);
      add("half_twist_re", n, cf.real(), lim.real());
      add("half_twist_im", n, cf.imag(), lim.imag());
      add("parity_symmetry_residual", n, 0.0, verify_parity_symmetry(n).max_residual);
    }
  });
  r.summary["max_residual"] = worst;
  r.plot = plot_header("row", "log10 residual") + "set logscale y\nplot 'results.csv' using 0:5 with impulses title 'residual'\n";
}

// twist_scan ------------------------------------------------------------------

void run_twist_scan(const ExperimentConfig& cfg, ExperimentResult& r) {
  Params p(cfg.params);
  int n = p.integer("n_sun", 2, 8);
  int pts = p.integer("f_points", 2, 10001);
  int l0 = p.integer("l0", 8);
  int levels = p.integer("levels", 1, 12);
  int lf = p.integer("l_finite", 3);
  int flavor = p.integer("flavor", 1, n);
  r.table.columns = {"f", "on_L_re", "on_L_im", "on_R_re", "on_R_im", "closed_re", "closed_im", "residual",
                     "finite_L_re", "finite_L_im", "E_II", "E_c"};
  double worst = 0.0;
  timed(r, "scan", [&] {
    for (int i = 0; i < pts; ++i) {
      TwistSpec s;
      s.flavor = flavor;
      s.fraction = static_cast<double>(i) / (pts - 1);
      TwistResult lim = twist_overlap_limit(n, s, l0, levels);
      Complex cf = fractional_twist_closed_form(n, s.fraction);
      double res = std::abs(lim.on_L - cf);
      worst = std::max(worst, res);
      TwistEnergyCost e = twist_energy_cost(n, s.fraction, 0, flavor);
      std::vector<Cell> row{cnum(s.fraction)};
      add_complex(row, lim.on_L);
      add_complex(row, lim.on_R);
      add_complex(row, cf);
      row.push_back(res);
      add_complex(row, twist_overlap(n, lf, s).on_L);
      row.push_back(e.e2);
      row.push_back(e.ec);
      r.table.rows.push_back(std::move(row));
    }
  });
  TwistResult full = twist_overlap_limit(n, TwistSpec{}, l0, levels);
  r.summary["max_residual"] = worst;
  r.summary["full_twist_phase"] = std::arg(full.on_L);
  r.summary["logical_phase"] = logical_phase(full);
  r.plot = plot_header("Re <L|U(f)|L>", "Im <L|U(f)|L>") +
           "plot 'results.csv' using 2:3 with linespoints title 'transfer limit', \\\n     'results.csv' using 6:7 with lines title 'closed form'\n";
}

// energy_syndromes ------------------------------------------------------------

void run_energy_syndromes(const ExperimentConfig& cfg, ExperimentResult& r) {
  Params p(cfg.params);
  std::vector<int> ns = p.integers("n_list", 2, 6);
  int samples = p.integer("virtual_samples", 0);
  int l = p.integer("l", 10);
  r.table.columns = {"N", "error", "term", "side", "chirality", "measured", "closed_form", "residual"};
  double worst = 0.0;
  const std::array<std::pair<const char*, EnergyTerm>, 3> terms = {{{"h", EnergyTerm::h}, {"h2", EnergyTerm::h2}, {"H", EnergyTerm::H}}};
  auto add = [&](int n, const std::string& err, const char* term, Side side, Chirality c, double m, double cf) {
    double res = std::abs(m - cf);
    worst = std::max(worst, res);
    r.table.rows.push_back({cint(n), cstr(err), cstr(term), cstr(side == Side::left ? "left" : "right"), cstr(to_string(c)),
                            cnum(m), cnum(cf), cnum(res)});
  };
  timed(r, "syndromes", [&] {
    for (int n : ns) {
      for (auto [j, k] : pauli_basis_labels(n)) {
        ErrorEvent e = pauli_error(l / 2, j, k);
        std::string name = "pauli_" + std::to_string(j) + "_" + std::to_string(k);
        for (const auto& [tn, t] : terms)
          for (Side sd : {Side::left, Side::right})
            for (Chirality c : {Chirality::L, Chirality::R})
              add(n, name, tn, sd, c, energy_syndrome(n, e, t, sd, c, l), pauli_syndrome_closed_form(n, t));
      }
      Rng rng = task_rng(cfg.seed, {static_cast<std::uint64_t>(n), 0x5e});
      for (int s = 0; s < samples; ++s) {
        Matrix v = haar_unitary(n, rng);
        ErrorEvent e = virtual_unitary_error(l / 2, v);
        Complex c0 = v.trace() / static_cast<double>(n);
        for (const auto& [tn, t] : terms)
          for (Chirality c : {Chirality::L, Chirality::R})
            add(n, "virtual_" + std::to_string(s), tn, Side::left, c, energy_syndrome(n, e, t, Side::left, c, l),
                virtual_syndrome_closed_form(n, c0, t));
      }
    }
  });
  r.summary["max_residual"] = worst;
  r.plot = plot_header("row", "energy") +
           "plot 'results.csv' using 0:6 with points title 'measured', 'results.csv' using 0:7 with points title 'closed form'\n";
}

// scaling_laws ----------------------------------------------------------------

void run_scaling_laws(const ExperimentConfig& cfg, ExperimentResult& r) {
  Params p(cfg.params);
  int n = p.integer("n_sun", 2, 6);
  int l = p.integer("l", 4);
  int samples = p.integer("samples", 1);
  int r_max = p.integer("r_max", 0, l);
  double eta = p.real("eta", 0.0, 1.0);
  r.table.columns = {"r", "diag", "log_diag", "log_diag_law", "cross", "log_cross", "log_cross_law"};
  LogicalContext ctx(n, l);
  std::vector<double> rs, ld;
  timed(r, "parity", [&] {
    for (int k = 0; k <= r_max; ++k) {
      ParityScaling s = parity_flip_scaling(n, k, l, samples, cfg.seed, &ctx);
      r.table.rows.push_back({cint(k), cnum(s.diag), cnum(s.log_diag), cnum(std::log(parity_diag_law(n, k, l))), cnum(s.cross),
                              cnum(s.log_cross), cnum(std::log(parity_cross_law(n, k, l, eta)))});
      rs.push_back(k);
      ld.push_back(s.log_diag);
    }
  });
  // least squares slope on the branch r < 3L/4, away from the crossover
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < rs.size(); ++i)
    if (rs[i] >= 1 && rs[i] < 0.75 * l - 2) {
      sx += rs[i], sy += ld[i], sxx += rs[i] * rs[i], sxy += rs[i] * ld[i];
      ++m;
    }
  r.summary["diag_slope"] = m >= 2 ? Json((m * sxy - sx * sy) / (m * sxx - sx * sx)) : Json(nullptr);
  r.summary["expected_slope"] = -std::log(n + 1.0);
  std::size_t arg = 0;
  for (std::size_t i = 0; i < ld.size(); ++i)
    if (ld[i] < ld[arg]) arg = i;
  r.summary["crossover_r"] = static_cast<int>(rs[arg]);
  r.summary["expected_crossover_r"] = 0.75 * l;
  r.plot = plot_header("r", "log <G|Pi(r)|G>") +
           "plot 'results.csv' using 1:3 with points title 'measured', 'results.csv' using 1:4 with lines title 'law', \\\n"
           "     'results.csv' using 1:6 with points title 'cross', 'results.csv' using 1:7 with lines title 'cross law'\n";
}

const std::map<std::string, Experiment>& registry() {
  static const std::map<std::string, Experiment> reg = [] {
    std::map<std::string, Experiment> m;
    auto none = [](const Params&) {};
    m["fig3"] = {Json{{"n_sun", 3}, {"l_list", range(60, 200, 20)}, {"samples", 20}, {"delta_threshold", -3.0},
                      {"n_step", 1}, {"max_fraction", 0.75}, {"pauli_only", false}},
                 run_fig3, none};
    m["fig_sa1"] = {Json{{"n_list", {4, 5}}, {"l_list", {40, 60, 80, 100}}, {"samples", 10}, {"delta_threshold", -3.0},
                         {"n_step", 1}, {"max_fraction", 0.75}},
                    run_fig_sa1, none};
    m["table_sa1"] = {Json{{"n_sun", 3}, {"l", 200}, {"site", 100}, {"two_unitary_gap", 7}}, run_table_sa1, none};
    m["fig_ranu"] = {Json{{"n_sun", 3}, {"l", 2000}, {"counts", range(5, 50, 5)}, {"min_distances", {0, 10}}, {"samples", 10}},
                     run_fig_ranu, validate_ranu};
    m["closed_forms"] = {Json{{"n_list", {3, 4, 5}}, {"l", 200}}, run_closed_forms, none};
    m["twist_scan"] = {Json{{"n_sun", 3}, {"f_points", 11}, {"l0", 256}, {"levels", 5}, {"l_finite", 200}, {"flavor", 1}},
                       run_twist_scan, none};
    m["energy_syndromes"] = {Json{{"n_list", {3, 4, 5}}, {"virtual_samples", 20}, {"l", 60}}, run_energy_syndromes, none};
    m["scaling_laws"] = {Json{{"n_sun", 3}, {"l", 40}, {"samples", 200}, {"r_max", 40}, {"eta", 0.5}}, run_scaling_laws, none};
    return m;
  }();
  return reg;
}

std::string names_list() {
  std::string s;
  for (const auto& n : experiment_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

}  // namespace

std::vector<std::string> experiment_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

Json default_params(const std::string& experiment) {
  auto it = registry().find(experiment);
  if (it == registry().end()) throw ConfigError("experiment", "unknown experiment '" + experiment + "'; valid: " + names_list());
  return it->second.defaults;
}

ExperimentConfig config_from_json(const Json& in) {
  if (!in.is_object()) throw ConfigError("config", "expected a JSON object");
  const Json& j = in.contains("config") && in["config"].is_object() ? in["config"] : in;
  if (!j.contains("experiment") || !j["experiment"].is_string()) throw ConfigError("experiment", "missing experiment name; valid: " + names_list());
  ExperimentConfig cfg;
  cfg.experiment = j["experiment"].get<std::string>();
  cfg.params = default_params(cfg.experiment);
  for (const auto& [key, value] : j.items()) {
    if (key == "experiment") continue;
    if (key == "seed") {
      if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0))
        throw ConfigError("seed", "expected a non-negative integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "threads") {
      if (!value.is_number_integer() || value.get<long long>() < 1) throw ConfigError("threads", "expected a positive integer");
      cfg.threads = value.get<int>();
    } else if (key == "output_dir") {
      if (!value.is_string()) throw ConfigError("output_dir", "expected a path string");
      cfg.output_dir = value.get<std::string>();
    } else if (cfg.params.contains(key)) {
      cfg.params[key] = value;
    } else {
      throw ConfigError(key, "unknown field for experiment '" + cfg.experiment + "'");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config", "cannot read " + path.string());
  Json j;
  try {
    j = Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

Json config_echo(const ExperimentConfig& cfg) {
  Json j;
  j["experiment"] = cfg.experiment;
  j["seed"] = cfg.seed;
  for (const auto& [k, v] : cfg.params.items()) j[k] = v;
  return j;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  auto it = registry().find(cfg.experiment);
  if (it == registry().end()) throw ConfigError("experiment", "unknown experiment '" + cfg.experiment + "'; valid: " + names_list());
  Params p(cfg.params);
  it->second.validate(p);
  ExperimentResult r;
  try {
    it->second.run(cfg, r);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("parameters", e.what());
  }
  return r;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_cell(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  return std::get<std::string>(c);
}

std::string csv_header(const Table& t) {
  std::string s;
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  return s + "\n";
}

std::string csv_row(const std::vector<Cell>& row) {
  std::string s;
  for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + format_cell(row[i]);
  return s + "\n";
}

std::string format_csv(const Table& t) {
  std::string s = csv_header(t);
  for (const auto& r : t.rows) s += csv_row(r);
  return s;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json make_manifest(const ExperimentConfig& cfg, const ExperimentResult& r, double wall_seconds) {
  Json m;
  m["artifact"] = "vbsq";
  m["version"] = kArtifactVersion;
  m["config"] = config_echo(cfg);
  m["run"] = {{"threads", cfg.threads}, {"output_dir", cfg.output_dir}};
  Json rows = Json::array();
  std::string body;
  for (const auto& row : r.table.rows) {
    std::string line = csv_row(row);
    rows.push_back(hex64(fnv1a(line)));
    body += line;
  }
  m["columns"] = r.table.columns;
  m["row_count"] = r.table.rows.size();
  m["body_checksum"] = hex64(fnv1a(body));
  m["row_checksums"] = rows;
  m["summary"] = r.summary;
  Json st = Json::array();
  for (const auto& s : r.stages) st.push_back({{"stage", s.name}, {"wall_seconds", s.seconds}});
  m["wall_times"] = st;
  m["wall_seconds"] = wall_seconds;
  return m;
}

int run_to_directory(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec || !fs::is_directory(cfg.output_dir)) {
    err << "output_dir: cannot create " << cfg.output_dir << "\n";
    return 2;
  }
  auto t0 = Clock::now();
  ExperimentResult r;
  try {
    r = run_experiment(cfg);
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return 2;
  }
  double wall = seconds_since(t0);
  fs::path dir(cfg.output_dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    f << text;
    f.close();
    if (!f) {
      err << "output_dir: cannot write " << (dir / name).string() << "\n";
      return false;
    }
    return true;
  };
  if (!write("results.csv", format_csv(r.table)) || !write("manifest.json", make_manifest(cfg, r, wall).dump(2) + "\n") ||
      !write("plot.gp", r.plot))
    return 2;
  out << cfg.experiment << ": " << r.table.rows.size() << " rows in " << format_double(wall) << " s -> "
      << (dir / "results.csv").string() << "\n";
  return 0;
}

}  // namespace vbsq
