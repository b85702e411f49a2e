#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "vbsq/model_observables.hpp"
#include "vbsq/rng.hpp"

namespace vbsq {

enum class ErrorKind { parity, pauli, virtual_unitary, physical_unitary };

// One located error. Sites are one based. For pauli, (j, k) != (0, 0) are the
// X and Z powers; matrix holds V (N x N) or U ((N^2-1) x (N^2-1)) otherwise.
struct ErrorEvent {
  int site = 1;
  ErrorKind kind = ErrorKind::parity;
  int j = 0;
  int k = 0;
  Matrix matrix;
};

ErrorEvent parity_error(int site);
ErrorEvent pauli_error(int site, int j, int k);
ErrorEvent virtual_unitary_error(int site, const Matrix& v);
ErrorEvent physical_unitary_error(int site, const Matrix& u);

// Physical action in the Gell-Mann basis. Throws on bad dimensions, a
// non-unitary matrix or the (0, 0) pauli label.
Matrix physical_op(const Model& m, const ErrorEvent& e);

// Adjoint of the ordered product E_k ... E_1 of an event list, as a list.
std::vector<ErrorEvent> adjoint_events(int n, const std::vector<ErrorEvent>& events);

// u in the {L, R} basis, u(a, b) = <a| E |b>, stored as mantissa * 2^log2_scale.
struct LogicalMatrix {
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  std::int64_t log2_scale = 0;
  Complex s0;
  std::array<Complex, 3> s_vec{};
  double delta = 0.0;
  // true when (1/(N-1))^L >= 1e-12, so the codewords are not orthogonal enough
  bool finite_size_warning = false;

  Eigen::Matrix2cd value() const { return u * std::ldexp(1.0, static_cast<int>(log2_scale)); }
};

LogicalMatrix make_logical(const std::array<ScaledComplex, 4>& entries, bool warn);

// Ring contractors for the four (bra, ket) backgrounds of one (N, L).
// Const methods are safe to share between threads.
class LogicalContext {
 public:
  LogicalContext(int n, int l);

  int n() const { return n_; }
  int l() const { return l_; }
  const Model& model() const { return *model_; }

  // <bra| E |ket> / tr(M^L); events on one site compose in list order.
  ScaledComplex entry(Chirality bra, Chirality ket, const std::vector<ErrorEvent>& events) const;
  LogicalMatrix logical(const std::vector<ErrorEvent>& events) const;
  // Parity events as transposed ket tensors instead of the physical operator.
  ScaledComplex entry_parity_transposed(Chirality bra, Chirality ket, const std::vector<int>& sites) const;

 private:
  int n_;
  int l_;
  std::shared_ptr<const Model> model_;
  std::array<std::optional<RingContractor>, 4> rings_;
  ScaledComplex norm_;
};

LogicalMatrix effective_logical(int n, int l, const std::vector<ErrorEvent>& events);

struct SweepRecord {
  int n_sun = 0;
  int l = 0;
  std::uint64_t seed = 0;
  std::vector<ErrorEvent> events;
  LogicalMatrix logical;
  double wall_time = 0.0;  // seconds
};

SweepRecord record_events(const LogicalContext& ctx, std::uint64_t seed, std::vector<ErrorEvent> events);

// Four entries of u for a single event list.
Eigen::Matrix2cd detection_matrix(int n, int l, const std::vector<ErrorEvent>& events);

struct CorrectionCheck {
  Complex c_ll;
  Complex c_rr;
  Complex c_lr;
  Complex c_rl;
  bool correctable = false;  // diagonals equal to 1e-10 relative, off-diagonals vanish
};

// Entries of E_i^dag E_j between codewords.
CorrectionCheck correction_condition_check(int n, int l, const std::vector<ErrorEvent>& events_i,
                                           const std::vector<ErrorEvent>& events_j);
// P_C E P_C = e P_C test for a single product.
CorrectionCheck detection_check(int n, int l, const std::vector<ErrorEvent>& events);

// Random element of {Pi, P^{jk}} at the given site, uniform over the N^2 choices.
ErrorEvent random_discrete_error(int n, int site, Rng& rng, bool pauli_only = false);
// count distinct sites from 1..l, uniformly without replacement.
std::vector<int> random_sites(int l, int count, Rng& rng);

struct SweepPoint {
  int l = 0;
  int errors = 0;
  double median_log10_delta = 0.0;
  std::vector<double> log10_delta;  // per sample
};

struct KneeResult {
  int l = 0;
  int critical_n = 0;  // 0 when the threshold is never crossed
  std::vector<SweepPoint> points;
};

struct SweepOptions {
  int samples = 20;
  double delta_threshold = -3.0;
  int n_step = 1;
  double max_fraction = 1.0;  // errors scanned up to max_fraction * L
  bool pauli_only = false;
  std::uint64_t seed = 1;
  int threads = 1;
};

std::vector<KneeResult> critical_error_sweep(int n, const std::vector<int>& l_list, const SweepOptions& opt);

// Least squares slope of critical_n against L.
double knee_slope(const std::vector<KneeResult>& knees);

struct ParityScaling {
  double diag = 0.0;   // mean <G|Pi(r)|G>, G = L
  double cross = 0.0;  // mean |<L|Pi(r)|R>|
  double log_diag = 0.0;   // mean log |<L|Pi(r)|L>|
  double log_cross = 0.0;  // mean log |<L|Pi(r)|R>|
};

ParityScaling parity_flip_scaling(int n, int r, int l, int samples, std::uint64_t seed, const LogicalContext* ctx = nullptr);
double parity_diag_law(int n, int r, int l);
double parity_cross_law(int n, int r, int l, double eta = 0.5);

struct TwoUnitary {
  double alpha = 0.0;
  Complex beta;
  Complex measured;
};

// V at site 1 and U at site r+2, i.e. r sites in between.
TwoUnitary two_unitary_overlap(const Matrix& v, const Matrix& u, int r, int l);

// Violation of the correction condition: (|u_LL - u_RR| + |u_LR| + |u_RL|) / mean(|u_LL|, |u_RR|).
double violation_measure(const LogicalMatrix& u);

struct DilutePoint {
  int count = 0;
  double median_violation = 0.0;
  std::vector<double> violations;
};

// Haar SU(N) virtual unitaries placed from a random start with spacing
// max(1, min_distance). Throws if count * (min_distance + 1) > l.
std::vector<DilutePoint> dilute_error_sweep(int n, int l, const std::vector<int>& counts, int min_distance,
                                            int samples, std::uint64_t seed, int threads = 1);

int approx_distance(int l, int r);

// 1 - |<psi|u psi>|^2 / |u psi|^2 for psi = (|L> + |R>)/sqrt(2), two virtual
// unitaries r sites apart.
double two_unitary_infidelity(const Matrix& v, const Matrix& u, int r, int l);

struct ApproxEcResult {
  Complex c_a;
  Complex c_b;
  double off_diagonal = 0.0;
  double difference = 0.0;
  int r = 0;  // sites strictly between the closest pair of error sites
  double epsilon = 0.0;  // (N^2-1)^{-r}
  double constant = 0.0; // difference / epsilon
};

ApproxEcResult approx_ec_check(int n, int l, const std::vector<ErrorEvent>& events_i,
                               const std::vector<ErrorEvent>& events_j);

enum class EnergyTerm { h, h2, H };
enum class Side { left, right };

// <G|E^dag T_b E|G> on the bond left or right of the first error site, from
// the transfer chain. Uses a ring of length l.
double energy_syndrome(int n, const ErrorEvent& error, EnergyTerm term, Side side, Chirality c = Chirality::L,
                       int l = kTransferLength);
// Same for an event list and an explicit bond b (sites b, b+1).
double bond_energy_with_errors(int n, const std::vector<ErrorEvent>& events, int bond, EnergyTerm term,
                               Chirality c = Chirality::L, int l = kTransferLength);

double pauli_syndrome_closed_form(int n, EnergyTerm term);
// Virtual unitary with identity component c0 = tr(V)/N; sum |c_l|^2 = 1 - |c0|^2.
double virtual_syndrome_closed_form(int n, Complex c0, EnergyTerm term);

}  // namespace vbsq
