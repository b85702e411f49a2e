#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "vbsq/scaled.hpp"
#include "vbsq/sun_algebra.hpp"

namespace vbsq {

enum class Chirality { L, R };

inline Chirality opposite(Chirality c) { return c == Chirality::L ? Chirality::R : Chirality::L; }
inline const char* to_string(Chirality c) { return c == Chirality::L ? "L" : "R"; }

// A^i = sqrt(2/N) t^i for L, sqrt(2/N) conj(t^i) for R.
std::vector<Matrix> site_tensors(const SunBasis& basis, Chirality c);

// Ket tensors mixed by a physical operator: A'^j = sum_i O_ji A^i.
std::vector<Matrix> apply_physical(const std::vector<Matrix>& tensors, const Matrix& op);

struct FactorSpec {
  Chirality bra = Chirality::L;
  Chirality ket = Chirality::L;
  std::optional<Matrix> phys_op;
  std::optional<Matrix> virt_left;
  std::optional<Matrix> virt_right;
};

struct TransferFactor {
  Matrix matrix;
  FactorSpec provenance;
};

Matrix kron(const Matrix& a, const Matrix& b);

// sum_i ket^i (x) conj(bra^i)
Matrix factor_from_tensors(const std::vector<Matrix>& ket, const std::vector<Matrix>& bra);

TransferFactor transfer_factor(const SunBasis& basis, const FactorSpec& spec);

// Plain factors without insertions.
Matrix plain_factor(const SunBasis& basis, Chirality bra, Chirality ket);

ScaledComplex chain_trace(const std::vector<TransferFactor>& factors);
ScaledComplex chain_trace(const std::vector<Matrix>& factors);

struct Overlap {
  ScaledComplex scaled;
  Complex value;
  double log_abs = 0.0;
  double phase = 0.0;
  bool representable = true;
};

Overlap make_overlap(const ScaledComplex& ratio);

// chain_trace(factors) / tr(M^l)
Overlap normalized_overlap(const SunBasis& basis, const std::vector<TransferFactor>& factors, int l);

// A factor replacing the background on sites site .. site+width-1.
struct Insertion {
  int site = 1;
  Matrix factor;
  int width = 1;
};

// Ring of l sites where every site carries the same background factor except
// a sparse set of insertions. Powers of the background are cached, so a chain
// with k insertions costs O(k) small matrix products.
class RingContractor {
 public:
  RingContractor(Matrix background, int l);

  int length() const { return l_; }
  const Matrix& background() const { return background_; }
  const ScaledMatrix& power(int g) const { return powers_.at(g); }
  ScaledComplex background_trace() const { return powers_[l_].trace(); }

  // insertions: (site in 1..l, factor replacing the background at that site).
  // Sites must be distinct; they may be given in any order.
  ScaledComplex trace(std::vector<std::pair<int, Matrix>> insertions) const;
  // Spans must not overlap and must not wrap past site l.
  ScaledComplex trace_spans(std::vector<Insertion> insertions) const;

 private:
  Matrix background_;
  int l_;
  std::vector<ScaledMatrix> powers_;
};

}  // namespace vbsq
