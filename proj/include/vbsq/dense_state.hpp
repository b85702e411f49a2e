#pragma once

#include <utility>
#include <vector>

#include "vbsq/transfer_engine.hpp"

namespace vbsq {

inline constexpr double kDenseCap = 1e7;

struct DenseState {
  int n = 0;
  int l = 0;
  Vector amplitudes;
  // norm after scaling by theta alone; differs from 1 by (N^2-1)(-1/(N^2-1))^L
  double theta_norm = 1.0;
};

// Site index 0 is the most significant digit of the amplitude index.
// tensors[s] holds the d matrices of site s+1.
Vector dense_mps(const std::vector<std::vector<Matrix>>& tensors);

// theta * tr(A^{i1} ... A^{iL}) with theta = (N^2/(N^2-1))^{L/2}, then
// rescaled to unit norm.
DenseState dense_state_oracle(const SunBasis& basis, int l, Chirality c);

// Apply a d x d operator to one site (1 based).
Vector apply_site(const Vector& psi, int d, int l, int site, const Matrix& op);

using TwoSiteOperator = std::vector<std::pair<Matrix, Matrix>>;

// Apply sum_k A_k (x) B_k to sites (site, site+1), ring-wrapped.
Vector apply_two_site(const Vector& psi, int d, int l, int site, const TwoSiteOperator& op);

inline Complex inner(const Vector& a, const Vector& b) { return a.dot(b); }

}  // namespace vbsq
