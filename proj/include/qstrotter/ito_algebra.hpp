// Block generators on h + (k tensor h): the series-product monoid, its
// involution, Ito defects, growth bounds, class predicates, decompositions,
// the Gaussian/preserving split, unitary dilation and the triangular
// representation.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qstrotter/numkit.hpp"

namespace qst::ito {

using numkit::CMatrix;
using numkit::Complex;
using numkit::CVector;
using numkit::Tolerance;

// Stored blocks (K, M, L, C):
//   K : dim_h x dim_h                   drift
//   M : dim_h x dim_k*dim_h             annihilation couplings
//   L : dim_k*dim_h x dim_h             creation couplings
//   C : dim_k*dim_h x dim_k*dim_h       preservation (C itself, not C - I)
// Noise coordinates are k-major: index j*dim_h + a couples noise direction j
// with initial-space direction a.
struct BlockGenerator {
  int dim_h = 0;
  int dim_k = 0;
  CMatrix K, M, L, C;

  static BlockGenerator zero(int dim_h, int dim_k);
  void validate() const;

  Eigen::Index noise_dim() const {
    return static_cast<Eigen::Index>(dim_k) * dim_h;
  }
  Eigen::Index total_dim() const { return dim_h + noise_dim(); }

  // Full operator matrix [[K, M], [L, C - I]].
  CMatrix as_matrix() const;
  static BlockGenerator from_matrix(const CMatrix& m, int dim_h, int dim_k);
  double norm() const { return numkit::op_norm(as_matrix()); }
};

struct GeneratorClassReport {
  bool is_quasicontractive = false;
  std::optional<double> beta0;
  bool is_contractive = false;
  bool is_isometric = false;
  bool is_coisometric = false;
  bool is_unitary = false;
  bool is_gaussian = false;
  bool is_pure_gaussian = false;
  bool is_wholly_non_gaussian = false;
  bool is_pure_preservation = false;
  bool is_pure_drift = false;
  std::vector<double> defect_spectrum;  // eigenvalues of the Ito defect
};

// Three-factor series decomposition F = first * second * third (series
// product, left to right).
struct SeriesDecomposition {
  BlockGenerator first, second, third;
};

struct GaussianSplit {
  BlockGenerator non_gaussian_part;  // noise = span(basis_pres)
  BlockGenerator gaussian_part;      // noise = span(basis_gauss)
  CMatrix basis_pres;                // dim_k x p, orthonormal columns
  CMatrix basis_gauss;               // dim_k x g, orthonormal, p + g = dim_k
};

struct SampleOptions {
  double p_unitary_c = 0.25;  // chance of an exactly unitary C draw
  double p_zero_a = 0.25;     // chance of A = 0 (boundary of the defect)
};

// E_c = |c> tensor I_h, the injection h -> k tensor h along direction c.
CMatrix noise_injection(const CVector& c, int dim_h);

// Monoid structure.
BlockGenerator series(const BlockGenerator& f1, const BlockGenerator& f2);
BlockGenerator adjoint(const BlockGenerator& f);

// Hermitian matrices of F* ∘ F and F ∘ F* on h + (k tensor h).
CMatrix ito_defect(const BlockGenerator& f);
CMatrix co_defect(const BlockGenerator& f);

// Least beta with F - beta*Delta_perp contractive; nullopt when infeasible.
// Closed form via a generalized Schur complement.
std::optional<double> growth_bound(const BlockGenerator& f,
                                   const Tolerance& tol = {});
// Independent route: bisection on beta -> lambda_max(defect - 2 beta
// Delta_perp) <= 0. Kept available as a cross-check oracle.
std::optional<double> growth_bound_bisection(const BlockGenerator& f,
                                             const Tolerance& tol = {});

GeneratorClassReport classify(const BlockGenerator& f,
                              const Tolerance& tol = {});

// Residual of the identity tying the two defects:
// (Delta F + I)* (F ∘ F*) (Delta F + I) = F*∘F + (F*∘F) Delta (F*∘F).
double defect_exchange_residual(const BlockGenerator& f);

// F = drift * gaussian-unitary * contractive (left) or
// F = drift * contractive * gaussian-co-unitary (right); requires a finite
// growth bound.
SeriesDecomposition left_series_decomposition(const BlockGenerator& f,
                                              const Tolerance& tol = {});
SeriesDecomposition right_series_decomposition(const BlockGenerator& f,
                                               const Tolerance& tol = {});

// Concatenation over k1 + k2 and the two noise-space embeddings.
BlockGenerator concat(const BlockGenerator& f1, const BlockGenerator& f2);
BlockGenerator embed_left(const BlockGenerator& f, int extra_dim_k);
BlockGenerator embed_right(const BlockGenerator& f, int extra_dim_k);

// Compression onto a smaller noise space; frame has orthonormal columns.
BlockGenerator compress_noise(const BlockGenerator& f, const CMatrix& frame);

// Unique split into a wholly non-Gaussian and a maximal pure Gaussian part.
GaussianSplit gaussian_split(const BlockGenerator& f,
                             const Tolerance& tol = {});
// Undo the split: concat the parts and rotate the noise basis back.
BlockGenerator reassemble(const GaussianSplit& split);

// Unitary generator on noise k + k + C whose corner compression is F;
// requires F contractive.
BlockGenerator dilate_to_unitary(const BlockGenerator& f,
                                 const Tolerance& tol = {});

// Triangular representation on h + (k tensor h) + h and its involution.
CMatrix phi(const BlockGenerator& f);
CMatrix phi_star(const CMatrix& t, int dim_h, int dim_k);

// Series-product inverse; requires invertible C.
BlockGenerator inverse(const BlockGenerator& f);

// Seeded quasicontractive sampler with growth bound <= beta; identical seeds
// give byte-identical draws.
BlockGenerator sample_quasicontractive(int dim_h, int dim_k, double beta,
                                       std::uint64_t seed,
                                       const SampleOptions& opts = {});

// Product-formula constants.
double trotter_constant(const BlockGenerator& f1, const BlockGenerator& f2);
double trotter_constant_n(const std::vector<BlockGenerator>& fs);

}  // namespace qst::ito
