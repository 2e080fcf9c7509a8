// Quadratic-form generators (gamma, L, Ltilde, C) with explicit subspace
// domains: delta and series composition, adjoint, identity, defect checks,
// and pointwise residuals of the composition identities. The bounded theory
// embeds via bounded_to_form.
#pragma once

#include <complex>

#include "qstrotter/ito_algebra.hpp"
#include "qstrotter/numkit.hpp"

namespace qst::form {

using numkit::CMatrix;
using numkit::Complex;
using numkit::CVector;
using numkit::Tolerance;

// A form generator on h + (k tensor h). The drift-side domain D is the span
// of domain_frame (orthonormal columns, m of them); the noise summand
// k tensor h is always full. gamma is the matrix of the drift form in frame
// coordinates; L, Ltilde eat frame coordinates and emit noise vectors; C acts
// on the noise summand (C itself, not C - I). The evaluation is
//   G[(u, zeta)] = gamma[x] - (<zeta, L x> + <Ltilde x, zeta>
//                              + <zeta, (C - I) zeta>),   x = frame* u.
// m = 0 (empty domain) is legal.
struct QuadForm {
  int dim_h = 0;
  int dim_k = 0;
  CMatrix domain_frame;  // dim_h x m
  CMatrix gamma;         // m x m
  CMatrix L;             // dim_k*dim_h x m
  CMatrix Ltilde;        // dim_k*dim_h x m
  CMatrix C;             // dim_k*dim_h x dim_k*dim_h

  void validate() const;

  Eigen::Index domain_dim() const { return domain_frame.cols(); }
  Eigen::Index noise_dim() const {
    return static_cast<Eigen::Index>(dim_k) * dim_h;
  }
};

// Argument (u; zeta) with u in ambient h coordinates; u must lie in the
// domain of whichever form evaluates it.
struct FormVector {
  CVector u;
  CVector zeta;
};

// Identity element: full domain, (0, 0, 0, I).
QuadForm qf_identity(int dim_h, int dim_k);

// Bridge from the bounded theory: full domain, gamma = -K, Ltilde = M*.
// The only place sign conventions between the two layers are touched.
QuadForm bounded_to_form(const ito::BlockGenerator& f);

// Quadratic evaluation G[xi], and the sesquilinear extension G(xi, eta)
// (conjugate-linear in xi). Throws domain_error if an argument leaves D.
Complex qf_eval(const QuadForm& g, const FormVector& xi);
Complex qf_eval(const QuadForm& g, const FormVector& xi, const FormVector& eta);

// Adjoint: gamma*, L and Ltilde swapped, C*; same domain.
QuadForm qf_adjoint(const QuadForm& g);

// Delta composition and the series product. The result lives on the domain
// intersection, computed via kernel_basis on the stacked complementary
// projectors; an empty intersection is legal.
QuadForm qf_delta(const QuadForm& a, const QuadForm& b);
QuadForm qf_series(const QuadForm& a, const QuadForm& b);

// Value-linear combination a*Ga + b*Gb on the domain intersection. The
// Ltilde slot scales by the conjugate coefficient because it enters the
// evaluation antilinearly.
QuadForm qf_linear_combine(Complex a, const QuadForm& ga, Complex b,
                           const QuadForm& gb);

// Series-product inverse; requires invertible C.
QuadForm qf_inverse(const QuadForm& g);

// Matrix of the evaluation on (frame coordinates) + (k tensor h):
// [[gamma, -Ltilde*], [-L, -(C - I)]].
CMatrix form_matrix(const QuadForm& g);
// Same, compressed to the given frame; its columns must span a subspace of
// the domain.
CMatrix form_matrix_on(const QuadForm& g, const CMatrix& frame);
// Matrix of (x, zeta) -> (x, L R x + C zeta) in the coordinates of `frame`,
// the argument shift through which the composition identities exchange
// factors.
CMatrix shift_matrix_on(const QuadForm& g, const CMatrix& frame);

// Pointwise deviation in the three-factor expansion: the triple series
// product evaluated at xi, against the outer pair plus the middle form on
// shifted arguments. xi must lie in the triple intersection.
double qf_triple_identity_residual(const QuadForm& a, const QuadForm& b,
                                   const QuadForm& c, const FormVector& xi);

// Pointwise deviation in the identity tying G*oG to GoG*:
// (G*oG)[xi] = (GoG*)[(I + shift) xi] + ||defect-shift xi||^2.
double qf_defect_exchange_residual(const QuadForm& g, const FormVector& xi);

// Whether G*oG - 2 beta Delta_perp >= 0 on D + (k tensor h).
bool qf_defect_check(const QuadForm& g, double beta, const Tolerance& tol = {});

// Drift-form diagnostics for the holomorphic class: Re gamma + beta >= 0 on
// D, and |Im gamma[u]| <= alpha (Re gamma[u] + ||u||^2) on D. They only
// report whether the given constants work.
bool qf_drift_accretive(const QuadForm& g, double beta,
                        const Tolerance& tol = {});
bool qf_drift_semisectorial(const QuadForm& g, double alpha,
                            const Tolerance& tol = {});

}  // namespace qst::form
