// Dense complex linear algebra primitives shared by every other module.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace qst::numkit {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Relative singular-value cutoff used by pseudo_inverse, kernel_basis and
// range_projector. One value, everywhere.
inline constexpr double kSingularThreshold = 1e-10;

struct Tolerance {
  double rel_eps = 1e-9;
  double abs_floor = 1e-12;
  double scaled(double scale) const {
    return std::max(rel_eps * scale, abs_floor);
  }
};

// Largest singular value; 0 for empty matrices.
double op_norm(const CMatrix& a);

// (A + A*)/2 and the norm of (A - A*)/2.
CMatrix hermitian_part(const CMatrix& a);
double anti_hermitian_norm(const CMatrix& a);

// Eigenvalues of the Hermitian part, ascending.
std::vector<double> hermitian_spectrum(const CMatrix& a);
double lambda_max(const CMatrix& hermitian);
double lambda_min(const CMatrix& hermitian);

// Scaling-and-squaring exponential with the degree-13 Pade approximant and a
// 1-norm based scaling parameter.
CMatrix mat_exp(const CMatrix& a);

// Principal square root of a positive semidefinite matrix. Eigenvalues in
// [-tol, 0) are clamped to zero; anything more negative throws.
CMatrix psd_sqrt(const CMatrix& a, const Tolerance& tol = {});

// Moore-Penrose pseudoinverse (SVD, kSingularThreshold relative cutoff).
CMatrix pseudo_inverse(const CMatrix& a);

// Orthonormal basis of ker(A), one column per direction.
CMatrix kernel_basis(const CMatrix& a);

// Orthogonal projector onto ran(A), same cutoff as pseudo_inverse.
CMatrix range_projector(const CMatrix& a);

// Loewner order A <= B: true iff lambda_max(A - B) <= rel_eps*(1+||A||+||B||).
// Inputs are Hermitized; an anti-Hermitian part above tolerance throws.
bool loewner_leq(const CMatrix& a, const CMatrix& b, const Tolerance& tol = {});

// Kronecker product, row-major block convention: (A kron B) has block (i,j)
// equal to a_ij * B.
CMatrix kron(const CMatrix& a, const CMatrix& b);

}  // namespace qst::numkit
