// Coherent-state matrix elements of the cocycles driven by block generators:
// piecewise-constant test functions, Weyl dressing, exact slice evaluation
// and the product-formula error bounds.
#pragma once

#include <vector>

#include "qstrotter/ito_algebra.hpp"

namespace qst::sim {

using ito::BlockGenerator;
using numkit::CMatrix;
using numkit::CVector;

// Piecewise-constant k-valued function on the line. `breaks` holds the
// strictly increasing interior breakpoints; `values` has one more entry,
// value i ruling [breaks[i-1], breaks[i]) with the usual conventions at the
// ends. Cells are closed on the left.
struct StepFunction {
  std::vector<double> breaks;
  std::vector<CVector> values;

  static StepFunction constant(const CVector& v);
  void validate() const;
  int dim() const;
  const CVector& value_at(double t) const;
  // Interior breakpoints lying strictly inside (r, t), sorted.
  std::vector<double> breaks_in(double r, double t) const;
};

// Weyl displacement along c: unitary, pure Gaussian.
BlockGenerator weyl_generator(const CVector& c, int dim_h);

// F_{c'}* ∘ F ∘ F_c, the generator seen between coherent states along c
// (right) and c' (left).
BlockGenerator dressed_generator(const BlockGenerator& f, const CVector& cprime,
                                 const CVector& c);

// Normalized coherent matrix element of the cocycle over [r, t]: the ordered
// product of exp(delta * Ktilde) over the cells cut by both step functions,
// earliest cell leftmost.
CMatrix slice_cocycle(const BlockGenerator& f, const StepFunction& gprime,
                      const StepFunction& g, double r, double t);

// Slice of the limiting cocycle of the ordered product formula: the series
// product of the list, evaluated as above. Every factor must admit a finite
// growth bound.
CMatrix trotter_limit_slice(const std::vector<BlockGenerator>& fs,
                            const StepFunction& gprime, const StepFunction& g,
                            double r, double t);

// Dressed product-formula constants: the plain constant of the pair
// (F_{c'}* ∘ F1, F2 ∘ F_c), maximized over the values both step functions
// take on [r, t].
double trotter_constant_dressed(const BlockGenerator& f1,
                                const BlockGenerator& f2,
                                const StepFunction& gprime,
                                const StepFunction& g, double r, double t);
// Same with the list F1, ..., Fn: c' dresses the first factor, c the last.
double trotter_constant_dressed_n(const std::vector<BlockGenerator>& fs,
                                  const StepFunction& gprime,
                                  const StepFunction& g, double r, double t);

// One-cell vacuum error bound: t^2 exp(t(b1+b2)) C(F1,F2)^2.
double expectation_error_bound(const BlockGenerator& f1,
                               const BlockGenerator& f2, double t);

// Mesh-proportional bound for the slice error over [r, t] against the
// partition given by `partition` (which should contain the window
// endpoints): mesh * (t-r) * exp((t-r)(b1+b2)) * Cdressed^2, the mesh taken
// with 0 prepended.
double mesh_error_bound(const BlockGenerator& f1, const BlockGenerator& f2,
                        const StepFunction& gprime, const StepFunction& g,
                        double r, double t,
                        const std::vector<double>& partition);
double mesh_error_bound_n(const std::vector<BlockGenerator>& fs,
                          const StepFunction& gprime, const StepFunction& g,
                          double r, double t,
                          const std::vector<double>& partition);

}  // namespace qst::sim
