// Discrete-time evaluation layer: repeated-interaction walk steps, exact
// coherent compressions of interleaved walk products via a transfer operator
// on a tensor power of the initial space, Richardson extrapolation in the
// substep count, and the mesh-convergence report for the product formula.
#pragma once

#include <optional>
#include <vector>

#include "qstrotter/cocycle_sim.hpp"

namespace qst::walk {

using ito::BlockGenerator;
using numkit::CMatrix;
using numkit::CVector;
using sim::StepFunction;

// One Euler step of width h: [[I + hK, sqrt(h) M], [sqrt(h) L, C]].
CMatrix walk_step(const BlockGenerator& f, double h);

struct SliceResult {
  CMatrix matrix;
  double truncation_estimate = 0.0;  // first-order substep error estimate
  long long substeps = 0;            // base substep count per cell
};

// Coherent compression of the ordered product of the m-step walks of the
// listed generators over one cell of width delta with constant arguments
// (first generator leftmost in the operator product). Exact up to roundoff
// for the given m; no extrapolation.
CMatrix walk_cell_slice_raw(const std::vector<BlockGenerator>& fs,
                            const CVector& cprime, const CVector& c,
                            double delta, long long m);

// Richardson-extrapolated cell value 2 X_{2m} - X_m approximating the slice
// of the ordered product of the true cocycles over the cell;
// truncation_estimate is |X_{2m} - X_m|.
SliceResult cell_product_slice(const std::vector<BlockGenerator>& fs,
                               const CVector& cprime, const CVector& c,
                               double delta, long long m);

// Product over the cells of [r, t] refined by `partition` and the
// breakpoints of both step functions, earliest cell leftmost; every cell
// uses the same base substep count m.
SliceResult trotter_approximant_slice(const std::vector<BlockGenerator>& fs,
                                      const StepFunction& gprime,
                                      const StepFunction& g, double r,
                                      double t,
                                      const std::vector<double>& partition,
                                      long long m);

// Raw single-generator discrete slice over [r, t] (cells cut by the step
// functions only); first-order accurate in 1/m.
CMatrix walk_slice(const BlockGenerator& f, const StepFunction& gprime,
                   const StepFunction& g, double r, double t, long long m);

struct ReportRow {
  double mesh = 0.0;  // requested mesh keying this row
  double measured_error = 0.0;
  double bound = 0.0;
  double truncation_estimate = 0.0;
  long long substeps = 0;
  bool conclusive = false;
};

struct TrotterReport {
  std::vector<ReportRow> rows;
  std::optional<double> slope;  // empty when no row qualifies
  bool pass = false;
};

struct ReportOptions {
  std::vector<double> meshes = {0.25, 0.125, 0.0625, 0.03125};
  long long substeps = 0;  // 0 = escalate automatically until conclusive
};

// For each requested mesh: build the uniform partition of [r, t], refine by
// the step-function breakpoints, evaluate the interleaved approximant
// against the limit slice and the mesh-proportional bound, escalating the
// substep count until the truncation estimate is dominated. Pass verdict:
// every row conclusive, every measured error within bound plus truncation,
// and the log-log slope (when defined) close to one.
TrotterReport trotter_report(const std::vector<BlockGenerator>& fs,
                             const StepFunction& gprime, const StepFunction& g,
                             double r, double t,
                             const ReportOptions& opts = {});

}  // namespace qst::walk
