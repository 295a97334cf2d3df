#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "holab/numerics.hpp"
#include "holab/qcmap.hpp"
#include "holab/sphere.hpp"

namespace holab {

/// Sampled curve family: polylines in R^n with their generator description.
struct CurveFamily {
  int dim = 2;
  std::string generator;
  std::vector<std::vector<Vec>> curves;
  /// Closed-form modulus of the continuum family, when known.
  std::optional<double> exact_reference;
};

/// sigma(E) (log 1/r)^{1-n}.
double exact_radial_modulus(double sigma_e, double r, int n);
/// omega_{n-1} / (log R/r)^{n-1}.
double ring_modulus_upper(double r, double R, int n);

/// Default curve count: 2048 for n = 2, 4096 for n = 3.
int default_curve_count(int n);
/// Grid cells along the longest box side: 256 for n = 2, 64 for n = 3.
int default_resolution(int n);
/// Curve count keeping the curves-per-boundary-cell density of the defaults at
/// a finer grid: default_curve_count(n) (resolution / default_resolution(n))^{n-1}.
int scaled_curve_count(int n, int resolution);

/// Radial segments from r_inner omega to omega for omega quasi-uniform in the cap E.
CurveFamily radial_family(const Cap& e, double r_inner, int curves = 0, int vertices = 2);
/// Radial segments joining the spheres S(center, r) and S(center, R).
CurveFamily ring_family(const Vec& center, double r, double R, int curves = 0, int vertices = 2);
/// f applied to every vertex; segments are bisected until their images are
/// shorter than max_segment. Throws std::domain_error for vertices outside the closed ball.
CurveFamily map_family(const QcMap& f, const CurveFamily& family, double max_segment = 1e-2);

struct ModulusSolverParams {
  int resolution = 0;  // cells along the longest box side; 0 picks 256 (n = 2) or 64 (n = 3)
  int max_iterations = 4000;
  double tolerance = 2e-3;  // relative primal-dual gap
};

struct ModulusEstimate {
  /// sum rho^n vol at the best feasible rho: an upper bound for the discrete problem.
  double value = 0.0;
  /// Dual objective: a lower bound for the discrete problem.
  double dual_bound = 0.0;
  std::optional<double> exact_reference;
  std::optional<double> relative_error;  // value / exact - 1
  int resolution = 0;
  double cell_size = 0.0;
  std::size_t cells = 0;  // cells crossed by at least one curve
  std::size_t curves = 0;
  std::size_t nonzeros = 0;
  int iterations = 0;
  bool converged = false;
  double min_constraint = 0.0;  // min over curves of the line integral of rho
  std::vector<double> history;  // best feasible value, every 50 iterations
  /// Cell centers and rho values of the best feasible density.
  std::vector<Vec> cell_centers;
  std::vector<double> rho;
};

/// Minimizes sum rho_c^n vol over cells subject to sum rho ds >= 1 on every
/// curve, by projected gradient ascent on the dual with Nesterov momentum,
/// scaling each dual iterate's primal density to feasibility.
ModulusEstimate numeric_modulus(const CurveFamily& family, const ModulusSolverParams& params = {});

void write_rho_csv(const ModulusEstimate& est, std::ostream& out);

struct QuasiInvarianceReport {
  double ratio = 0.0;  // Mod(f Gamma) / Mod(Gamma)
  double k_bound = 1.0;
  double slack = 1.25;
  bool converged = false;
  bool within = false;
  ModulusEstimate original;
  ModulusEstimate image;
};

QuasiInvarianceReport quasi_invariance_check(const QcMap& f, const CurveFamily& family,
                                             const ModulusSolverParams& params = {}, double slack = 1.25);

}  // namespace holab
