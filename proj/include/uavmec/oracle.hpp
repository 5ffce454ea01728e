#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

#include "uavmec/deployment.hpp"
#include "uavmec/placement.hpp"
#include "uavmec/scenario.hpp"

namespace uavmec::oracle {

class TooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  double horizontal_step = 1.0;
  double vertical_step = 0.5;
  Box box;
};

struct OracleResult {
  double mu = 0.0;
  Deployment deployment;
  Association association;
  long long nodes_evaluated = 0;
};

/// Exhaustive minimum of the completion time over every binary association
/// and every grid position. Given an association the UAVs decouple, so each
/// distinct served subset is searched over the grid once.
/// Guards: M^N <= 1e5 and grid nodes <= 1e7, else TooLarge.
OracleResult grid_search(const Scenario& scenario, const GridSpec& grid);

struct EnumerationResult {
  double mu = 0.0;
  Association association;
};

/// Exact integer optimum of min_a max_j sum_i a_ij t_ij. Guard: M^N <= 1e6.
EnumerationResult enumerate_associations(const Eigen::MatrixXd& times);

/// Central differences with step rel_step * max(|x_i|, 1) per coordinate,
/// compared against `gradient`. Returns the largest per-component error
/// relative to max(|analytic_i|, 1e-12 * |analytic|_inf).
double finite_diff_check(const std::function<double(const Eigen::VectorXd&)>& f,
                         const Eigen::VectorXd& gradient, const Eigen::VectorXd& point,
                         double rel_step = 1e-5);

/// Rate as a function of the two linearization variables,
///   f(x, y) = B log2(1 + (k1 + k2 / (x + X)) gamma / (y + Y)^(alpha/2)),
/// with (X, Y) taken from the expansion point. Its gradient at (0, 0) is
/// minus the bound coefficients.
double rate_composite(double x, double y, const LinkExpansion& e, const Ue& ue,
                      const ChannelParams& channel);

/// Finite-difference error of (psi_x, psi_y) or (phi_x, phi_y) at one link.
double coefficient_fd_error(UavPosition expansion, const Ue& ue, const ChannelParams& channel,
                            bool vertical, double rel_step = 1e-5);

struct DominationReport {
  // Largest (bound - truth); rates relative to the true rate, v absolute.
  double horizontal_rate = -1.0;
  double elevation = -1.0;
  double vertical_rate = -1.0;
  // Largest |bound - truth| at the expansion point (same scaling).
  double expansion_gap = 0.0;
  long long samples = 0;

  double max_violation() const;
  bool passes(double tol = 1e-9) const { return max_violation() <= tol && expansion_gap <= tol; }
};

struct DominationOptions {
  bool flip_coefficient_sign = false;  // mutation self-test
};

/// Draws (UE, q, h, v) uniformly over the box and checks every lower bound
/// built at `expansion` against the true quantity.
DominationReport bound_domination_sample(const Scenario& scenario, UavPosition expansion,
                                         long long n_samples, std::uint64_t seed,
                                         const DominationOptions& options = {});

/// Hessian in (v, H) of v - H / sqrt(a3 + H^2) by central differences of its gradient.
Eigen::Matrix2d elevation_constraint_hessian_fd(double h, double a3, double step = 1e-3);

/// Smallest eigenvalue of the numerical Hessian above.
double elevation_constraint_min_eigenvalue(double h, double a3);

}  // namespace uavmec::oracle
