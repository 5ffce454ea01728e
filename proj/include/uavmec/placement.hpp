#pragma once

#include <span>
#include <vector>

#include "uavmec/channel.hpp"
#include "uavmec/convex/barrier.hpp"
#include "uavmec/deployment.hpp"
#include "uavmec/scenario.hpp"

namespace uavmec {

/// Values of one UE-UAV link at the point where the rate is linearized.
struct LinkExpansion {
  double v_hat = 0.0;      // elevation sine at the expansion point
  double horiz_sq = 0.0;   // |q_hat - w|^2
  double dist_sq = 0.0;    // |q_hat - w|^2 + h_hat^2
  double r_hat = 0.0;      // rate at the expansion point, bits/s
};

LinkExpansion expand_link(UavPosition expansion, const Ue& ue, const ChannelParams& channel,
                          RateModel model = RateModel::Rician);

/// Magnitudes of the two partial derivatives of
///   f(x, y) = B log2(1 + (k1 + k2 / (x + X)) * gamma / (y + Y)^(alpha/2))
/// at x = y = 0, with X = 1 + exp(-(k3 + k4 v_hat)) and Y the expansion
/// squared distance. `exp_coef` multiplies the change of exp(-(k3 + k4 v)),
/// `dist_coef` the change of the squared distance. Both are > 0 for the
/// Rician model; the LoS model has no angle term (exp_coef = 0).
struct BoundCoefficients {
  double exp_coef = 0.0;
  double dist_coef = 0.0;
};

/// Horizontal step: (psi_x, psi_y), distance change through |q - w|^2.
BoundCoefficients psi_coefficients(UavPosition expansion, const Ue& ue,
                                   const ChannelParams& channel,
                                   RateModel model = RateModel::Rician);

/// Vertical step: (phi_x, phi_y), distance change through H^2.
BoundCoefficients phi_coefficients(UavPosition expansion, const Ue& ue,
                                   const ChannelParams& channel,
                                   RateModel model = RateModel::Rician);

/// exp(-(k3 + k4 v)), the angle variable the rate bounds are affine in.
double angle_term(double v, const ChannelParams& channel);

/// Global under-estimator of outage_rate(|q - w|^2, h_hat, v) built at the
/// expansion point.
double r_lb_horizontal(Point2 q, double v, UavPosition expansion, const Ue& ue,
                       const BoundCoefficients& psi, const ChannelParams& channel);

/// Global under-estimator of h / sqrt(|q - w|^2 + h^2) at fixed h.
double v_lb(Point2 q, UavPosition expansion, const Ue& ue);

/// Global under-estimator of outage_rate(|q_hat - w|^2, h, v) at fixed q.
double r_lb_vertical(double h, double v, UavPosition expansion, const Ue& ue,
                     const BoundCoefficients& phi, const ChannelParams& channel);

struct PlacementOptions {
  convex::BarrierOptions barrier;
  RateModel model = RateModel::Rician;
  double v_floor = 1e-6;
  double z_min = 1.0;  // bits/s, keeps D/z away from its pole
  double descent_tol = 1e-9;
};

/// Outcome of one linearize-and-solve step for one UAV.
struct SubproblemSolution {
  UavPosition position;          // accepted position (expansion point if rejected)
  UavPosition candidate;         // subproblem minimizer
  std::vector<double> v;         // per served UE (empty for the LoS model)
  std::vector<double> z;         // per served UE, bits/s
  double mu = 0.0;               // surrogate optimum, seconds
  double time_before = 0.0;      // true completion time at the expansion point
  double time_after = 0.0;       // true completion time at `position`
  convex::SolveCode status = convex::SolveCode::NumericalFailure;
  bool accepted = false;
};

/// Sum over the served UEs of D_i / r_ij + F_i / f_max at the given position.
double uav_completion_time(const Scenario& scenario, std::span<const int> served,
                           UavPosition position, RateModel model = RateModel::Rician);

/// One SCA step on the horizontal position with the altitude held at
/// expansion.h. Rejected steps (solver failure or a true-time increase above
/// descent_tol) keep the expansion point.
SubproblemSolution solve_horizontal(const Scenario& scenario, std::span<const int> served,
                                    UavPosition expansion, const PlacementOptions& options = {});

/// One SCA step on the altitude with q held at expansion.q. The elevation
/// constraint v <= h / sqrt(|q - w|^2 + h^2) is kept exact since it is
/// convex in (v, h).
SubproblemSolution solve_vertical(const Scenario& scenario, std::span<const int> served,
                                  UavPosition expansion, const PlacementOptions& options = {});

}  // namespace uavmec
