#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "uavmec/channel.hpp"
#include "uavmec/convex/status.hpp"
#include "uavmec/deployment.hpp"
#include "uavmec/scenario.hpp"

namespace uavmec {

/// Relaxed shares in [0, 1]; each row sums to one. `mu` is the LP value.
struct FractionalAssociation {
  Eigen::MatrixXd share;
  double mu = 0.0;
};

class AssociationError : public std::runtime_error {
 public:
  explicit AssociationError(convex::SolveCode code);
  convex::SolveCode code() const { return code_; }

 private:
  convex::SolveCode code_;
};

/// Entry (i, j): D_i / r_ij + F_i / f_max with the rate taken at the
/// deployment's geometry. Computation always runs at full CPU speed.
Eigen::MatrixXd service_time_matrix(const Scenario& scenario, const Deployment& deployment,
                                    RateModel model = RateModel::Rician);

/// min mu  s.t.  mu >= sum_i a_ij t_ij for every UAV j,  sum_j a_ij = 1,  a >= 0.
/// Throws AssociationError if the LP does not solve to optimality.
FractionalAssociation solve_relaxed(const Eigen::MatrixXd& times);

/// Threshold rounding at 0.5. Rows with several entries >= 0.5 keep the
/// lowest index; rows with none fall back to the row argmax (lowest index on
/// ties), so the result always has exactly one UAV per UE.
Association round_association(const FractionalAssociation& fractional);

}  // namespace uavmec
