#include "uavmec/association.hpp"

#include <algorithm>
#include <string>

#include "uavmec/convex/lp.hpp"

namespace uavmec {

AssociationError::AssociationError(convex::SolveCode code)
    : std::runtime_error("association LP failed: " + std::string(convex::to_string(code))),
      code_(code) {}

Eigen::MatrixXd service_time_matrix(const Scenario& s, const Deployment& d, RateModel model) {
  const int n = s.num_ues(), m = d.size();
  Eigen::MatrixXd times(n, m);
  for (int i = 0; i < n; ++i) {
    const Ue& u = s.ues[i];
    const double compute = u.cycles / s.fleet.cpu_hz;
    for (int j = 0; j < m; ++j) {
      const UavPosition& p = d.uavs[j];
      const double rate = link_rate(model, p.q, p.h, u.position, u.tx_power_w, s.channel);
      times(i, j) = u.data_bits / rate + compute;
    }
  }
  return times;
}

FractionalAssociation solve_relaxed(const Eigen::MatrixXd& times) {
  const int n = static_cast<int>(times.rows()), m = static_cast<int>(times.cols());
  const int mu = n * m;
  // Shares are only bounded below; the row equalities cap them at one.
  convex::LinearProgram lp = convex::LinearProgram::with_dimension(n * m + 1);
  lp.objective(mu) = 1.0;
  lp.ineq = Eigen::MatrixXd::Zero(m, n * m + 1);
  lp.ineq_rhs = Eigen::VectorXd::Zero(m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) lp.ineq(j, i * m + j) = times(i, j);
    lp.ineq(j, mu) = -1.0;
  }
  lp.eq = Eigen::MatrixXd::Zero(n, n * m + 1);
  lp.eq_rhs = Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) lp.eq(i, i * m + j) = 1.0;

  const convex::SolveStatus status = convex::solve_lp(lp);
  if (!status.optimal()) throw AssociationError(status.code);

  FractionalAssociation out;
  out.share.resize(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) out.share(i, j) = std::clamp(status.x(i * m + j), 0.0, 1.0);
  out.mu = status.x(mu);
  return out;
}

Association round_association(const FractionalAssociation& frac) {
  const auto n = frac.share.rows(), m = frac.share.cols();
  std::vector<int> uav_of(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    int pick = -1;
    for (Eigen::Index j = 0; j < m && pick < 0; ++j)
      if (frac.share(i, j) >= 0.5) pick = static_cast<int>(j);
    if (pick < 0) {
      pick = 0;
      for (Eigen::Index j = 1; j < m; ++j)
        if (frac.share(i, j) > frac.share(i, pick)) pick = static_cast<int>(j);
    }
    uav_of[i] = pick;
  }
  return Association(std::move(uav_of), static_cast<int>(m));
}

}  // namespace uavmec
