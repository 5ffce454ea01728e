#include "uavmec/deployment.hpp"

#include <string>

namespace uavmec {

bool Deployment::inside(const Box& box, double slack) const {
  for (const UavPosition& u : uavs) {
    if (u.q.x < box.x_min - slack || u.q.x > box.x_max + slack) return false;
    if (u.q.y < box.y_min - slack || u.q.y > box.y_max + slack) return false;
    if (u.h < box.h_min - slack || u.h > box.h_max + slack) return false;
  }
  return true;
}

Association::Association(std::vector<int> uav_of_ue, int num_uavs)
    : uav_of_ue_(std::move(uav_of_ue)), num_uavs_(num_uavs) {
  if (num_uavs < 1) throw std::invalid_argument("Association: num_uavs must be >= 1");
  for (int j : uav_of_ue_)
    if (j < 0 || j >= num_uavs)
      throw std::invalid_argument("Association: UAV index " + std::to_string(j) + " out of range");
}

std::vector<int> Association::served_by(int uav) const {
  std::vector<int> out;
  for (int i = 0; i < num_ues(); ++i)
    if (uav_of_ue_[i] == uav) out.push_back(i);
  return out;
}

std::vector<std::vector<int>> Association::matrix() const {
  std::vector<std::vector<int>> a(uav_of_ue_.size(), std::vector<int>(num_uavs_, 0));
  for (std::size_t i = 0; i < uav_of_ue_.size(); ++i) a[i][uav_of_ue_[i]] = 1;
  return a;
}

}  // namespace uavmec
