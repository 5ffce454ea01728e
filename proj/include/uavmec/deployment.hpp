#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "uavmec/channel.hpp"
#include "uavmec/scenario.hpp"

namespace uavmec {

struct UavPosition {
  Point2 q;
  double h = 0.0;

  friend bool operator==(const UavPosition&, const UavPosition&) = default;
};

/// Per-UAV horizontal coordinates and altitude.
struct Deployment {
  std::vector<UavPosition> uavs;

  int size() const { return static_cast<int>(uavs.size()); }
  bool inside(const Box& box, double slack = 0.0) const;

  friend bool operator==(const Deployment&, const Deployment&) = default;
};

/// Binary UE -> UAV assignment stored as one UAV index per UE, so every row
/// of the implied 0/1 matrix sums to exactly one.
class Association {
 public:
  Association() = default;
  Association(std::vector<int> uav_of_ue, int num_uavs);

  int num_ues() const { return static_cast<int>(uav_of_ue_.size()); }
  int num_uavs() const { return num_uavs_; }
  int uav_of(int ue) const { return uav_of_ue_.at(static_cast<std::size_t>(ue)); }
  std::span<const int> uav_of_ue() const { return uav_of_ue_; }
  std::vector<int> served_by(int uav) const;
  /// 0/1 matrix view, N rows by M columns.
  std::vector<std::vector<int>> matrix() const;

  friend bool operator==(const Association&, const Association&) = default;

 private:
  std::vector<int> uav_of_ue_;
  int num_uavs_ = 0;
};

}  // namespace uavmec
