#pragma once

#include <cmath>
#include <stdexcept>

namespace uavmec {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double squared_distance(Point2 a, Point2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Air-to-ground link parameters. All quantities are linear SI values; dB
/// conversion happens when a scenario is built or loaded.
///
/// The logistic constants k1..k4 parameterize the closed-form outage rate
///   r = B log2(1 + (k1 + k2 / (1 + exp(-(k3 + k4 v)))) * gamma / d^alpha)
/// with gamma = p * ref_gain / (noise * snr_gap) and v the elevation sine.
/// rician_a1/rician_a2 only feed rician_factor() and never the optimizer.
struct ChannelParams {
  double bandwidth_hz = 1e7;
  double ref_gain = 1e-3;
  double pathloss_exp = 2.0;
  double noise_w = 1e-9;
  double snr_gap = 6.606934480075960;  // 8.2 dB
  double k1 = 0.01;
  double k2 = 0.99;
  double k3 = -4.7;
  double k4 = 8.9;
  double rician_a1 = 1.0;
  double rician_a2 = 1.0;

  friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

class ChannelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws ChannelError naming the first violated field.
void validate(const ChannelParams& params);

double db_to_linear(double db);
double dbm_to_watts(double dbm);

/// Receive-SNR scale gamma_i = p * beta0 / (sigma^2 * Gamma).
double snr_scale(double tx_power_w, const ChannelParams& params);

double distance(Point2 uav, double altitude, Point2 ue);

/// Sine of the elevation angle seen from the UE. Requires altitude > 0.
double elevation_sine(Point2 uav, double altitude, Point2 ue);

/// Diagnostic only: k = A1 * exp(A2 * theta).
double rician_factor(double theta, const ChannelParams& params);

/// The logistic angle factor k1 + k2 / (1 + exp(-(k3 + k4 v))). Lies in (k1, 1).
double angle_factor(double elev_sine, const ChannelParams& params);

/// Outage-constrained rate in bits/s for a link of the given horizontal
/// squared distance and altitude, with the elevation sine passed separately
/// so relaxed (v <= true v) points can be evaluated.
double outage_rate(double horiz_dist_sq, double altitude, double elev_sine,
                   double tx_power_w, const ChannelParams& params);

/// Pure line-of-sight rate: outage_rate with the angle factor replaced by 1.
double los_rate(double horiz_dist_sq, double altitude, double tx_power_w,
                const ChannelParams& params);

enum class RateModel { Rician, LineOfSight };

/// Rate at the true geometry (elevation derived from the position).
double link_rate(RateModel model, Point2 uav, double altitude, Point2 ue,
                 double tx_power_w, const ChannelParams& params);

}  // namespace uavmec
