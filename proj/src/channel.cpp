#include "uavmec/channel.hpp"

#include <string>

namespace uavmec {
namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw ChannelError(std::string("channel.") + field + ": " + what);
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ChannelError(std::string(name) + " must be finite");
}

}  // namespace

void validate(const ChannelParams& p) {
  require(std::isfinite(p.bandwidth_hz) && p.bandwidth_hz > 0, "bandwidth_hz", "must be > 0");
  require(std::isfinite(p.ref_gain) && p.ref_gain > 0, "ref_gain_linear", "must be > 0");
  require(std::isfinite(p.pathloss_exp) && p.pathloss_exp >= 2, "pathloss_exp", "must be >= 2");
  require(std::isfinite(p.noise_w) && p.noise_w > 0, "noise_w", "must be > 0");
  require(std::isfinite(p.snr_gap) && p.snr_gap >= 1, "snr_gap_linear", "must be >= 1");
  require(std::isfinite(p.k1) && p.k1 > 0, "k1", "must be > 0");
  require(std::isfinite(p.k2) && p.k2 > 0, "k2", "must be > 0");
  require(std::abs(p.k1 + p.k2 - 1.0) <= 1e-12, "k1+k2", "must satisfy k1 + k2 = 1");
  require(std::isfinite(p.k3) && p.k3 < 0, "k3", "must be < 0");
  require(std::isfinite(p.k4) && p.k4 > 0, "k4", "must be > 0");
  require(std::isfinite(p.rician_a1), "rician_a1", "must be finite");
  require(std::isfinite(p.rician_a2), "rician_a2", "must be finite");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double snr_scale(double tx_power_w, const ChannelParams& p) {
  return tx_power_w * p.ref_gain / (p.noise_w * p.snr_gap);
}

double distance(Point2 uav, double altitude, Point2 ue) {
  return std::sqrt(squared_distance(uav, ue) + altitude * altitude);
}

double elevation_sine(Point2 uav, double altitude, Point2 ue) {
  if (!(altitude > 0)) throw ChannelError("elevation_sine: altitude must be > 0");
  return altitude / distance(uav, altitude, ue);
}

double rician_factor(double theta, const ChannelParams& p) {
  return p.rician_a1 * std::exp(p.rician_a2 * theta);
}

double angle_factor(double v, const ChannelParams& p) {
  return p.k1 + p.k2 / (1.0 + std::exp(-(p.k3 + p.k4 * v)));
}

double outage_rate(double horiz_dist_sq, double altitude, double v, double tx_power_w,
                   const ChannelParams& p) {
  require_finite(horiz_dist_sq, "outage_rate: horiz_dist_sq");
  require_finite(altitude, "outage_rate: altitude");
  require_finite(v, "outage_rate: elev_sine");
  require_finite(tx_power_w, "outage_rate: tx_power_w");
  const double d_sq = horiz_dist_sq + altitude * altitude;
  const double snr =
      angle_factor(v, p) * snr_scale(tx_power_w, p) / std::pow(d_sq, 0.5 * p.pathloss_exp);
  return p.bandwidth_hz * std::log2(1.0 + snr);
}

double los_rate(double horiz_dist_sq, double altitude, double tx_power_w,
                const ChannelParams& p) {
  require_finite(horiz_dist_sq, "los_rate: horiz_dist_sq");
  require_finite(altitude, "los_rate: altitude");
  require_finite(tx_power_w, "los_rate: tx_power_w");
  const double d_sq = horiz_dist_sq + altitude * altitude;
  const double snr = snr_scale(tx_power_w, p) / std::pow(d_sq, 0.5 * p.pathloss_exp);
  return p.bandwidth_hz * std::log2(1.0 + snr);
}

double link_rate(RateModel model, Point2 uav, double altitude, Point2 ue, double tx_power_w,
                 const ChannelParams& p) {
  const double hd2 = squared_distance(uav, ue);
  if (model == RateModel::LineOfSight) return los_rate(hd2, altitude, tx_power_w, p);
  return outage_rate(hd2, altitude, elevation_sine(uav, altitude, ue), tx_power_w, p);
}

}  // namespace uavmec
