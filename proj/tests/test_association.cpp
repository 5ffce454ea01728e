#include <cmath>
#include <random>

#include "doctest.h"
#include "test_support.hpp"
#include "uavmec/association.hpp"
#include "uavmec/oracle.hpp"
#include "uavmec/scenario.hpp"

using namespace uavmec;
using uavmec::testing::reference_scenario;

namespace {

double assigned_mu(const Eigen::MatrixXd& t, const Association& a) {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(t.cols());
  for (int i = 0; i < a.num_ues(); ++i) load(a.uav_of(i)) += t(i, a.uav_of(i));
  return load.maxCoeff();
}

FractionalAssociation one_row(std::initializer_list<double> row) {
  FractionalAssociation f;
  f.share.resize(1, static_cast<Eigen::Index>(row.size()));
  int j = 0;
  for (double v : row) f.share(0, j++) = v;
  return f;
}

}  // namespace

TEST_CASE("service time is upload plus compute") {
  Scenario s = uavmec::testing::single_ue({50.0, 50.0});
  s.ues[0].data_bits = 2e6;
  s.ues[0].cycles = 3e8;
  Deployment d{{{{50.0, 50.0}, 40.0}}};
  const Eigen::MatrixXd t = service_time_matrix(s, d);
  // Reference rate overhead at 40 m, from an independent high-precision evaluation.
  const double r = 33675662.955950972;
  CHECK(t(0, 0) == doctest::Approx(2e6 / r + 0.15).epsilon(1e-12));

  // 2e6 bits over 1e6 bit/s plus 3e8 cycles at 2 GHz.
  CHECK(2e6 / 1e6 + 3e8 / 2e9 == doctest::Approx(2.15));

  s.ues[0].cycles = 0.0;
  CHECK(service_time_matrix(s, d)(0, 0) == doctest::Approx(2e6 / r).epsilon(1e-12));
}

TEST_CASE("one UE, two UAVs: relaxation balances the loads, rounding picks the faster UAV") {
  Eigen::MatrixXd t(1, 2);
  t << 2.0, 1.0;
  const FractionalAssociation f = solve_relaxed(t);
  CHECK(f.mu == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(f.share(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(f.share(0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  const Association a = round_association(f);
  CHECK(a.uav_of(0) == 1);
  CHECK(assigned_mu(t, a) == doctest::Approx(1.0));
}

TEST_CASE("a single UAV takes everything") {
  Eigen::MatrixXd t(3, 1);
  t << 0.5, 1.25, 2.0;
  const FractionalAssociation f = solve_relaxed(t);
  CHECK(f.mu == doctest::Approx(3.75));
  for (int i = 0; i < 3; ++i) CHECK(f.share(i, 0) == doctest::Approx(1.0));
}

TEST_CASE("symmetric instance balances to one service time") {
  Eigen::MatrixXd t(2, 2);
  t << 1.5, 1.5, 1.5, 1.5;
  const FractionalAssociation f = solve_relaxed(t);
  CHECK(f.mu == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(f.share.col(0).sum() == doctest::Approx(1.0).epsilon(1e-9));
  const Association a = round_association(f);
  CHECK(assigned_mu(t, a) >= f.mu - 1e-9);
}

TEST_CASE("threshold rounding") {
  CHECK(round_association(one_row({0.6, 0.4})).uav_of(0) == 0);
  CHECK(round_association(one_row({0.4, 0.6})).uav_of(0) == 1);
  CHECK(round_association(one_row({0.4, 0.35, 0.25})).uav_of(0) == 0);
  CHECK(round_association(one_row({0.25, 0.35, 0.4})).uav_of(0) == 2);
  CHECK(round_association(one_row({0.5, 0.5})).uav_of(0) == 0);
  CHECK(round_association(one_row({0.3, 0.3, 0.3})).uav_of(0) == 0);
  CHECK(round_association(one_row({0.0, 0.0})).uav_of(0) == 0);
}

TEST_CASE("rounding yields exactly one UAV per UE for arbitrary shares") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const int m = 1 + static_cast<int>(rng() % 4);
    FractionalAssociation f;
    f.share.resize(n, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) f.share(i, j) = uniform01(rng);
    const Association a = round_association(f);
    REQUIRE(a.num_ues() == n);
    for (const auto& row : a.matrix()) {
      int ones = 0;
      for (int v : row) ones += v;
      CHECK(ones == 1);
    }
  }
}

TEST_CASE("relaxation lower-bounds the integer optimum and rounding never beats it") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const int m = 1 + static_cast<int>(rng() % 3);
    Eigen::MatrixXd t(n, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) t(i, j) = uniform(rng, 0.1, 3.0);
    const FractionalAssociation f = solve_relaxed(t);
    for (int i = 0; i < n; ++i) CHECK(f.share.row(i).sum() == doctest::Approx(1.0).epsilon(1e-8));
    const auto best = oracle::enumerate_associations(t);
    CHECK(f.mu <= best.mu + 1e-9);
    const double rounded = assigned_mu(t, round_association(f));
    CHECK(rounded >= best.mu - 1e-12);
    CHECK(rounded >= f.mu - 1e-9);
  }
}

TEST_CASE("service time matrix of a generated scenario is finite and positive") {
  const Scenario s = reference_scenario(3, 12, 3);
  Deployment d{{{{10.0, 10.0}, 40.0}, {{50.0, 90.0}, 60.0}, {{90.0, 20.0}, 80.0}}};
  const Eigen::MatrixXd t = service_time_matrix(s, d);
  REQUIRE(t.rows() == 12);
  REQUIRE(t.cols() == 3);
  CHECK(t.allFinite());
  CHECK(t.minCoeff() > 0.0);
  const Eigen::MatrixXd los = service_time_matrix(s, d, RateModel::LineOfSight);
  CHECK((los.array() <= t.array()).all());
}

TEST_CASE("association rejects bad indices") {
  CHECK_THROWS_AS(Association({0, 2}, 2), std::invalid_argument);
  CHECK_THROWS_AS(Association({-1}, 2), std::invalid_argument);
  const Association a({1, 0, 1}, 2);
  CHECK(a.served_by(1) == std::vector<int>{0, 2});
}
