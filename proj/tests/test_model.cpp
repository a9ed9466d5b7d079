#include <cmath>
#include <numbers>

#include "doctest.h"
#include "shapestar/model.hpp"
#include "support.hpp"

using namespace shapestar;
using namespace shapestar::testing;

namespace {

// Rodrigues' formula written out, independent of the library helper.
Eigen::Matrix3d rodrigues(const Eigen::Vector3d& w) {
  const double th = w.norm();
  Eigen::Matrix3d S;
  S << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  S /= th;
  return Eigen::Matrix3d::Identity() + std::sin(th) * S + (1 - std::cos(th)) * S * S;
}

}  // namespace

TEST_CASE("geodesic rotation error") {
  CHECK(geodesic_rotation_error(Eigen::Matrix3d::Identity(), Eigen::Matrix3d::Identity()) == doctest::Approx(0.0));

  Eigen::Matrix3d Rz;
  Rz << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK(geodesic_rotation_error(Eigen::Matrix3d::Identity(), Rz) == doctest::Approx(90.0).epsilon(1e-12));

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Matrix3d R = random_rotation(rng);
    const Eigen::Vector3d axis = Eigen::Vector3d::Random().normalized();
    const Eigen::Matrix3d Rp = R * rodrigues(0.01 * axis);
    CHECK(geodesic_rotation_error(R, Rp) == doctest::Approx(0.01 * 180.0 / std::numbers::pi).epsilon(1e-6));
  }
}

TEST_CASE("geodesic rotation error properties") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Matrix3d A = random_rotation(rng);
    const Eigen::Matrix3d B = random_rotation(rng);
    const double ab = geodesic_rotation_error(A, B);
    CHECK(ab == doctest::Approx(geodesic_rotation_error(B, A)).epsilon(1e-9));
    CHECK(ab >= 0.0);
    CHECK(ab <= 180.0);
    CHECK(geodesic_rotation_error(A, A) < 1e-5);
  }
  Eigen::Matrix3d bad = Eigen::Matrix3d::Identity();
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(geodesic_rotation_error(bad, Eigen::Matrix3d::Identity()), InvalidArgument);
}

TEST_CASE("rotation_from_axis_angle agrees with Rodrigues") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Vector3d w = 2.0 * Eigen::Vector3d::Random();
    CHECK((rotation_from_axis_angle(w) - rodrigues(w)).norm() < 1e-12);
  }
  CHECK(rotation_from_axis_angle(Eigen::Vector3d::Zero()).isIdentity());
}

TEST_CASE("shape error") {
  Eigen::Matrix3Xd e3 = Eigen::Matrix3Xd::Zero(3, 5);
  e3.row(2).setOnes();
  const DeformableModel unit({e3});
  CHECK(shape_error(unit, Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1)) == doctest::Approx(1.0));

  std::mt19937_64 rng(10);
  const DeformableModel model = random_model(rng, 3, 12);
  const Eigen::VectorXd a = random_coeffs(rng, 3), b = random_coeffs(rng, 3), c = random_coeffs(rng, 3);
  CHECK(shape_error(model, a, a) == 0.0);

  double naive = 0.0;
  for (int i = 0; i < model.N(); ++i) {
    Eigen::Vector3d d = Eigen::Vector3d::Zero();
    for (int k = 0; k < 3; ++k) d += (a[k] - b[k]) * model.bases[k].col(i);
    naive += d.norm();
  }
  CHECK(shape_error(model, a, b) == doctest::Approx(naive / model.N()).epsilon(1e-12));

  CHECK(shape_error(model, a, c) <= shape_error(model, a, b) + shape_error(model, b, c) + 1e-12);
  CHECK_THROWS_AS(shape_error(model, a, Eigen::VectorXd::Zero(2)), InvalidArgument);
}

TEST_CASE("coefficient error") {
  Eigen::VectorXd a(2), b(2);
  a << 1, 0;
  b << 0, 1;
  CHECK(coeff_error(a, a) == 0.0);
  CHECK(coeff_error(a, b) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(coeff_error(a, Eigen::VectorXd::Zero(3)), InvalidArgument);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd x = random_coeffs(rng, 4), y = random_coeffs(rng, 4), z = random_coeffs(rng, 4);
    CHECK(coeff_error(x, z) <= coeff_error(x, y) + coeff_error(y, z) + 1e-12);
  }
}

TEST_CASE("model and observation validation") {
  CHECK_THROWS_AS(DeformableModel(std::vector<Eigen::Matrix3Xd>{}), InvalidArgument);
  CHECK_THROWS_AS(DeformableModel({Eigen::Matrix3Xd::Zero(3, 3)}), InvalidArgument);
  CHECK_THROWS_AS(DeformableModel({Eigen::Matrix3Xd::Zero(3, 4), Eigen::Matrix3Xd::Zero(3, 5)}), InvalidArgument);
  Eigen::Matrix3Xd nan = Eigen::Matrix3Xd::Zero(3, 4);
  nan(1, 1) = std::nan("");
  CHECK_THROWS_AS(DeformableModel({nan}), InvalidArgument);

  const Eigen::Matrix2Xd z = Eigen::Matrix2Xd::Zero(2, 4);
  CHECK(Observation(z).weights.isOnes());
  CHECK_THROWS_AS(Observation(z, Eigen::VectorXd::Ones(3)), InvalidArgument);
  CHECK_THROWS_AS(Observation(z, -Eigen::VectorXd::Ones(4)), InvalidArgument);
  CHECK_THROWS_AS(Observation(z, Eigen::VectorXd::Ones(4), Intrinsics{0.0, 1.0}), InvalidArgument);
}

TEST_CASE("validate_rotation") {
  std::mt19937_64 rng(12);
  CHECK_NOTHROW(validate_rotation(random_rotation(rng)));
  CHECK_THROWS_AS(validate_rotation(Eigen::Vector3d(1, 1, -1).asDiagonal().toDenseMatrix()), InvalidArgument);
  CHECK_THROWS_AS(validate_rotation(1.01 * Eigen::Matrix3d::Identity()), InvalidArgument);
}
