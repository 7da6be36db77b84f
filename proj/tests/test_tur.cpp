#include "generators.hpp"
#include "naqtur/tur.hpp"

#include <doctest.h>

#include <cmath>

using namespace naqtur;
using namespace naqtur::testing;

namespace {

// Independent form of the symmetric-covariance closed form.
double F_reference(double s) {
  const double x = std::sqrt(s / (s + 4));
  return 2 * x * std::atanh(x);
}

RMatrix qubit_covariance_reference(const Vec3& bloch, const Eigen::Matrix<double, 3, 2>& axes) {
  RMatrix v(2, 2);
  for (int u = 0; u < 2; ++u)
    for (int w = 0; w < 2; ++w)
      v(u, w) = (axes.col(u).dot(axes.col(w)) - bloch.dot(axes.col(u)) * bloch.dot(axes.col(w))) / 4;
  return v;
}

}  // namespace

TEST_SUITE("tur") {
  TEST_CASE("F closed form") {
    CHECK(F_closed(0.0) == 0.0);
    CHECK(F_closed(1.0) == doctest::Approx(F_reference(1.0)).epsilon(1e-14));
    // value quoted to six decimals
    CHECK(std::abs(F_closed(1.0) - 0.430402) < 1e-5);
    CHECK(std::isinf(F_closed(kInf)));
    CHECK_THROWS_AS(F_closed(-1e-3), ValidationError);
    for (double s : {1e-8, 1e-3, 0.5, 3.0, 50.0, 1e4}) CHECK(F_closed(s) == doctest::Approx(F_reference(s)).epsilon(1e-12));
    double prev = 0.0;
    for (int j = 1; j <= 100; ++j) {
      const double v = F_closed(std::pow(10.0, -6 + 0.1 * j));
      CHECK(v > prev);
      prev = v;
    }
  }

  TEST_CASE("small-s expansion") {
    for (int j = 0; j <= 40; ++j) {
      const double s = std::pow(10.0, -4.0 + 3.0 * j / 40);
      CHECK(std::abs(F_closed(s) - (s / 2 - s * s / 12)) <= 0.02 * s * s * s);
    }
  }

  TEST_CASE("inverse functions") {
    CHECK(g_inverse(0.0) == 0.0);
    CHECK(g_inverse(std::tanh(1.0)) == doctest::Approx(1.0).epsilon(1e-13));
    for (double y : {1e-10, 1e-3, 0.4, 2.0, 30.0}) {
      const double x = g_inverse(y);
      CHECK(x * std::tanh(x) == doctest::Approx(y).epsilon(1e-13));
    }
    CHECK(std::abs(G_of_D(2 * std::tanh(1.0)) - 4 * std::pow(std::sinh(1.0), 2)) <= 1e-9);
    for (int j = 0; j <= 70; ++j) {
      const double d = std::pow(10.0, -6.0 + 0.1 * j);
      CHECK(std::abs(F_closed(G_of_D(d)) - d) <= 1e-10);
      CHECK(f_of_D(d) == doctest::Approx(1.0 / G_of_D(d)));
    }
    CHECK(std::isinf(f_of_D(0.0)));
    CHECK_THROWS_AS(G_of_D(-1.0), ValidationError);
  }

  TEST_CASE("currents and covariances of spin charges") {
    Rng rng(41);
    for (int i = 0; i < 200; ++i) {
      const Vec3 n1 = random_unit_vector(rng), n2 = random_unit_vector(rng);
      const DensityMatrix a = bloch_state(0.3, n1), b = bloch_state(0.8, n2);
      const Mat3 frame = adjoint_rotation(haar_su2(rng).matrix());
      Eigen::Matrix<double, 3, 2> axes;
      axes << frame.col(0), frame.col(2);
      const ChargeSet q = spin_charges(axes, frame);
      const RVector dq = current_vector(a, b, q);
      for (int u = 0; u < 2; ++u) CHECK(dq(u) == doctest::Approx((0.8 * n2 - 0.3 * n1).dot(axes.col(u)) / 2).epsilon(1e-12));
      const RMatrix v = covariance_matrix(b, q);
      CHECK((v - qubit_covariance_reference(0.8 * n2, axes)).norm() < 1e-14);
      CHECK(v(0, 1) == v(1, 0));
    }
    const ChargeSet d = default_charges();
    CHECK(d.labels == std::vector<std::string>{"QX", "QZ"});
    CHECK(frobenius_norm(d.charges[0].matrix() - pauli_x() / 2.0) == 0.0);
  }

  TEST_CASE("covariance pair validation") {
    RVector dq(2);
    dq << 0.1, 0.2;
    RMatrix v = RMatrix::Identity(2, 2);
    RMatrix asym = v;
    asym(0, 1) = 0.5;
    RMatrix neg = -v;
    CHECK_NOTHROW(validate_covariance_pair(dq, v, v));
    CHECK_THROWS_AS(validate_covariance_pair(dq, asym, v), ValidationError);
    CHECK_THROWS_AS(validate_covariance_pair(dq, v, neg), ValidationError);
    CHECK_THROWS_AS(validate_covariance_pair(dq, RMatrix::Identity(3, 3), v), ValidationError);
  }

  TEST_CASE("s_lambda and bound_B special cases") {
    const QuadratureRule quad = gauss_legendre(64);
    RVector dq(2);
    dq << 0.3, -0.4;
    const RMatrix id = RMatrix::Identity(2, 2);
    CHECK(s_lambda(dq, id, id, 0.3).s == doctest::Approx(0.25).epsilon(1e-14));

    const BoundReport zero = bound_B(RVector::Zero(2), id, id, quad);
    CHECK(zero.B == 0.0);
    CHECK_FALSE(zero.out_of_range());

    const BoundReport same = bound_B(dq, id, id, quad);
    CHECK(std::abs(same.B - F_reference(0.25)) <= 1e-12);
    CHECK(same.s_simple == doctest::Approx(0.25));
    CHECK(same.F_of_s == doctest::Approx(F_reference(0.25)));

    // current outside range(V_lambda)
    RMatrix rank1 = RMatrix::Zero(2, 2);
    rank1(0, 0) = 1.0;
    const BoundReport off = bound_B(dq, rank1, rank1, quad);
    CHECK(off.out_of_range());
    CHECK(std::isinf(off.B));
    CHECK(off.range_residual > kRangeResidualTol);

    // current inside the range of a singular covariance stays finite
    RVector inside(2);
    inside << 0.3, 0.0;
    const BoundReport in = bound_B(inside, rank1, rank1, quad);
    CHECK_FALSE(in.out_of_range());
    CHECK(in.B == doctest::Approx(F_reference(0.09)).epsilon(1e-10));
  }

  TEST_CASE("property: symmetric collapse over s in [1e-4, 1e2]") {
    Rng rng(42);
    const QuadratureRule quad = gauss_legendre(64);
    for (int j = 0; j <= 60; ++j) {
      const double s = std::pow(10.0, -4.0 + 0.1 * j);
      const RMatrix v = random_spd(2, rng);
      RVector dq = random_rvector(2, rng);
      dq *= std::sqrt(s / dq.dot(v.inverse() * dq));
      CHECK(std::abs(bound_B(dq, v, v, quad).B - F_closed(s)) <= 1e-8);
    }
  }

  TEST_CASE("property: PSD form agrees with s <= G(D)") {
    Rng rng(43);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const int m = 2 + i % 3;
      const RMatrix v = random_spd(m, rng);
      const RVector dq = random_rvector(m, rng);
      const double s = dq.dot(v.inverse() * dq);
      const double d = F_closed(s * std::exp(g(rng)));
      CHECK((matrix_tur_check(v, dq, d) >= -1e-10) == (s <= G_of_D(d) + 1e-10));
    }
    RMatrix v = RMatrix::Identity(2, 2);
    CHECK(matrix_tur_check(v, RVector::Zero(2), 0.0) == doctest::Approx(1.0));
  }

  TEST_CASE("witness quotient") {
    CHECK(witness_h(0.0, 1.0, 1.0, 0.5) == 0.0);
    CHECK(std::isinf(witness_h(1.0, 0.0, 0.0, 0.0)));
    CHECK(witness_h(2.0, 1.0, 3.0, 0.25) == doctest::Approx(4.0 / (0.75 + 0.75 + 0.1875 * 4)));
    CHECK_THROWS_AS(witness_bound_integral(RVector::Zero(2), RVector::Ones(2), RMatrix::Identity(2, 2),
                                           RMatrix::Identity(2, 2), gauss_legendre(8)),
                    ValidationError);
  }

  TEST_CASE("property: optimizer dominance and attainment") {
    Rng rng(44);
    const QuadratureRule quad = gauss_legendre(64);
    std::uniform_real_distribution<double> lam(0.01, 0.99);
    for (int i = 0; i < 200; ++i) {
      const RMatrix v = random_spd(2, rng), vp = random_spd(2, rng);
      const RVector dq = random_rvector(2, rng);
      const double l = lam(rng);
      const double s = s_lambda(dq, v, vp, l).s;
      const double top = s / (1 + l * (1 - l) * s);
      for (int k = 0; k < 100; ++k) {
        const RVector u = random_rvector(2, rng);
        CHECK(witness_h(u.dot(dq), u.dot(vp * u), u.dot(v * u), l) <= top + 1e-10);
      }
      const RVector star = optimal_witness_direction(dq, v, vp, l);
      CHECK(witness_h(star.dot(dq), star.dot(vp * star), star.dot(v * star), l) == doctest::Approx(top).epsilon(1e-10));

      const double b = bound_B(dq, v, vp, quad).B;
      for (int k = 0; k < 20; ++k)
        CHECK(witness_bound_integral(random_rvector(2, rng), dq, v, vp, quad) <= b + 1e-12);
      const RVector u_sym = v.inverse() * dq;
      CHECK(std::abs(witness_bound_integral(u_sym, dq, v, v, quad) - bound_B(dq, v, v, quad).B) <= 1e-10);
    }
  }

  TEST_CASE("Robertson ratio") {
    const ChargeSet q = default_charges();
    for (double r : {0.0, 0.2, 0.6, 0.95}) {
      const double c = robertson_C(bloch_state(r, Vec3::UnitY()), q.charges[0], q.charges[1]);
      CHECK(std::abs(c - r) <= 1e-12);
    }
    Rng rng(45);
    for (int i = 0; i < 1000; ++i) {
      const DensityMatrix rho = random_qubit(rng, 0.999);
      const Mat3 frame = adjoint_rotation(haar_su2(rng).matrix());
      Eigen::Matrix<double, 3, 2> axes;
      axes << frame.col(0), frame.col(2);
      const ChargeSet qs = spin_charges(axes, frame);
      const double c = robertson_C(rho, qs.charges[0], qs.charges[1]);
      CHECK(c >= 0.0);
      CHECK(c <= 1.0 + 1e-9);
    }
  }
}
