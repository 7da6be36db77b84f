#include "generators.hpp"
#include "naqtur/qcore.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

using namespace naqtur;
using namespace naqtur::testing;

TEST_SUITE("qcore") {
  TEST_CASE("operator validation") {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(HermitianOperator{m}, ValidationError);

    CHECK_THROWS_AS(DensityMatrix{identity(2)}, ValidationError);  // trace 2
    CMatrix neg(2, 2);
    neg << 1.2, 0, 0, -0.2;
    CHECK_THROWS_AS(DensityMatrix{neg}, ValidationError);
    CHECK_NOTHROW(DensityMatrix{identity(2) / 2.0});

    CMatrix u = identity(2);
    u(0, 0) = 2.0;
    CHECK_THROWS_AS(UnitaryOperator{u}, ValidationError);
    CHECK_NOTHROW(UnitaryOperator{pauli_y()});
  }

  TEST_CASE("bloch_state range and limits") {
    CHECK_THROWS_AS(bloch_state(1.0, Vec3::UnitZ()), ValidationError);
    CHECK_THROWS_AS(bloch_state(-0.1, Vec3::UnitZ()), ValidationError);
    CHECK_THROWS_AS(bloch_state(0.5, Vec3(1, 1, 0)), ValidationError);
    CHECK(frobenius_norm(bloch_state(0.0, Vec3::UnitX()).matrix() - identity(2) / 2.0) < 1e-15);
    const Vec3 n = Vec3(1, -2, 2) / 3.0;
    CHECK((bloch_vector(bloch_state(0.7, n)) - 0.7 * n).norm() < 1e-14);
  }

  TEST_CASE("2x2 eigenvalues match the closed form") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
      const CMatrix h = random_hermitian(2, rng);
      const double a = h(0, 0).real(), d = h(1, 1).real();
      const double rad = std::sqrt((a - d) * (a - d) / 4 + std::norm(h(0, 1)));
      const RVector ev = hermitian_eig(h).eigenvalues;
      CHECK(ev(0) == doctest::Approx((a + d) / 2 - rad).epsilon(1e-12));
      CHECK(ev(1) == doctest::Approx((a + d) / 2 + rad).epsilon(1e-12));
    }
  }

  TEST_CASE("eigensolver reconstruction and orthonormality, dims 2 and 4") {
    Rng rng(12);
    for (int d : {2, 4}) {
      for (int i = 0; i < 1000; ++i) {
        const CMatrix h = random_hermitian(d, rng);
        const SpectralDecomposition s = hermitian_eig(h);
        CHECK(frobenius_norm(s.reconstruct() - h) <= 1e-10 * frobenius_norm(h));
        CHECK(frobenius_norm(s.eigenvectors.adjoint() * s.eigenvectors - identity(d)) < 1e-12);
        for (int k = 1; k < d; ++k) CHECK(s.eigenvalues(k - 1) <= s.eigenvalues(k));
        const Eigen::SelfAdjointEigenSolver<CMatrix> ref(h);
        CHECK((ref.eigenvalues() - s.eigenvalues).cwiseAbs().maxCoeff() < 1e-12 * (1 + frobenius_norm(h)));
      }
    }
  }

  TEST_CASE("degenerate spectrum and phase convention") {
    const SpectralDecomposition s = hermitian_eig(identity(4));
    CHECK(frobenius_norm(s.reconstruct() - identity(4)) < 1e-15);
    Rng rng(13);
    const SpectralDecomposition t = hermitian_eig(random_hermitian(4, rng));
    for (int k = 0; k < 4; ++k) {
      int first = 0;
      while (std::abs(t.eigenvectors(first, k)) <= 1e-12) ++first;
      CHECK(std::abs(t.eigenvectors(first, k).imag()) < 1e-14);
      CHECK(t.eigenvectors(first, k).real() > 0);
    }
  }

  TEST_CASE("symmetric_eig on real matrices") {
    Rng rng(14);
    for (int i = 0; i < 100; ++i) {
      const RMatrix a = random_spd(3, rng) - RMatrix::Identity(3, 3);
      const RealSpectralDecomposition s = symmetric_eig(a);
      const RMatrix back = s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.transpose();
      CHECK((back - a).norm() < 1e-12 * (1 + a.norm()));
    }
  }

  TEST_CASE("matrix functions against Eigen's MatrixFunctions") {
    Rng rng(15);
    std::uniform_real_distribution<double> spectrum(-5.0, 5.0);
    for (int d : {2, 4}) {
      for (int i = 0; i < 200; ++i) {
        Eigen::VectorXd w(d);
        for (int k = 0; k < d; ++k) w(k) = spectrum(rng);
        const CMatrix u = haar_unitary(d, rng).matrix();
        const CMatrix h = u * w.cast<cplx>().asDiagonal() * u.adjoint();
        const CMatrix e = exp_spectral(HermitianOperator(h)).matrix();
        const CMatrix e_ref = h.exp();
        CHECK(frobenius_norm(e - e_ref) < 1e-10 * frobenius_norm(e_ref));
        const double z = real_trace(e);
        const CMatrix back = matrix_log_psd(DensityMatrix(e / z)).matrix() + std::log(z) * identity(d);
        CHECK(frobenius_norm(back - h) < 1e-8);
      }
    }
    for (int i = 0; i < 100; ++i) {
      const DensityMatrix rho = random_density(4, rng);
      const CMatrix r = matrix_sqrt_psd(rho).matrix();
      CHECK(frobenius_norm(r * r - rho.matrix()) < 1e-12);
      CHECK(frobenius_norm(matrix_log_psd(rho).matrix() - rho.matrix().log()) < 1e-8);
    }
  }

  TEST_CASE("matrix_log_psd floors zero eigenvalues without renormalising") {
    CMatrix p = CMatrix::Zero(2, 2);
    p(0, 0) = 1.0;
    const CMatrix l = matrix_log_psd(DensityMatrix(p), 1e-12).matrix();
    CHECK(std::abs(l(0, 0)) < 1e-15);
    CHECK(l(1, 1).real() == doctest::Approx(std::log(1e-12)));
  }

  TEST_CASE("partial trace against explicit index sums") {
    Rng rng(16);
    for (int i = 0; i < 100; ++i) {
      const CMatrix m = random_complex(4, rng);
      CMatrix ta = CMatrix::Zero(2, 2), tb = CMatrix::Zero(2, 2);
      for (int a = 0; a < 2; ++a)
        for (int a2 = 0; a2 < 2; ++a2)
          for (int b = 0; b < 2; ++b) {
            ta(a, a2) += m(a * 2 + b, a2 * 2 + b);
            tb(a, a2) += m(b * 2 + a, b * 2 + a2);
          }
      CHECK(frobenius_norm(partial_trace(m, 2, 2, Subsystem::A) - ta) < 1e-14);
      CHECK(frobenius_norm(partial_trace(m, 2, 2, Subsystem::B) - tb) < 1e-14);
    }
  }

  TEST_CASE("property: Tr_B(A (x) B) = A Tr B for arbitrary operators") {
    Rng rng(17);
    for (int i = 0; i < 300; ++i) {
      const int da = 2 + i % 2, db = 2 + (i / 2) % 2;
      const CMatrix a = random_complex(da, rng), b = random_complex(db, rng);
      const CMatrix ab = tensor(a, b);
      const double scale = frobenius_norm(a) * frobenius_norm(b);
      CHECK(frobenius_norm(partial_trace(ab, da, db, Subsystem::A) - a * b.trace()) <= 1e-12 * scale);
      CHECK(frobenius_norm(partial_trace(ab, da, db, Subsystem::B) - b * a.trace()) <= 1e-12 * scale);
    }
  }

  TEST_CASE("property: reductions of states are states") {
    Rng rng(18);
    for (int i = 0; i < 500; ++i) {
      const DensityMatrix rho = random_density(4, rng);
      CHECK_NOTHROW(partial_trace(rho, 2, 2, Subsystem::A));
      CHECK_NOTHROW(partial_trace(rho, 2, 2, Subsystem::B));
    }
    CHECK_THROWS_AS(partial_trace(identity(4), 3, 2, Subsystem::A), ValidationError);
  }

  TEST_CASE("Haar SU(2) samples") {
    Rng rng(19);
    double mean_abs00 = 0.0;
    constexpr int n = 20000;
    for (int i = 0; i < n; ++i) {
      const CMatrix u = haar_su2(rng).matrix();
      CHECK(std::abs(u.determinant() - cplx(1.0, 0.0)) < 1e-12);
      mean_abs00 += std::norm(u(0, 0)) / n;
    }
    // E|U_00|^2 = 1/2 under Haar measure
    CHECK(mean_abs00 == doctest::Approx(0.5).epsilon(0.02));
  }

  TEST_CASE("Haar U(d) is unitary and seeded replay is exact") {
    Rng a(20), b(20);
    for (int i = 0; i < 50; ++i) {
      const CMatrix u = haar_unitary(4, a).matrix();
      CHECK(frobenius_norm(u.adjoint() * u - identity(4)) < 1e-12);
      CHECK(u == haar_unitary(4, b).matrix());
    }
  }

  TEST_CASE("random_unit_vector is uniform on the sphere") {
    Rng rng(21);
    Vec3 mean = Vec3::Zero();
    double zz = 0.0;
    constexpr int n = 20000;
    for (int i = 0; i < n; ++i) {
      const Vec3 v = random_unit_vector(rng);
      CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-14));
      mean += v / n;
      zz += v.z() * v.z() / n;
    }
    CHECK(mean.norm() < 0.03);
    CHECK(zz == doctest::Approx(1.0 / 3).epsilon(0.05));
  }

  TEST_CASE("su2_rotation and adjoint_rotation") {
    const CMatrix u = su2_rotation(Vec3::UnitZ(), std::numbers::pi / 2);
    // x rotates into y under a quarter turn about z
    const Mat3 r = adjoint_rotation(u);
    CHECK((r * Vec3::UnitX() - Vec3::UnitY()).norm() < 1e-14);
    Rng rng(22);
    for (int i = 0; i < 100; ++i) {
      const Mat3 q = adjoint_rotation(haar_su2(rng).matrix());
      CHECK((q.transpose() * q - Mat3::Identity()).norm() < 1e-12);
      CHECK(q.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("Pauli algebra") {
    const cplx i(0, 1);
    CHECK(frobenius_norm(pauli_x() * pauli_y() - i * pauli_z()) < 1e-15);
    CHECK(frobenius_norm(pauli_dot(Vec3(1, 2, 3)) - (pauli_x() + 2.0 * pauli_y() + 3.0 * pauli_z())) < 1e-15);
  }
}
