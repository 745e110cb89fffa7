#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "qdecouple/qmat.hpp"
#include "qdecouple/state_io.hpp"

using namespace qdecouple;
using qdecouple::testing::diag;

namespace {

DensityOperator phi2() { return maximally_entangled(2, "A", "B"); }

}  // namespace

TEST_CASE("shape parsing and validation") {
  const auto s = SystemShape::parse("A=4,E=2");
  CHECK(s.total_dim() == 8);
  CHECK(s.dim_of("E") == 2);
  CHECK(s.labels() == std::vector<std::string>{"A", "E"});
  CHECK(s.to_string() == "A=4,E=2");
  CHECK_THROWS_AS(SystemShape::parse("A=4,A=2"), Error);
  CHECK_THROWS_AS(SystemShape::parse("A=0"), Error);
  CHECK_THROWS_AS(SystemShape::parse("A4"), Error);
  try {
    s.dim_of("Z");
    FAIL("expected UnknownLabel");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownLabel);
  }
}

TEST_CASE("density operator invariants") {
  CHECK_NOTHROW(DensityOperator(diag({0.25, 0.75})));
  CHECK_THROWS_AS(DensityOperator(diag({0.5, 0.6})), Error);
  CHECK_THROWS_AS(DensityOperator(diag({1.2, -0.2})), Error);
  Matrix nh = diag({0.5, 0.5});
  nh(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityOperator{nh}, Error);
  // Tiny negative eigenvalues are tolerated.
  CHECK_NOTHROW(DensityOperator(diag({1.0 + 5e-11, -5e-11})));
  CHECK_THROWS_AS(DensityOperator(diag({0.5, 0.5}), SystemShape::parse("A=3")), Error);
}

TEST_CASE("eig_hermitian") {
  auto sd = eig_hermitian(identity(3));
  CHECK(sd.eigenvalues.isApprox(RVector::Ones(3)));

  sd = eig_hermitian(diag({-1.0, 2.0}));
  CHECK(sd.eigenvalues(0) == doctest::Approx(2.0));
  CHECK(sd.eigenvalues(1) == doctest::Approx(-1.0));
  CHECK(std::abs(std::abs(sd.eigenvectors(1, 0)) - 1.0) < 1e-12);

  RngStream s(7, 0);
  for (int d : {6, 16, 32}) {
    const Matrix h = random_hermitian(d, s);
    sd = eig_hermitian(h);
    const Matrix back = sd.eigenvectors * sd.eigenvalues.cast<Complex>().asDiagonal() * sd.eigenvectors.adjoint();
    CHECK((back - h).norm() <= 1e-9 * (1.0 + h.norm()));
    CHECK((sd.eigenvectors.adjoint() * sd.eigenvectors - identity(d)).cwiseAbs().maxCoeff() < 1e-10);
  }

  Matrix bad = random_hermitian(3, s);
  bad(0, 1) += 1e-3;
  try {
    eig_hermitian(bad);
    FAIL("expected NonHermitianInput");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonHermitianInput);
  }
}

TEST_CASE("tensor products") {
  CHECK(tensor(identity(2), identity(2)).isApprox(identity(4)));
  CHECK(tensor(diag({1, 0}), diag({0, 1})).isApprox(diag({0, 1, 0, 0})));
  RngStream s(8, 0);
  const Matrix x = ginibre(3, 3, s), y = ginibre(2, 2, s);
  CHECK(std::abs(tensor(x, y).trace() - x.trace() * y.trace()) < 1e-12);
}

TEST_CASE("partial trace") {
  RngStream s(9, 0);
  const Matrix ra = random_density(2, 2, s).matrix();
  const Matrix rb = random_density(3, 2, s).matrix();
  const SystemShape ab = SystemShape::parse("A=2,B=3");
  CHECK(partial_trace(tensor(ra, rb), ab, {"A"}).matrix.isApprox(ra, 1e-12));
  CHECK(partial_trace(tensor(ra, rb), ab, {"B"}).matrix.isApprox(rb, 1e-12));

  const DensityOperator p = phi2();
  CHECK((partial_trace(p, {"B"}).matrix() - identity(2) / 2.0).norm() < 1e-12);

  const auto abc = SystemShape::parse("A=2,B=3,C=2");
  const Matrix r = random_density(12, 5, s).matrix();
  const Matrix via_ab = partial_trace(partial_trace(r, abc, {"A", "B"}).matrix,
                                      SystemShape::parse("A=2,B=3"), {"A"}).matrix;
  const Matrix via_ac = partial_trace(partial_trace(r, abc, {"A", "C"}).matrix,
                                      SystemShape::parse("A=2,C=2"), {"A"}).matrix;
  CHECK((via_ab - via_ac).norm() < 1e-12);

  // Output of a PSD input stays PSD with the same trace.
  const Matrix red = partial_trace(r, abc, {"B"}).matrix;
  CHECK(std::abs(red.trace().real() - 1.0) < 1e-12);
  CHECK(eig_hermitian(red).eigenvalues.minCoeff() > -1e-10);

  // Reordering factors is undone by the inverse permutation.
  const Operator op{r, abc};
  const Operator moved = reorder(op, {"C", "A", "B"});
  CHECK(moved.shape.to_string() == "C=2,A=2,B=3");
  CHECK((reorder(moved, {"A", "B", "C"}).matrix - r).norm() < 1e-14);
}

TEST_CASE("trace distance and fidelity") {
  const Matrix r = diag({0.7, 0.3});
  CHECK(trace_distance(r, r) == doctest::Approx(0.0));
  CHECK(trace_distance(diag({1, 0}), diag({0, 1})) == doctest::Approx(1.0));
  CHECK(trace_distance(r, diag({0.5, 0.5})) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(fidelity(r, r) == doctest::Approx(1.0));
  CHECK(fidelity(diag({1, 0}), diag({0, 1})) == doctest::Approx(0.0));
  CHECK(fidelity(diag({0.5, 0.5}), diag({0.9, 0.1})) ==
        doctest::Approx(std::sqrt(0.45) + std::sqrt(0.05)).epsilon(1e-12));
}

TEST_CASE("Haar sampling") {
  RngStream s(10, 0);
  const auto u1 = sample_haar_unitary(1, s);
  CHECK(std::abs(std::abs(u1.matrix()(0, 0)) - 1.0) < 1e-12);
  for (int d : {2, 3, 5, 8}) {
    const Matrix u = sample_haar_unitary(d, s).matrix();
    CHECK((u.adjoint() * u - identity(d)).cwiseAbs().maxCoeff() <= 1e-10);
  }

  // Twirling X = diag(1, 0) gives Tr[X] I/2.
  const int n = 10000;
  const Matrix x = diag({1, 0});
  Matrix acc = Matrix::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    RngStream si(11, static_cast<std::uint64_t>(i));
    const Matrix u = sample_haar_unitary(2, si).matrix();
    acc += u * x * u.adjoint();
  }
  acc /= n;
  CHECK((acc - identity(2) / 2.0).norm() <= 5.0 / std::sqrt(n));

  // Without the phase fix the first column phase is biased; with it, the
  // mean of U_00 vanishes.
  Complex mean = 0.0;
  for (int i = 0; i < n; ++i) {
    RngStream si(12, static_cast<std::uint64_t>(i));
    mean += sample_haar_unitary(2, si).matrix()(0, 0);
  }
  CHECK(std::abs(mean / static_cast<double>(n)) < 5.0 / std::sqrt(n));
}

TEST_CASE("random density operators") {
  RngStream s(13, 0);
  const auto pure = random_density(4, 1, s);
  CHECK(eig_hermitian(pure.matrix()).eigenvalues(0) == doctest::Approx(1.0));
  const auto full = random_density(4, 4, s);
  CHECK(eig_hermitian(full.matrix()).eigenvalues.minCoeff() > 0.0);
  for (int i = 0; i < 100; ++i)
    CHECK(std::abs(random_density(3, 1 + i % 3, s).matrix().trace().real() - 1.0) <= 1e-12);
  CHECK_THROWS_AS(random_density(3, 4, s), Error);
}

TEST_CASE("purification") {
  RngStream s(14, 0);
  const auto pure = random_density(3, 1, s);
  CHECK(purify(pure).shape().dim_of("R") == 1);

  const auto half = purify(DensityOperator(identity(2) / 2.0));
  CHECK(half.shape().dim_of("R") == 2);
  const auto rho = half.density();
  CHECK((partial_trace(rho, {"R"}).matrix() - identity(2) / 2.0).norm() < 1e-12);
  CHECK((partial_trace(rho, {"S"}).matrix() - identity(2) / 2.0).norm() < 1e-12);

  const auto r3 = random_density(4, 3, s);
  const auto p = purify(r3);
  CHECK(p.shape().dim_of("R") == 3);
  CHECK((partial_trace(p.density(), {"S"}).matrix() - r3.matrix()).norm() <= 1e-9);
}

TEST_CASE("conjugation on a subsystem") {
  RngStream s(15, 0);
  const auto shape = SystemShape::parse("A=3,E=2");
  const Matrix xa = random_hermitian(3, s), xe = random_hermitian(2, s);
  const Matrix x = tensor(xa, xe);
  CHECK((conjugate_on_subsystem(x, shape, "A", UnitaryOperator(identity(3))) - x).norm() < 1e-14);
  const auto u = sample_haar_unitary(3, s);
  const Matrix y = conjugate_on_subsystem(x, shape, "A", u);
  CHECK((y - tensor(u.matrix() * xa * u.matrix().adjoint(), xe)).norm() < 1e-12);
  const Matrix h = random_hermitian(6, s);
  const Matrix hc = conjugate_on_subsystem(h, shape, "A", u);
  CHECK((eig_hermitian(h).eigenvalues - eig_hermitian(hc).eigenvalues).norm() < 1e-12);
}

TEST_CASE("swap operator") {
  CHECK(swap_operator(1).isApprox(identity(1)));
  const Matrix f = swap_operator(2);
  CHECK(f(1, 2) == Complex(1.0));
  CHECK(f(2, 1) == Complex(1.0));
  CHECK(f(0, 0) == Complex(1.0));
  CHECK(f(3, 3) == Complex(1.0));
  CHECK(f(1, 1) == Complex(0.0));
  RngStream s(16, 0);
  for (int i = 0; i < 100; ++i) {
    const Matrix a = ginibre(3, 3, s), b = ginibre(3, 3, s);
    CHECK(std::abs((a * b).trace() - (tensor(a, b) * swap_operator(3)).trace()) < 1e-12);
  }
}

TEST_CASE("rng streams are counter based") {
  RngStream a(42, 3), b(42, 3), c(42, 4);
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
  RngStream base(42, 3);
  auto s1 = base.substream(5), s2 = base.substream(5), s3 = base.substream(6);
  CHECK(s1.next_u64() == s2.next_u64());
  CHECK(s1.next_u64() != s3.next_u64());
  double m = 0.0, v = 0.0;
  RngStream n(1, 1);
  for (int i = 0; i < 20000; ++i) {
    const double z = n.normal();
    m += z;
    v += z * z;
  }
  CHECK(std::abs(m / 20000) < 0.03);
  CHECK(std::abs(v / 20000 - 1.0) < 0.05);
}

TEST_CASE("state file round trip") {
  RngStream s(17, 0);
  const auto rho = random_density(6, 3, s, SystemShape::parse("A=3,E=2"));
  const auto back = parse_state(dump_state(rho));
  CHECK(back.shape() == rho.shape());
  CHECK((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff() == 0.0);

  const auto expect_kind = [](const std::string& text, ErrorKind kind) {
    try {
      parse_state(text);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == kind);
    }
  };
  expect_kind("{not json", ErrorKind::Parse);
  expect_kind(R"({"shape":[{"label":"A","dim":2}]})", ErrorKind::Parse);
  expect_kind(R"({"shape":[{"label":"A","dim":2}],"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]})",
              ErrorKind::InvariantViolation);
  expect_kind(R"({"shape":[{"label":"A","dim":3}],"matrix":[[[1,0],[0,0]],[[0,0],[0,0]]]})",
              ErrorKind::Parse);
}
