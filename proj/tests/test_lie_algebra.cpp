#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "harmform/lie_algebra.hpp"
#include "harmform/tolerances.hpp"

using namespace harmform;

namespace {

// Independent Killing-form oracle: assemble ad matrices entry by entry from
// the raw structure constants and take traces, without going through
// LieAlgebra::ad or killing_form.
Eigen::MatrixXd killing_by_traces(const LieAlgebra& alg) {
  const int n = alg.dim();
  std::vector<Eigen::MatrixXd> ad(n, Eigen::MatrixXd::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) ad[i](k, j) = alg.structure(i, j, k);
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = (ad[i] * ad[j]).trace();
  return out;
}

double jacobi_by_definition(const LieAlgebra& alg) {
  const int n = alg.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double acc = 0.0;
          for (int m = 0; m < n; ++m)
            acc += alg.structure(i, j, m) * alg.structure(m, k, l) +
                   alg.structure(j, k, m) * alg.structure(m, i, l) +
                   alg.structure(k, i, m) * alg.structure(m, j, l);
          worst = std::max(worst, std::abs(acc));
        }
  return worst;
}

}  // namespace

TEST_CASE("su(2): cyclic structure constants and kappa = -2 I") {
  LieAlgebra g = su(2);
  REQUIRE(g.dim() == 3);
  CHECK(g.structure(0, 1, 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.structure(1, 2, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.structure(2, 0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::MatrixXd kappa = killing_form(g).matrix;
  CHECK((kappa + 2.0 * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <=
        1e-12);
  // oracle agreement
  CHECK((kappa - killing_by_traces(g)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(jacobi_residual(g) <= 1e-12);
}

TEST_CASE("su(n) rejects n < 2") {
  CHECK_THROWS(su(1));
  CHECK_THROWS(su(0));
}

TEST_CASE("su(3) adapted basis reproduces the torus-adapted brackets") {
  LieAlgebra g = su3_adapted();
  REQUIRE(g.dim() == 8);
  // Constructor basis is orthonormal for -2 Re tr(XY); the kappa-orthonormal
  // basis is scaled by 1/sqrt(3), dividing every structure constant by
  // sqrt(3).  In that basis the brackets closing into the torus must be
  //   [e3,e6] = (sqrt3/6) e1 - (1/2) e2,
  //   [e4,e7] = (sqrt3/6) e1 + (1/2) e2,
  //   [e5,e8] = (sqrt3/3) e1.
  const double s3 = std::sqrt(3.0);
  auto c = [&](int i, int j, int k) { return g.structure(i, j, k) / s3; };
  CHECK(c(2, 5, 0) == doctest::Approx(s3 / 6).epsilon(1e-12));
  CHECK(c(2, 5, 1) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(c(3, 6, 0) == doctest::Approx(s3 / 6).epsilon(1e-12));
  CHECK(c(3, 6, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c(4, 7, 0) == doctest::Approx(s3 / 3).epsilon(1e-12));
  CHECK(std::abs(c(4, 7, 1)) <= 1e-12);
  // [e1,e2] = [e2,e5] = [e2,e8] = 0
  for (int k = 0; k < 8; ++k) {
    CHECK(std::abs(g.structure(0, 1, k)) <= 1e-12);
    CHECK(std::abs(g.structure(1, 4, k)) <= 1e-12);
    CHECK(std::abs(g.structure(1, 7, k)) <= 1e-12);
  }
  // the only nonzero products c_ij^1 c_ij^2 come from the pairs (3,6), (4,7)
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) {
      double prod = g.structure(i, j, 0) * g.structure(i, j, 1);
      bool expected = (i == 2 && j == 5) || (i == 3 && j == 6);
      if (expected)
        CHECK(std::abs(prod) > 0.01);
      else
        CHECK(std::abs(prod) <= 1e-12);
    }
  CHECK(jacobi_residual(g) <= 1e-12);
}

TEST_CASE("so(n): nice basis, unit-magnitude constants, kappa scaling") {
  LieAlgebra g3 = so(3);
  REQUIRE(g3.dim() == 3);
  // basis order e12, e13, e23; [e12,e13] = -e23
  CHECK(g3.structure(0, 1, 2) == doctest::Approx(-1.0).epsilon(1e-12));
  Eigen::MatrixXd kappa3 = killing_form(g3).matrix;
  CHECK((kappa3 + 2.0 * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <=
        1e-12);

  LieAlgebra g5 = so(5);
  REQUIRE(g5.dim() == 10);
  // niceness: c_ij^k c_ij^l = 0 for k != l
  for (int i = 0; i < 10; ++i)
    for (int j = i + 1; j < 10; ++j)
      for (int k = 0; k < 10; ++k)
        for (int l = k + 1; l < 10; ++l)
          CHECK(std::abs(g5.structure(i, j, k) * g5.structure(i, j, l)) <=
                1e-12);
  // kappa(e_rs, e_rs) = -2(n-2)
  Eigen::MatrixXd kappa5 = killing_form(g5).matrix;
  CHECK((kappa5 + 6.0 * Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() <=
        1e-11);
  CHECK((kappa5 - killing_by_traces(g5)).cwiseAbs().maxCoeff() <= 1e-11);

  CHECK_THROWS(so(4));
  CHECK_THROWS(so(2));
}

TEST_CASE("direct sums: blocks, cross brackets, block-diagonal kappa") {
  LieAlgebra g = direct_sum({su(2), su(3)});
  REQUIRE(g.dim() == 11);
  REQUIRE(g.ideal_blocks().size() == 2);
  CHECK(g.ideal_blocks()[0].begin == 0);
  CHECK(g.ideal_blocks()[0].size == 3);
  CHECK(g.ideal_blocks()[1].begin == 3);
  CHECK(g.ideal_blocks()[1].size == 8);

  LieAlgebra gg = direct_sum({su(2), su(2)});
  for (int i = 0; i < 3; ++i)
    for (int j = 3; j < 6; ++j)
      for (int k = 0; k < 6; ++k) CHECK(gg.structure(i, j, k) == 0.0);
  Eigen::MatrixXd kappa = killing_form(gg).matrix;
  CHECK((kappa + 2.0 * Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() <=
        1e-12);

  Eigen::MatrixXd kappa_mixed = killing_form(g).matrix;
  CHECK((kappa_mixed - killing_by_traces(g)).cwiseAbs().maxCoeff() <= 1e-11);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(-kappa_mixed);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);  // negative definite kappa
}

TEST_CASE("ad matrix") {
  LieAlgebra g = su(2);
  Eigen::MatrixXd ad0 = ad_matrix(g, Eigen::VectorXd::Unit(3, 0));
  // [e1, e2] = e3, [e1, e3] = -e2
  CHECK(ad0(2, 1) == doctest::Approx(1.0));
  CHECK(ad0(1, 2) == doctest::Approx(-1.0));
  CHECK(ad_matrix(g, Eigen::VectorXd::Zero(3)).cwiseAbs().maxCoeff() == 0.0);
  LieAlgebra flat = abelian(2);
  CHECK(ad_matrix(flat, Eigen::VectorXd::Ones(2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS(ad_matrix(g, Eigen::VectorXd::Zero(4)));
}

TEST_CASE("jacobi residual flags corrupted constants") {
  LieAlgebra g = su(3);
  CHECK(jacobi_residual(g) <= 1e-12);
  CHECK(jacobi_by_definition(g) <= 1e-12);

  // perturb one tensor entry (one-sided, as a corrupted input would be)
  std::vector<Eigen::MatrixXd> c(3, Eigen::MatrixXd::Zero(3, 3));
  LieAlgebra g2 = su(2);
  for (int k = 0; k < 3; ++k) c[k] = g2.bracket_component(k);
  c[2](0, 1) += 0.1;
  LieAlgebra bad(std::move(c), {{"g1", 0, 3, false}}, {}, false);
  double res = jacobi_residual(bad);
  CHECK(res > 0.05);
  CHECK(res == doctest::Approx(jacobi_by_definition(bad)).epsilon(1e-12));

  CHECK(jacobi_residual(abelian(4)) == 0.0);
}

TEST_CASE("killing form is ad-invariant; abelian kappa vanishes") {
  for (const LieAlgebra& g : {su(2), su(3), so(5), direct_sum({su(2), su(3)})})
    CHECK(ad_invariance_residual(g, killing_form(g)) <= 1e-10);
  CHECK(killing_form(abelian(2)).matrix.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("restrict_form") {
  LieAlgebra gg = direct_sum({su(2), su(2)});
  BilinearForm kappa = killing_form(gg);
  // identity basis leaves the form unchanged
  BilinearForm same = restrict_form(kappa, Eigen::MatrixXd::Identity(6, 6));
  CHECK((same.matrix - kappa.matrix).cwiseAbs().maxCoeff() == 0.0);
  // diagonal su(2) inside su(2)+su(2): kappa restricts to -4 I
  Eigen::MatrixXd diag(6, 3);
  diag << Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Identity(3, 3);
  BilinearForm r = restrict_form(kappa, diag);
  CHECK((r.matrix + 4.0 * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <=
        1e-12);
  // zero form restricts to zero
  BilinearForm zero{Eigen::MatrixXd::Zero(6, 6), true};
  CHECK(restrict_form(zero, diag).matrix.cwiseAbs().maxCoeff() == 0.0);
  // rank-deficient basis rejected
  Eigen::MatrixXd bad(6, 2);
  bad.col(0) = Eigen::VectorXd::Unit(6, 0);
  bad.col(1) = 2.0 * Eigen::VectorXd::Unit(6, 0);
  CHECK_THROWS(restrict_form(kappa, bad));
}
