#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "harmform/exterior.hpp"
#include "harmform/linalg.hpp"
#include "harmform/space_spec.hpp"
#include "harmform/tolerances.hpp"

using namespace harmform;

namespace {

// Delta su(2) inside su(2)+su(2)
Embedding delta_su2_squared() {
  auto g = std::make_shared<LieAlgebra>(direct_sum({su(2), su(2)}));
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  return diagonal_embedding(g, su(2), {id, id});
}

// Delta su(2) inside su(2)^s
Embedding delta_su2_power(int s) {
  std::vector<LieAlgebra> parts(s, su(2));
  auto g = std::make_shared<LieAlgebra>(direct_sum(parts));
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  return diagonal_embedding(g, su(2), std::vector<Eigen::MatrixXd>(s, id));
}

Embedding from_spec(const std::string& text) {
  return *build_space(parse_spec_text(text)).embedding;
}

}  // namespace

TEST_CASE("diagonal embedding: homomorphism and shape") {
  Embedding e = delta_su2_squared();
  CHECK(e.sub_dim() == 3);
  CHECK(e.s() == 2);
  CHECK(e.homomorphism_residual() <= 1e-12);
  Eigen::MatrixXd expected(6, 3);
  expected << Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Identity(3, 3);
  CHECK((e.inclusion() - expected).cwiseAbs().maxCoeff() == 0.0);

  // a factor may be mapped to zero (alignment will reject it later)
  auto g = std::make_shared<LieAlgebra>(direct_sum({su(2), su(2)}));
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  Embedding half = diagonal_embedding(g, su(2), {id, Eigen::MatrixXd()});
  CHECK(half.sub_dim() == 3);
  CHECK_FALSE(alignment_check(half).is_aligned);

  // a non-homomorphism is rejected with the offending pair
  Eigen::MatrixXd skew = Eigen::MatrixXd::Identity(3, 3);
  skew(0, 0) = 2.0;
  CHECK_THROWS_WITH_AS(diagonal_embedding(g, su(2), {id, skew}),
                       doctest::Contains("not a homomorphism"),
                       std::invalid_argument);
}

TEST_CASE("killing constants: diagonal and block embeddings") {
  // Delta su(2) in su(2)+su(2): c_11 = c_21 = 1
  KillingConstants kc = killing_constants(delta_su2_squared());
  REQUIRE(kc.c.rows() == 2);
  REQUIRE(kc.c.cols() == 2);  // center column + one simple block
  CHECK(kc.c(0, 1) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(kc.c(1, 1) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(kc.ratio_residual <= 1e-9);

  // Delta su(2)^2 in su(4)+su(4): all c_ij = 1/2
  Embedding ex1 = from_spec(R"({
    "name": "su4^2 / delta su(2)^2",
    "g_factors": [{"type":"su","n":4},{"type":"su","n":4}],
    "k_blocks": [{"type":"su","n":2},{"type":"su","n":2}],
    "embedding": [
      [{"kind":"block","positions":[0]},{"kind":"block","positions":[2]}],
      [{"kind":"block","positions":[0]},{"kind":"block","positions":[2]}]
    ]
  })");
  KillingConstants kc1 = killing_constants(ex1);
  for (int i = 0; i < 2; ++i)
    for (int j = 1; j <= 2; ++j)
      CHECK(kc1.c(i, j) == doctest::Approx(0.5).epsilon(1e-9));

  // su(k) block in su(n): c = k/n
  Embedding blocks = from_spec(R"({
    "g_factors": [{"type":"su","n":5}],
    "k_blocks": [{"type":"su","n":2},{"type":"su","n":3}],
    "embedding": [[{"kind":"block","positions":[0]},
                   {"kind":"block","positions":[2]}]]
  })");
  KillingConstants kc2 = killing_constants(blocks);
  CHECK(kc2.c(0, 1) == doctest::Approx(2.0 / 5.0).epsilon(1e-9));
  CHECK(kc2.c(0, 2) == doctest::Approx(3.0 / 5.0).epsilon(1e-9));
}

TEST_CASE("alignment: rank-one factorization on bare constants") {
  // two identical columns (1/2, 1/2) -> c = (2,2), lambda = 1/4
  Eigen::MatrixXd cij(2, 2);
  cij << 0.5, 0.5, 0.5, 0.5;
  AlignedFactors f = align_constants(cij);
  REQUIRE(f.ok);
  CHECK(f.c(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.c(1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.lambda(0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(f.lambda(1) == doctest::Approx(0.25).epsilon(1e-12));

  Eigen::MatrixXd bad(2, 2);
  bad << 0.5, 0.2, 0.3, 0.5;
  CHECK_FALSE(align_constants(bad).ok);
}

TEST_CASE("alignment of catalog spaces") {
  // Delta K in K^s is aligned with c = (s,...,s)
  for (int s : {2, 3}) {
    AlignmentData a = alignment_check(delta_su2_power(s));
    REQUIRE(a.is_aligned);
    for (int i = 0; i < s; ++i)
      CHECK(a.c(i) == doctest::Approx(double(s)).epsilon(1e-9));
    CHECK(std::abs(a.c.cwiseInverse().sum() - 1.0) <= 1e-9);
    CHECK(a.lambda(0) * a.c(0) == doctest::Approx(1.0).epsilon(1e-9));
  }
  // simple k with nonzero projections is always aligned
  Embedding su33 = from_spec(R"({
    "g_factors": [{"type":"su","n":3},{"type":"su","n":3},{"type":"su","n":3}],
    "k_blocks": [{"type":"su","n":2}],
    "embedding": [[{"kind":"block","positions":[0]}],
                  [{"kind":"block","positions":[0]}],
                  [{"kind":"block","positions":[0]}]]
  })");
  AlignmentData a3 = alignment_check(su33);
  REQUIRE(a3.is_aligned);
  CHECK(a3.c(0) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(a3.lambda(0) == doctest::Approx(2.0 / 9.0).epsilon(1e-9));

  // torus case: su(3)^2 / delta T^2
  Embedding st = from_spec(R"({
    "g_factors": [{"type":"su","n":3},{"type":"su","n":3}],
    "k_blocks": [{"type":"torus","n":2}],
    "embedding": [[{"kind":"block","positions":[0]}],
                  [{"kind":"block","positions":[0]}]]
  })");
  AlignmentData at = alignment_check(st);
  REQUIRE(at.is_aligned);
  CHECK(at.c(0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(at.c(1) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("b3 dimension") {
  // trivial K: b3 = s
  auto g = std::make_shared<LieAlgebra>(direct_sum({su(2), su(2), su(2)}));
  ThirdCohomology triv = b3_dimension(Embedding::trivial(g));
  CHECK(triv.b3 == 3);
  CHECK(triv.d_gk == 0);

  // ex1 instance: kernel spanned by y = (1,-1)
  Embedding ex1 = from_spec(R"({
    "g_factors": [{"type":"su","n":4},{"type":"su","n":4}],
    "k_blocks": [{"type":"su","n":2},{"type":"su","n":2}],
    "embedding": [
      [{"kind":"block","positions":[0]},{"kind":"block","positions":[2]}],
      [{"kind":"block","positions":[0]},{"kind":"block","positions":[2]}]
    ]
  })");
  ThirdCohomology h1 = b3_dimension(ex1);
  CHECK(h1.b3 == 1);
  Eigen::Vector2d dir(1.0, -1.0);
  dir.normalize();
  CHECK(std::abs(std::abs(h1.kernel.col(0).dot(dir)) - 1.0) <= 1e-9);

  // su(n)^2 / delta T^{n-1}: b3 = 1
  Embedding st = from_spec(R"({
    "g_factors": [{"type":"su","n":3},{"type":"su","n":3}],
    "k_blocks": [{"type":"torus","n":2}],
    "embedding": [[{"kind":"block","positions":[0]}],
                  [{"kind":"block","positions":[0]}]]
  })");
  CHECK(b3_dimension(st).b3 == 1);

  // maximal torus in a single su(3): b3 = 0
  Embedding t2 = from_spec(R"({
    "g_factors": [{"type":"su","n":3}],
    "k_blocks": [{"type":"torus","n":2}],
    "embedding": [[{"kind":"block","positions":[0]}]]
  })");
  CHECK(b3_dimension(t2).b3 == 0);
  CHECK(b3_dimension(t2).d_gk == 1);

  // center span is independent of the chosen basis of z(k)
  Eigen::MatrixXd rot(2, 2);
  rot << 0.6, -0.8, 0.8, 0.6;
  Eigen::MatrixXd inc = st.inclusion() * rot;
  Embedding st_rot(st.ambient_ptr(), abelian(2), inc);
  CHECK(b3_dimension(st_rot).b3 == 1);
}

TEST_CASE("aligned split: eta constants and orthonormality") {
  auto e = std::make_shared<Embedding>(delta_su2_power(3));
  AlignmentData a = alignment_check(*e);
  REQUIRE(a.is_aligned);

  SUBCASE("standard metric: tail coefficients -1, -2") {
    ReductiveSplit split = aligned_split(e, a, Eigen::Vector3d(1, 1, 1));
    CHECK(split.aligned_info().tail_coeff(0) == doctest::Approx(-1.0));
    CHECK(split.aligned_info().tail_coeff(1) == doctest::Approx(-2.0));
    CHECK(split.consistency_residual() <= 1e-10);
    CHECK(split.p_dim() == 6);
    // blocks p_1..p_3 empty, two eta blocks of dim 3
    CHECK(split.blocks().size() == 5);
    CHECK(split.blocks()[0].size == 0);
    CHECK(split.blocks()[3].size == 3);
    CHECK(split.blocks()[4].size == 3);
  }
  SUBCASE("z = (1,1,2): tail coefficients -1, -1") {
    ReductiveSplit split = aligned_split(e, a, Eigen::Vector3d(1, 1, 2));
    CHECK(split.aligned_info().tail_coeff(0) == doctest::Approx(-1.0));
    CHECK(split.aligned_info().tail_coeff(1) == doctest::Approx(-1.0));
    CHECK(split.consistency_residual() <= 1e-10);
    // eta blocks are mutually g_b-orthogonal by construction; the gram
    // residual above already certifies it
  }
  CHECK_THROWS(aligned_split(e, a, Eigen::Vector3d(1, -1, 1)));
  AlignmentData broken;
  broken.is_aligned = false;
  CHECK_THROWS(aligned_split(e, broken, Eigen::Vector3d(1, 1, 1)));
}

TEST_CASE("adapted-basis structure constants follow the tilde pattern") {
  // nonempty isotropy blocks: su(3)^3 / delta su(2)
  SpaceSpec spec = parse_spec_text(R"({
    "g_factors": [{"type":"su","n":3},{"type":"su","n":3},{"type":"su","n":3}],
    "k_blocks": [{"type":"su","n":2}],
    "embedding": [[{"kind":"block","positions":[0]}],
                  [{"kind":"block","positions":[0]}],
                  [{"kind":"block","positions":[0]}]]
  })");
  BuiltSpace bs = build_space(spec);
  AlignmentData a = alignment_check(*bs.embedding);
  REQUIRE(a.is_aligned);
  Eigen::Vector3d z(1.0, 1.3, 0.7);
  ReductiveSplit split = aligned_split(bs.embedding, a, z);
  CHECK(split.consistency_residual() <= 1e-10);
  const AlignedInfo& info = split.aligned_info();
  const int s = 3;
  const int dk = split.k_dim();

  // k-structure constants in the adapted basis
  Eigen::MatrixXd kb = split.k_basis();
  auto cbar = [&](int al, int be, int ga) {
    Eigen::VectorXd br = split.algebra().bracket(info.adapted_k.col(al),
                                                 info.adapted_k.col(be));
    // <,> = -kappa_g restricted to k
    return -(killing_form(split.algebra()).matrix * info.adapted_k.col(ga))
                .dot(br);
  };

  // mixed pattern: for a pair inside p_i and a tilde block with paper
  // label J = s+jj, the bracket component is
  //   sqrt(B_2s/B_J) c^{2s}   when J >= i+s,
  //   A_J sqrt(B_2s/B_J) c^{2s}  when J = i+s-1,
  //   0                        when s < J < i+s-1.
  for (int pi = 1; pi <= s; ++pi) {
    const Block& blk = split.blocks()[pi - 1];
    for (int aa = blk.begin; aa < blk.end(); ++aa)
      for (int bb = aa + 1; bb < blk.end(); ++bb) {
        Eigen::VectorXd ck = split.bracket_k(aa, bb);
        for (int jj = 1; jj <= s - 1; ++jj) {
          const int paper_j = s + jj;
          const Block& tb = split.blocks()[s - 1 + jj];
          double factor;
          if (paper_j >= pi + s)
            factor = std::sqrt(info.k_norm_sq / info.norm_sq(jj - 1));
          else if (paper_j == pi + s - 1)
            factor = info.tail_coeff(jj - 1) *
                     std::sqrt(info.k_norm_sq / info.norm_sq(jj - 1));
          else
            factor = 0.0;
          for (int gg = 0; gg < dk; ++gg) {
            double lhs = split.bracket_p(aa, bb)(tb.begin + gg);
            CHECK(lhs ==
                  doctest::Approx(factor * ck(gg)).epsilon(1e-8).scale(1.0));
          }
        }
      }
  }

  // pure tilde: c_{i a, i b}^{j c} = cbar_{ab}^c / sqrt(B_j) for s < i < j
  const Block& t1 = split.blocks()[s];      // paper block s+1
  const Block& t2 = split.blocks()[s + 1];  // paper block s+2
  for (int aa = 0; aa < dk; ++aa)
    for (int bb = 0; bb < dk; ++bb)
      for (int gg = 0; gg < dk; ++gg) {
        double lhs =
            split.bracket_p(t1.begin + aa, t1.begin + bb)(t2.begin + gg);
        double expected = cbar(aa, bb, gg) / std::sqrt(info.norm_sq(1));
        CHECK(lhs == doctest::Approx(expected).epsilon(1e-8).scale(1.0));
      }
}

TEST_CASE("generic split agrees with the aligned decomposition") {
  auto e = std::make_shared<Embedding>(delta_su2_power(3));
  AlignmentData a = alignment_check(*e);
  Eigen::Vector3d z(1.0, 1.0, 2.0);
  ReductiveSplit al = aligned_split(e, a, z);
  ReductiveSplit gen = generic_split(e, z);
  CHECK(gen.consistency_residual() <= 1e-10);
  CHECK(gen.p_dim() == al.p_dim());
  // the union of the tilde blocks spans the same subspace
  Eigen::MatrixXd gb = al.gb();
  CHECK(projector_distance(al.p_basis(), gen.p_basis(), gb) <= 1e-9);

  // K trivial: p = g in one block
  auto g = std::make_shared<LieAlgebra>(su(2));
  ReductiveSplit triv =
      generic_split(std::make_shared<Embedding>(Embedding::trivial(g)),
                    Eigen::VectorXd::Ones(1));
  CHECK(triv.p_dim() == 3);
  CHECK(triv.blocks().size() == 1);

  // SU(3)/T^2: p has dimension 6
  SpaceSpec spec = parse_spec_text(R"({
    "g_factors": [{"type":"su","n":3}],
    "k_blocks": [{"type":"torus","n":2}],
    "embedding": [[{"kind":"block","positions":[0]}]]
  })");
  BuiltSpace bs = build_space(spec);
  ReductiveSplit t2 = generic_split(bs.embedding, Eigen::VectorXd::Ones(1));
  CHECK(t2.p_dim() == 6);
}

TEST_CASE("assumption check") {
  // Ledger-Obata: no isotropy blocks at all, conditions hold vacuously
  auto e = std::make_shared<Embedding>(delta_su2_power(3));
  ReductiveSplit lo =
      aligned_split(e, alignment_check(*e), Eigen::Vector3d(1, 1, 1));
  AssumptionReport rep = assumption_check(lo);
  CHECK(rep.ok());

  // principal so(3) in su(3), doubled: the 5-dimensional isotropy components
  // are not equivalent to the adjoint representation
  SpaceSpec spec = parse_spec_text(R"({
    "g_factors": [{"type":"su","n":3},{"type":"su","n":3}],
    "k_blocks": [{"type":"so","n":3}],
    "embedding": [[{"kind":"block","positions":[0]}],
                  [{"kind":"block","positions":[0]}]]
  })");
  BuiltSpace bs = build_space(spec);
  AlignmentData a = alignment_check(*bs.embedding);
  REQUIRE(a.is_aligned);
  ReductiveSplit prin =
      aligned_split(bs.embedding, a, Eigen::Vector2d(1, 1));
  CHECK(prin.blocks()[0].size == 5);
  AssumptionReport rep2 = assumption_check(prin);
  CHECK(rep2.ok());
  CHECK(rep2.intertwiner_dim.cwiseAbs().maxCoeff() == 0.0);

  // delta so(3) in so(5)^2 with the standard block embedding: the isotropy
  // contains copies of the adjoint representation, so the condition fails
  SpaceSpec spec2 = parse_spec_text(R"({
    "g_factors": [{"type":"so","n":5},{"type":"so","n":5}],
    "k_blocks": [{"type":"so","n":3}],
    "embedding": [[{"kind":"block","positions":[0]}],
                  [{"kind":"block","positions":[0]}]]
  })");
  BuiltSpace bs2 = build_space(spec2);
  AlignmentData a2 = alignment_check(*bs2.embedding);
  REQUIRE(a2.is_aligned);
  ReductiveSplit blockso =
      aligned_split(bs2.embedding, a2, Eigen::Vector2d(1, 1));
  AssumptionReport rep3 = assumption_check(blockso);
  CHECK_FALSE(rep3.no_adjoint_component);
}

TEST_CASE("killing constant range and full-projection edge") {
  // pi_i(k_j) = g_i gives c = 1 exactly
  Embedding full = delta_su2_squared();
  KillingConstants kc = killing_constants(full);
  CHECK(kc.c.maxCoeff() <= 1.0 + 1e-9);
  CHECK(kc.c(0, 1) == doctest::Approx(1.0));
}
