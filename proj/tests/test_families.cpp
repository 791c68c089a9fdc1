#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "copulalab/core.hpp"
#include "copulalab/families.hpp"

using namespace copulalab;
using namespace copulalab::families;

namespace {

DependenceFunction pi2() { return frechet(FrechetKind::Pi, 2); }
DependenceFunction m2() { return frechet(FrechetKind::M, 2); }
DependenceFunction w2() { return frechet(FrechetKind::W, 2); }

using Rows = std::vector<std::vector<double>>;
using Blocks = std::vector<SStructure::Block>;

}  // namespace

TEST_CASE("frechet bounds and tags") {
    CHECK(frechet(FrechetKind::W, 3)(UnitPoint(0.9, 0.9, 0.9)) ==
          doctest::Approx(0.7).epsilon(1e-15));
    CHECK(m2()(0.3, 0.8) == 0.3);
    CHECK(pi2()(0.5, 0.5) == 0.25);
    CHECK(w2().class_tag() == ClassTag::copula);
    CHECK(frechet(FrechetKind::W, 3).class_tag() == ClassTag::proper_quasi_copula);
    CHECK(frechet(FrechetKind::M, 4).class_tag() == ClassTag::copula);
    CHECK(pi2().exact_kernel().has_value());
    CHECK_THROWS_AS(frechet(FrechetKind::M, 1), std::invalid_argument);
}

TEST_CASE("ordinal sum: blocks, off-block branch, hand oracle") {
    // Single full-interval block reproduces the component.
    const auto full = ordinal_sum({{0.0, 1.0, c_theta(0.7)}});
    const auto reference = c_theta(0.7);
    Lcg64 rng(3);
    for (int t = 0; t < 100; ++t) {
        const double u = rng.next_unit(), v = rng.next_unit();
        CHECK(full(u, v) == doctest::Approx(reference(u, v)).epsilon(1e-15));
    }

    const auto half = ordinal_sum({{0.0, 0.5, pi2()}});
    CHECK(half(0.75, 0.75) == 0.75);  // min branch off the block

    // Hand evaluation of the displayed formula: a + (b-a) * Pi(1/2, 1/2).
    const double inside = 0.0 + 0.5 * (0.5 * 0.5);
    CHECK(half(0.25, 0.25) == doctest::Approx(inside).epsilon(1e-15));
    CHECK(inside == 0.125);

    CHECK(half.class_tag() == ClassTag::copula);
    CHECK(ordinal_sum({{0.0, 0.5, q_c_quasi(m2())}}).class_tag() == ClassTag::quasi_copula);
    CHECK_THROWS_AS(ordinal_sum({{0.0, 0.6, pi2()}, {0.5, 1.0, pi2()}}), std::invalid_argument);
    CHECK_THROWS_AS(ordinal_sum({{0.2, 0.2, pi2()}}), std::invalid_argument);
}

TEST_CASE("w-ordinal sum: empty spec is W, full block is the component") {
    const auto empty = w_ordinal_sum({});
    Lcg64 rng(11);
    for (int t = 0; t < 50; ++t) {
        const double u = rng.next_unit(), v = rng.next_unit();
        CHECK(empty(u, v) == std::max(u + v - 1.0, 0.0));
    }
    const auto whole = w_ordinal_sum({{0.0, 1.0, c_lip(0.3)}});
    const auto ref = c_lip(0.3);
    for (int t = 0; t < 50; ++t) {
        const double u = rng.next_unit(), v = rng.next_unit();
        CHECK(whole(u, v) == doctest::Approx(ref(u, v)).epsilon(1e-15));
    }

    // Hand evaluation of the block formula: (1/3) * M(1/2, 1/2) on
    // [0,1/3] x [2/3,1].
    const auto block = w_ordinal_sum({{0.0, 1.0 / 3.0, m2()}});
    CHECK(block(1.0 / 6.0, 5.0 / 6.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK_THROWS_AS(w_ordinal_sum({{0.0, 0.6, m2()}, {0.5, 1.0, m2()}}), std::invalid_argument);
}

TEST_CASE("c_theta: margins, example values, shuffle cross-check") {
    const auto ct = c_theta(0.7);
    for (double v : {0.0, 0.3, 0.7, 0.95, 1.0}) CHECK(ct(1.0, v) == doctest::Approx(v).epsilon(1e-15));
    CHECK(ct(0.2, 0.9) == doctest::Approx(0.2).epsilon(1e-15));

    // On [1-theta,1] x [0,theta] the value follows the lower carrier
    // segment, min{u+theta-1, v}.
    const auto edge = c_theta(2.0 / 3.0);
    CHECK(edge(0.5, 0.5) == doctest::Approx(0.5 + 2.0 / 3.0 - 1.0).epsilon(1e-12));

    // The family is the two-block antidiagonal pasting of M.
    for (double theta : {2.0 / 3.0, 0.7, 0.75}) {
        const auto direct = c_theta(theta);
        const auto pasted =
            w_ordinal_sum({{0.0, 1.0 - theta, m2()}, {1.0 - theta, 1.0, m2()}});
        Lcg64 rng(23);
        for (int t = 0; t < 300; ++t) {
            const double u = rng.next_unit(), v = rng.next_unit();
            CHECK(direct(u, v) == doctest::Approx(pasted(u, v)).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(c_theta(0.9), std::invalid_argument);
    CHECK_THROWS_AS(c_theta(0.5), std::invalid_argument);
}

TEST_CASE("maximal-asymmetry operator") {
    for (const auto& base : {pi2(), m2(), w2()}) {
        const auto image = phi_max_asym(base);
        CHECK(image(2.0 / 3.0, 1.0 / 3.0) == 1.0 / 3.0);
        CHECK(image(1.0 / 3.0, 2.0 / 3.0) == 0.0);
        for (double v : {0.0, 0.25, 0.5, 0.8, 1.0})
            CHECK(image(1.0, v) == doctest::Approx(v).epsilon(1e-15));
        for (double u : {0.0, 0.25, 0.5, 0.8, 1.0})
            CHECK(image(u, 1.0) == doctest::Approx(u).epsilon(1e-15));
    }
    // First-branch hand evaluation: (1/3) M(1/2, 1/2).
    CHECK(phi_max_asym(m2())(1.0 / 6.0, 5.0 / 6.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));

    // Affine in the argument.
    const auto phi_mix = phi_max_asym(mix(0.4, pi2(), m2()));
    const auto mix_phi = mix(0.4, phi_max_asym(pi2()), phi_max_asym(m2()));
    Lcg64 rng(31);
    for (int t = 0; t < 200; ++t) {
        const double u = rng.next_unit(), v = rng.next_unit();
        CHECK(phi_mix(u, v) == doctest::Approx(mix_phi(u, v)).epsilon(1e-15));
    }
    CHECK_THROWS_AS(phi_max_asym(frechet(FrechetKind::Pi, 3)), std::invalid_argument);
}

TEST_CASE("lipschitz families: closed forms and mixtures") {
    CHECK(c_lip(0.0)(0.2, 0.6) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(c_lip(0.0)(0.2, 0.6) == std::min({0.2, 0.6, (0.2 + 0.6) / 2.0}));
    CHECK(d_lip(0.5)(0.4, 0.4) == doctest::Approx(0.4).epsilon(1e-15));

    const auto pure = c_lambda(1.0, 0.3, 0.8);
    const auto ref = c_lip(0.3);
    Lcg64 rng(7);
    for (int t = 0; t < 100; ++t) {
        const double u = rng.next_unit(), v = rng.next_unit();
        CHECK(pure(u, v) == doctest::Approx(ref(u, v)).epsilon(1e-15));
    }
    const auto other = c_lambda(0.0, 0.3, 0.8);
    const auto dref = d_lip(0.8);
    for (int t = 0; t < 100; ++t) {
        const double u = rng.next_unit(), v = rng.next_unit();
        CHECK(other(u, v) == doctest::Approx(dref(u, v)).epsilon(1e-15));
    }
    CHECK_THROWS_AS(c_lip(1.2), std::invalid_argument);
    CHECK_THROWS_AS(d_lip(0.4), std::invalid_argument);
    CHECK_THROWS_AS(c_lambda(1.5, 0.5, 0.75), std::invalid_argument);
}

TEST_CASE("almost disjoint prefix families") {
    const AlmostDisjointIndex zero(0.0);
    const AlmostDisjointIndex one(1.0);
    CHECK((zero.elements_up_to(16) == std::vector<std::uint64_t>{2, 4, 8, 16}));
    CHECK((one.elements_up_to(31) == std::vector<std::uint64_t>{3, 7, 15, 31}));
    CHECK((AlmostDisjointIndex(0.5).elements_up_to(24) == std::vector<std::uint64_t>{3, 6, 12, 24}));

    // Disjointness of the two extremes on a long initial segment.
    for (std::uint64_t n = 1; n <= 4096; ++n)
        CHECK_FALSE((zero.contains(n) && one.contains(n)));

    // Pairwise intersections are finite: once prefixes diverge, no further
    // common elements appear.
    const double alphas[] = {0.0, 1.0, 0.5, 0.25, 2.0 / 3.0};
    for (double a : alphas)
        for (double b : alphas) {
            if (a == b) continue;
            const AlmostDisjointIndex ka(a), kb(b);
            int common_above_64 = 0;
            for (std::uint64_t n = 64; n <= 65536; ++n)
                if (ka.contains(n) && kb.contains(n)) ++common_above_64;
            CHECK(common_above_64 == 0);
        }

    // Each family is infinite: exactly one element per binary length.
    const AlmostDisjointIndex third(1.0 / 3.0);
    CHECK(third.elements_up_to(1ULL << 12).size() == 11);
    CHECK((third.elements_up_to(42) == std::vector<std::uint64_t>{2, 5, 10, 21, 42}));
    CHECK_FALSE(third.contains(1));
    CHECK_THROWS_AS(AlmostDisjointIndex(1.5), std::invalid_argument);
}

TEST_CASE("a_alpha ordinal sums follow the membership pattern") {
    const double c = 0.5, a = 0.75;
    const auto f0 = a_alpha(AlmostDisjointIndex(0.0), c, a, 8);
    const auto f1 = a_alpha(AlmostDisjointIndex(1.0), c, a, 8);

    for (double v : {0.1, 0.4, 0.77, 1.0}) {
        CHECK(f0(1.0, v) == doctest::Approx(v).epsilon(1e-15));
        CHECK(f1(1.0, v) == doctest::Approx(v).epsilon(1e-15));
    }

    // Block n = 2 covers [1/3, 1/2]; 2 is in K_0 but not K_1, so the two
    // ordinal sums disagree there and match the hand formula.
    const double lo = 1.0 / 3.0, width = 0.5 - lo;
    const double u = 0.40, v = 0.45;
    const double su = (u - lo) / width, sv = (v - lo) / width;
    const double expect0 = lo + width * c_lip(c)(su, sv);
    const double expect1 = lo + width * d_lip(a)(su, sv);
    CHECK(f0(u, v) == doctest::Approx(expect0).epsilon(1e-14));
    CHECK(f1(u, v) == doctest::Approx(expect1).epsilon(1e-14));
    CHECK(f0(u, v) != f1(u, v));

    // Truncation depth only perturbs values near the origin.
    const auto deep = a_alpha(AlmostDisjointIndex(0.0), c, a, 32);
    CHECK(std::abs(deep(u, v) - f0(u, v)) <= 1.0 / 9.0);
    CHECK_THROWS_AS(a_alpha(AlmostDisjointIndex(0.0), c, a, 0), std::invalid_argument);
}

TEST_CASE("transformation matrices validate and locate strips") {
    CHECK_THROWS_AS(TransformationMatrix(Rows{{0.5, 0.4}}), std::invalid_argument);  // sum != 1
    CHECK_THROWS_AS(TransformationMatrix(Rows{{0.5, -0.1}, {0.3, 0.3}}), std::invalid_argument);
    CHECK_THROWS_AS(TransformationMatrix(Rows{{0.5, 0.5}, {0.0, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(TransformationMatrix(Rows{{0.5, 0.0}, {0.5, 0.0}}), std::invalid_argument);

    const TransformationMatrix t = corner_matrix(0.25);
    CHECK(t.entry(0, 0) == 0.125);
    CHECK(t.entry(1, 1) == 0.5);
    CHECK((t.column_edges() == std::vector<double>{0.0, 0.25, 0.75, 1.0}));
    CHECK((t.row_edges() == std::vector<double>{0.0, 0.25, 0.75, 1.0}));
    CHECK_THROWS_AS(corner_matrix(0.6), std::invalid_argument);
    CHECK_THROWS_AS(corner_matrix(0.25, 0.3), std::invalid_argument);
}

TEST_CASE("mass redistribution: identity, margins, corner split") {
    const auto identity = apply_transformation(TransformationMatrix(Rows{{1.0}}), c_theta(0.7));
    const auto ref = c_theta(0.7);
    Lcg64 rng(13);
    for (int t = 0; t < 200; ++t) {
        const double u = rng.next_unit(), v = rng.next_unit();
        CHECK(identity(u, v) == doctest::Approx(ref(u, v)).epsilon(1e-14));
    }

    const auto moved = apply_transformation(corner_matrix(0.25), pi2());
    CHECK(moved(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    for (double x : {0.1, 0.25, 0.5, 0.9}) {
        CHECK(moved(x, 1.0) == doctest::Approx(x).epsilon(1e-13));
        CHECK(moved(1.0, x) == doctest::Approx(x).epsilon(1e-13));
    }

    // The symmetric split a = r/2 reproduces the plain corner matrix.
    const auto split = apply_transformation(corner_matrix(0.25, 0.125), pi2());
    for (int t = 0; t < 200; ++t) {
        const double u = rng.next_unit(), v = rng.next_unit();
        CHECK(split(u, v) == doctest::Approx(moved(u, v)).epsilon(1e-14));
    }
    CHECK(check_copula_axioms(moved, 32, 1e-10).passed);
    CHECK_THROWS_AS(apply_transformation(corner_matrix(0.25), frechet(FrechetKind::Pi, 3)),
                    std::invalid_argument);
}

TEST_CASE("invariant copula fixed point") {
    const auto trivial = invariant_copula(TransformationMatrix(Rows{{1.0}}), 1e-12, 10);
    CHECK(trivial.converged);
    CHECK(trivial.iterations == 1);
    CHECK(trivial.residual == 0.0);
    CHECK(trivial.copula(0.3, 0.7) == doctest::Approx(0.21).epsilon(1e-14));

    const auto fractal = invariant_copula(corner_matrix(0.25), 1e-8, 100);
    CHECK(fractal.converged);
    CHECK(fractal.residual < 1e-8);
    for (int k = 0; k <= 16; ++k) {
        const double x = static_cast<double>(k) / 16;
        CHECK(fractal.copula(x, 1.0) == doctest::Approx(x).epsilon(1e-10));
        CHECK(fractal.copula(1.0, x) == doctest::Approx(x).epsilon(1e-10));
    }

    const auto starved = invariant_copula(corner_matrix(0.25, 0.125), 1e-14, 3);
    CHECK_FALSE(starved.converged);
    CHECK(starved.iterations == 3);
    CHECK(starved.residual > 0.0);
}

TEST_CASE("interval shuffles") {
    CHECK_THROWS_AS(interleaved_structure(1), std::invalid_argument);
    CHECK_THROWS_AS(SStructure(Blocks{{{0.0, 0.5}, {0.0, 0.5}}}), std::invalid_argument);  // length 1/2
    CHECK_THROWS_AS(SStructure(Blocks{{{0.0, 0.5}, {0.0, 0.6}}, {{0.5, 1.0}, {0.4, 1.0}}}),
                    std::invalid_argument);  // mismatched block sides

    // Diagonal blocks reproduce the ordinal sum of the base.
    const auto psi = psi_diagonal(m2(), 3);
    for (int k = 0; k <= 9; ++k)
        CHECK(psi(k / 9.0, k / 9.0) == doctest::Approx(k / 9.0).epsilon(1e-12));

    std::vector<OrdinalBlock> blocks;
    for (int n = 0; n < 9; ++n) blocks.push_back({n / 9.0, (n + 1) / 9.0, pi2()});
    const auto as_ordinal = ordinal_sum(std::move(blocks));
    const auto psi_pi = psi_diagonal(pi2(), 3);
    Lcg64 rng(41);
    for (int t = 0; t < 300; ++t) {
        const double u = rng.next_unit(), v = rng.next_unit();
        CHECK(psi_pi(u, v) == doctest::Approx(as_ordinal(u, v)).epsilon(1e-12));
    }

    // Pasting M into the diagonal blocks gives M back.
    const auto psi_m = psi_diagonal(m2(), 4);
    for (int t = 0; t < 300; ++t) {
        const double u = rng.next_unit(), v = rng.next_unit();
        CHECK(psi_m(u, v) == doctest::Approx(std::min(u, v)).epsilon(1e-12));
    }

    // Interleaved shuffles keep uniform margins and drift toward the
    // product as the blocks shrink.
    const auto theta2 = theta_shuffle(m2(), 2);
    for (int k = 0; k <= 8; ++k) {
        const double x = k / 8.0;
        CHECK(theta2(x, 1.0) == doctest::Approx(x).epsilon(1e-12));
        CHECK(theta2(1.0, x) == doctest::Approx(x).epsilon(1e-12));
    }
    const auto pi = pi2();
    auto grid_sup = [&pi](const DependenceFunction& f, int m) {
        double worst = 0.0;
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j <= m; ++j) {
                const double u = static_cast<double>(i) / m, v = static_cast<double>(j) / m;
                worst = std::max(worst, std::abs(f(u, v) - pi(u, v)));
            }
        return worst;
    };
    CHECK(grid_sup(theta_shuffle(m2(), 4), 128) < grid_sup(theta2, 128));
}

TEST_CASE("proper quasi-copula around a base copula") {
    const auto q = q_c_quasi(pi2());
    for (double v : {0.0, 0.2, 0.5, 0.9, 1.0}) CHECK(q(1.0, v) == doctest::Approx(v).epsilon(1e-15));

    // The middle square loses volume 1/3 regardless of the base.
    for (const auto& base : {pi2(), m2(), w2(), c_theta(0.7)}) {
        const auto quasi = q_c_quasi(base);
        const NBox middle(UnitPoint(1.0 / 3.0, 1.0 / 3.0), UnitPoint(2.0 / 3.0, 2.0 / 3.0));
        CHECK(box_volume(quasi, middle) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
    }

    // Continuity across the three branch seams.
    const auto qm = q_c_quasi(m2());
    for (double v = 1.0 / 3.0; v <= 2.0 / 3.0 + 1e-9; v += 1.0 / 24.0) {
        CHECK(qm(1.0 / 3.0 - 1e-12, v) == doctest::Approx(qm(1.0 / 3.0, v)).epsilon(1e-9));
        CHECK(qm(2.0 / 3.0 + 1e-12, v) == doctest::Approx(qm(2.0 / 3.0, v)).epsilon(1e-9));
    }
}

TEST_CASE("lift to higher dimension") {
    const auto q = q_c_quasi(m2());
    const auto lifted = lift_to_n(q, 3);
    Lcg64 rng(19);
    for (int t = 0; t < 100; ++t) {
        const double u = rng.next_unit(), v = rng.next_unit();
        const double coords[3] = {u, v, 1.0};
        CHECK(lifted(std::span<const double>(coords, 3)) == q(u, v));
    }
    const auto lifted4 = lift_to_n(q, 4);
    const double coords[4] = {0.5, 0.5, 0.5, 0.5};
    CHECK(lifted4(std::span<const double>(coords, 4)) ==
          doctest::Approx(q(0.5, 0.5) * 0.25).epsilon(1e-15));
    CHECK_THROWS_AS(lift_to_n(q, 2), std::invalid_argument);
}

TEST_CASE("diagonals and the diagonal copula") {
    const Diagonal square{[](double t) { return t * t; }};
    CHECK(validate_diagonal(square).passed);
    const auto k_delta = diagonal_copula(square);
    CHECK(k_delta(0.5, 0.5) == 0.25);

    const Diagonal of_m = diagonal_of(m2());
    for (double t : {0.0, 0.3, 0.8, 1.0}) CHECK(of_m.delta(t) == t);

    const Diagonal recovered = diagonal_of(k_delta);
    for (int i = 0; i <= 100; ++i) {
        const double t = static_cast<double>(i) / 100;
        CHECK(recovered.delta(t) == doctest::Approx(t * t).epsilon(1e-15));
    }

    CHECK_THROWS_AS(diagonal_copula(Diagonal{[](double t) { return 0.5 * t; }}),
                    std::invalid_argument);  // delta(1) != 1
    CHECK_THROWS_AS(diagonal_copula(Diagonal{[](double t) { return t * (2.0 - t) ; }}),
                    std::invalid_argument);  // exceeds t
    CHECK_FALSE(validate_diagonal(Diagonal{[](double t) { return 1.0 - t; }}).passed);
}

TEST_CASE("diagonal-preserving splice") {
    const Diagonal square{[](double t) { return t * t; }};
    const auto base = diagonal_copula(square);
    const auto q = q_c_quasi(m2());
    const double t0 = 0.5;
    const auto spliced = omega_tilde(base, t0, q);

    // Rescalers hit 0 and 1 at the rectangle corners: the spliced surface
    // agrees with the base on the rectangle edges.
    CHECK(spliced(0.0, 0.75) == doctest::Approx(base(0.0, 0.75)).epsilon(1e-14));
    CHECK(spliced(t0, 0.75) == doctest::Approx(base(t0, 0.75)).epsilon(1e-14));
    CHECK(spliced(0.3, t0) == doctest::Approx(base(0.3, t0)).epsilon(1e-14));
    CHECK(spliced(0.3, 1.0) == doctest::Approx(base(0.3, 1.0)).epsilon(1e-14));

    // Outside the rectangle nothing changes.
    CHECK(spliced(0.8, 0.9) == base(0.8, 0.9));
    CHECK(spliced(0.2, 0.3) == base(0.2, 0.3));

    // The diagonal section is preserved at every probe point.
    for (int i = 0; i <= 100; ++i) {
        const double t = static_cast<double>(i) / 100;
        CHECK(spliced(t, t) == doctest::Approx(t * t).epsilon(1e-10));
    }

    // Affine in the spliced quasi-copula.
    const auto qa = q_c_quasi(pi2()), qb = q_c_quasi(m2());
    const auto splice_mix = omega_tilde(base, t0, mix(0.3, qa, qb));
    const auto mix_splice = mix(0.3, omega_tilde(base, t0, qa), omega_tilde(base, t0, qb));
    Lcg64 rng(53);
    for (int t = 0; t < 200; ++t) {
        const double u = rng.next_unit(), v = rng.next_unit();
        CHECK(splice_mix(u, v) == doctest::Approx(mix_splice(u, v)).epsilon(1e-14));
    }

    // M fixes its diagonal everywhere, so the rectangle carries no volume.
    CHECK_THROWS_AS(omega_tilde(m2(), 0.5, q), std::invalid_argument);
}

TEST_CASE("oscillating density family") {
    const auto c3 = c_n_oscillating(3);
    for (double v : {0.0, 0.4, 1.0}) CHECK(c3(1.0, v) == doctest::Approx(v).epsilon(1e-15));

    const double expected =
        0.0625 + (1.0 - std::cos(2.0 * std::numbers::pi * 0.25)) *
                     (1.0 - std::cos(2.0 * std::numbers::pi * 3.0 * 0.25)) /
                     (8.0 * std::numbers::pi * std::numbers::pi * 3.0);
    CHECK(c3(0.25, 0.25) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(expected == doctest::Approx(0.0625 + 1.0 / (24.0 * std::numbers::pi * std::numbers::pi))
                          .epsilon(1e-12));

    REQUIRE(c3.exact_kernel().has_value());
    REQUIRE(c3.exact_density().has_value());
    const auto& kernel = *c3.exact_kernel();
    CHECK(kernel(0.2, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(kernel(0.2, 0.0) == doctest::Approx(0.0).epsilon(1e-12));

    double density_min = 1e9;
    const auto& density = *c3.exact_density();
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j)
            density_min = std::min(density_min, density((i + 0.5) / 64, (j + 0.5) / 64));
    CHECK(density_min >= 0.5 - 1e-12);
    CHECK_THROWS_AS(c_n_oscillating(0), std::invalid_argument);
}

TEST_CASE("convex mixtures validate weights") {
    std::vector<DependenceFunction> members{pi2(), m2()};
    CHECK_THROWS_AS(convex_mixture(members, {0.5}), std::invalid_argument);
    CHECK_THROWS_AS(convex_mixture(members, {-0.5, 1.5}), std::invalid_argument);
    const auto blend = convex_mixture(members, {2.0, 6.0});  // normalized to 1/4, 3/4
    CHECK(blend(0.5, 0.5) == doctest::Approx(0.25 * 0.25 + 0.75 * 0.5).epsilon(1e-15));
    CHECK(blend.class_tag() == ClassTag::copula);
}
