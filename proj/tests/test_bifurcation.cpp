#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ratetip/bifurcation.hpp"

using namespace ratetip;

namespace {

ModelParams params(double r, double m, double b, double bc) {
    ModelParams p;
    p.r = r;
    p.m = m;
    p.b = b;
    p.b_c = bc;
    return p;
}

std::size_t interior_count(const ModelParams& p) {
    std::size_t n = 0;
    for (const auto& e : equilibria(p))
        if (e.kind == EquilibriumKind::e3 || e.kind == EquilibriumKind::e4) ++n;
    return n;
}

} // namespace

TEST_CASE("transcritical curve values") {
    // b+b_c = 0: levels off at E c_max for large r
    CHECK(transcritical_m(1e6, params(1, 0.1, 0, 0)) == Catch::Approx(0.4).margin(1e-6));
    // hand evaluation at r = 1, b+b_c = 0.05
    CHECK(transcritical_m(1.0, params(1, 0.1, 0.025, 0.025)) ==
          Catch::Approx(0.4 * std::exp(-2.5) / 1.04).margin(1e-9));
    CHECK(transcritical_m(1.0, params(1, 0.1, 0.025, 0.025)) ==
          Catch::Approx(0.031571).margin(1e-6));
    // emerges from the origin
    CHECK(transcritical_m(1e-6, params(1, 0.1, 0.025, 0.025)) < 1e-8);
}

TEST_CASE("saddle-node half-line for b = b_c = 0.025") {
    const ModelParams p = params(1, 0.1, 0.025, 0.025);
    const auto sn = saddle_node_halfline(p);
    CHECK(sn.P_sn == Catch::Approx(13.789).margin(0.01));
    CHECK(sn.m_sn == Catch::Approx(0.13156).margin(5e-4));
    CHECK(sn.r_min == Catch::Approx(0.2758).margin(5e-4));
    // the end of the half-line lies on T
    CHECK(std::abs(transcritical_m(sn.r_min, p) - sn.m_sn) < 1e-9);
    // crossing S_e changes the interior equilibrium count by two
    CHECK(interior_count(params(1.0, sn.m_sn + 1e-4, 0.025, 0.025)) == 0);
    CHECK(interior_count(params(1.0, sn.m_sn - 1e-4, 0.025, 0.025)) == 2);
    CHECK_THROWS_AS(saddle_node_halfline(params(1, 0.1, 0, 0)), std::invalid_argument);
}

TEST_CASE("hopf slice at r = 1 against the dense-scan anchor") {
    const ModelParams p = params(1, 0.1, 0.025, 0.025);
    const auto mh = hopf_m_at_r(p, 1.0);
    REQUIRE(mh.has_value());
    CHECK(*mh == Catch::Approx(0.121306131943).margin(1e-6));
    // defining property: focus flips stability across the curve
    const auto below = find_equilibrium(params(1.0, *mh - 1e-3, 0.025, 0.025), EquilibriumKind::e3);
    const auto above = find_equilibrium(params(1.0, *mh + 1e-3, 0.025, 0.025), EquilibriumKind::e3);
    REQUIRE(below.has_value());
    REQUIRE(above.has_value());
    CHECK(below->stability == Stability::stable_focus);
    CHECK(above->stability == Stability::unstable_focus);
}

TEST_CASE("hopf slice in r at m = 0.12") {
    const auto rh = hopf_r_at_m(params(1, 0.12, 0.025, 0.025), 0.12, 0.3, 3.0);
    REQUIRE(rh.has_value());
    CHECK(*rh == Catch::Approx(1.070866153931).margin(1e-6));
}

TEST_CASE("hopf curve samples have positive determinant and tiny trace residual") {
    const ModelParams p = params(1, 0.1, 0.025, 0.025);
    const auto curve = hopf_curve(p, 0.75, 2.0, 9);
    REQUIRE(curve.points.size() >= 5);
    for (const auto& pt : curve.points) {
        const auto tr = ratetip::detail::trace_at_e3(p, pt.r, pt.m);
        const auto det = ratetip::detail::det_at_e3(p, pt.r, pt.m);
        REQUIRE(tr.has_value());
        REQUIRE(det.has_value());
        CHECK(std::abs(*tr) < 1e-9);
        CHECK(*det > 0.0);
        // the whole branch is subcritical at this (b, b_c)
        CHECK(pt.crit == Criticality::subcritical);
    }
}

TEST_CASE("Bogdanov-Takens point sits on the half-line with a double zero") {
    const ModelParams p = params(1, 0.1, 0.025, 0.025);
    const auto sn = saddle_node_halfline(p);
    const auto bt = bt_point(p);
    CHECK(bt.r == Catch::Approx(0.696572697066).margin(1e-6));
    CHECK(std::abs(bt.m - sn.m_sn) < 1e-12);
    // both eigenvalues vanish at the degenerate equilibrium
    ModelParams q = p;
    q.r = bt.r;
    q.m = bt.m;
    const State e{sn.P_sn, equilibrium_herbivore(sn.P_sn, q)};
    const Eig2 eigs = eigenvalues(jacobian(e, q));
    CHECK(std::abs(eigs.l1) + std::abs(eigs.l2) < 1e-6);
    REQUIRE(bt.bt_type.has_value());
    CHECK(*bt.bt_type == 2); // subcritical Hopf side at b = b_c = 0.025
}

TEST_CASE("hopf curve terminates on the BT point") {
    const ModelParams p = params(1, 0.1, 0.025, 0.025);
    const auto sn = saddle_node_halfline(p);
    const auto bt = bt_point(p);
    const auto m_far = hopf_m_at_r(p, bt.r + 0.08);
    const auto m_near = hopf_m_at_r(p, bt.r + 0.02);
    REQUIRE(m_far.has_value());
    REQUIRE(m_near.has_value());
    CHECK(std::abs(*m_near - sn.m_sn) < std::abs(*m_far - sn.m_sn));
    CHECK(std::abs(*m_near - sn.m_sn) < 2e-3);
    // no Hopf slice below the BT point
    CHECK_FALSE(hopf_m_at_r(p, bt.r - 0.05).has_value());
}

TEST_CASE("crossing T changes the interior equilibrium count by one") {
    const ModelParams base = params(1, 0.1, 0.025, 0.025);
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> ur(0.35, 2.5);
    int checked = 0;
    for (int k = 0; k < 20; ++k) {
        const double r = ur(rng);
        const double mT = transcritical_m(r, base);
        const std::size_t below = interior_count(params(r, mT * (1.0 - 1e-5), 0.025, 0.025));
        const std::size_t above = interior_count(params(r, mT * (1.0 + 1e-5), 0.025, 0.025));
        CHECK((below > above ? below - above : above - below) == 1);
        ++checked;
    }
    CHECK(checked == 20);
}

TEST_CASE("one-parameter sweep reproduces the transcritical-Hopf-fold sequence") {
    // r = 1, m swept upward, b = b_c = 0.02: e4 appears across T, e3 loses
    // stability at the Hopf slice, both interior equilibria vanish at S_e.
    const ModelParams p = params(1.0, 0.1, 0.02, 0.02);
    const double mT = transcritical_m(1.0, p);
    const auto mH = hopf_m_at_r(p, 1.0);
    const auto sn = saddle_node_halfline(p);
    REQUIRE(mH.has_value());
    CHECK(mT == Catch::Approx(0.052052).margin(1e-5));
    CHECK(*mH == Catch::Approx(0.138406).margin(1e-5));
    CHECK(sn.m_sn == Catch::Approx(0.151991).margin(1e-5));
    CHECK(mT < *mH);
    CHECK(*mH < sn.m_sn);

    CHECK(interior_count(params(1.0, mT - 1e-3, 0.02, 0.02)) == 1);
    CHECK(interior_count(params(1.0, mT + 1e-3, 0.02, 0.02)) == 2);
    const auto e3_stable =
        find_equilibrium(params(1.0, *mH - 1e-3, 0.02, 0.02), EquilibriumKind::e3);
    const auto e3_unstable =
        find_equilibrium(params(1.0, *mH + 1e-3, 0.02, 0.02), EquilibriumKind::e3);
    CHECK(is_attracting(e3_stable->stability));
    CHECK_FALSE(is_attracting(e3_unstable->stability));
    CHECK(interior_count(params(1.0, sn.m_sn + 1e-4, 0.02, 0.02)) == 0);
    CHECK(interior_count(params(1.0, 0.2, 0.02, 0.02)) == 0);
}

TEST_CASE("supercritical branch detected where the stable cycle exists") {
    // (b, b_c) = (0.001, 0.005): crossing H_e at r = 1.5 births a stable cycle
    const ModelParams p = params(1.5, 0.2, 0.001, 0.005);
    const auto mh = hopf_m_at_r(p, 1.5);
    REQUIRE(mh.has_value());
    CHECK(*mh == Catch::Approx(0.209471).margin(1e-4));
    CHECK(hopf_criticality(p, 1.5, *mh) == Criticality::supercritical);
}
