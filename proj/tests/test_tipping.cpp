#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ratetip/basins.hpp"
#include "ratetip/tipping.hpp"

using namespace ratetip;

namespace {

ModelParams params(double r, double m) {
    ModelParams p;
    p.r = r;
    p.m = m;
    p.b = p.b_c = 0.025;
    return p;
}

EcosystemShiftModel r_model(double r, double m) { return {params(r, m), ShiftTarget::r}; }

} // namespace

TEST_CASE("monotone r-shift from (0.75, 0.075): slow tracks, fast tips") {
    const auto model = r_model(0.75, 0.075);
    auto shift = model.make_shift(ShiftShape::tanh_mono, 0.6, 0.1);
    CHECK(simulate_shift(model, shift).classification == TipClass::tracking);
    shift.rate = 0.2;
    const auto out = simulate_shift(model, shift);
    CHECK(out.classification == TipClass::tipped);
    CHECK(out.final_distance_alt < 1e-3); // lands on e2 of the end parameters
}

TEST_CASE("B-tipping across the saddle-node is rate-independent") {
    // m: 0.12 -> 0.135 crosses m_sn = 0.1316 at r = 0.5
    EcosystemShiftModel model{params(0.5, 0.12), ShiftTarget::m};
    for (double eps : {1e-4, 1e-3, 1e-2, 1e-1, 1.0}) {
        auto shift = model.make_shift(ShiftShape::tanh_mono, 0.015, eps);
        const auto out = simulate_shift(model, shift);
        CHECK(out.classification == TipClass::tipped);
        CHECK(out.final_distance_alt < 1e-3); // e2 = (25, 0)
    }
}

TEST_CASE("simulate_shift rejects starts where the base equilibrium is missing") {
    EcosystemShiftModel model{params(1.0, 0.14), ShiftTarget::r}; // above m_sn: no e3
    auto shift = model.make_shift(ShiftShape::tanh_mono, 0.2, 0.1);
    CHECK_THROWS_AS(simulate_shift(model, shift), std::invalid_argument);
}

TEST_CASE("single critical rate near 0.14 for the Fig-8 path") {
    const auto model = r_model(0.75, 0.075);
    const auto tmpl = model.make_shift(ShiftShape::tanh_mono, 0.6, 0.1);
    const auto rates = critical_rate(model, tmpl, 0.6, 0.1, 0.2);
    REQUIRE(rates.size() == 1);
    CHECK(rates[0] == Catch::Approx(0.14).margin(0.02));
}

TEST_CASE("no crossings below the basin-instability boundary") {
    const auto model = r_model(0.75, 0.075);
    const auto tmpl = model.make_shift(ShiftShape::tanh_mono, 0.2, 0.1);
    CHECK(critical_rate(model, tmpl, 0.2, 0.05, 1.0).empty());
}

TEST_CASE("sech pulse from (1.0, 0.075) at delta 0.7: the two tongue rates") {
    const auto model = r_model(1.0, 0.075);
    const auto tmpl = model.make_shift(ShiftShape::sech_pulse, 0.7, 0.1);
    const auto rates = critical_rate(model, tmpl, 0.7, 0.05, 2.0);
    REQUIRE(rates.size() == 2);
    // regression anchors, first computed with this code path and cross-checked
    // against the published 15-digit rates (0.1665, 1.0494): within 0.5%
    CHECK(rates[0] == Catch::Approx(0.166491526823788).epsilon(0.005));
    CHECK(rates[1] == Catch::Approx(1.049396269470948).epsilon(0.005));
}

TEST_CASE("adiabatic limit: slow shifts on bifurcation-free paths track") {
    struct Case {
        double r, m, delta;
        ShiftTarget target;
        ShiftShape shape;
    };
    const Case cases[] = {
        {0.75, 0.075, 0.40, ShiftTarget::r, ShiftShape::tanh_mono},
        {0.75, 0.075, 0.60, ShiftTarget::r, ShiftShape::sech_pulse},
        {1.00, 0.075, 0.70, ShiftTarget::r, ShiftShape::sech_pulse},
        {1.00, 0.075, 0.50, ShiftTarget::r, ShiftShape::sech_mono},
        {0.50, 0.120, 0.40, ShiftTarget::r, ShiftShape::sech_pulse},
        {1.00, 0.075, 0.02, ShiftTarget::m, ShiftShape::tanh_mono},
        {1.00, 0.075, 0.03, ShiftTarget::m, ShiftShape::sech_pulse},
        {0.75, 0.075, 0.30, ShiftTarget::r, ShiftShape::sech_plateau},
        {1.25, 0.060, 0.30, ShiftTarget::r, ShiftShape::tanh_mono},
        {0.90, 0.090, 0.25, ShiftTarget::r, ShiftShape::sech_pulse},
    };
    for (const auto& c : cases) {
        EcosystemShiftModel model{params(c.r, c.m), c.target};
        ShiftSpec shift = model.make_shift(c.shape, c.delta, 1e-4, 1.0, 10.0);
        const auto out = simulate_shift(model, shift, grid_integrator_config());
        INFO("path from (" << c.r << ", " << c.m << ") delta=" << c.delta);
        CHECK(out.classification == TipClass::tracking);
    }
}

TEST_CASE("fast limit: a short impulse cannot move the system") {
    const auto model = r_model(1.0, 0.075);
    auto shift = model.make_shift(ShiftShape::sech_pulse, 0.7, 2000.0);
    CHECK(simulate_shift(model, shift).classification == TipClass::tracking);
}

TEST_CASE("beyond the BI boundary some rate always tips") {
    const auto model = r_model(0.75, 0.075);
    const AxisPath path{AxisPath::Vary::r, 0.075};
    const double d_bi = bi_boundary_on_path(params(0.75, 0.075), path, 0.8, 1.25) - 0.75;
    const auto tmpl = model.make_shift(ShiftShape::tanh_mono, 0.5, 0.1);
    for (double extra : {0.05, 0.2, 0.5}) {
        const auto rates = critical_rate(model, tmpl, d_bi + extra, 0.02, 2.0,
                                         grid_integrator_config());
        INFO("delta = BI + " << extra);
        CHECK(!rates.empty());
    }
}

TEST_CASE("tipping diagram classifies cells and extracts transitions") {
    const auto model = r_model(0.75, 0.075);
    const auto tmpl = model.make_shift(ShiftShape::tanh_mono, 0.5, 0.1);
    DiagramGrid grid;
    grid.delta = {0.2, 0.8, 7, false};
    grid.eps = {0.05, 0.8, 13, true};
    const auto d = tipping_diagram(model, tmpl, grid);
    REQUIRE(d.cells.size() == 7 * 13);
    CHECK(d.unclassifiable_count() == 0);
    // every transition is bracketed by oppositely-classified cells
    for (const auto& tr : d.transitions) {
        bool found = false;
        for (std::size_t id = 0; id < d.deltas.size() && !found; ++id) {
            if (d.deltas[id] != tr.delta) continue;
            for (std::size_t ie = 0; ie + 1 < d.epsilons.size(); ++ie) {
                if (d.epsilons[ie] < tr.eps && tr.eps < d.epsilons[ie + 1]) {
                    CHECK(d.cells[d.index(id, ie)] != d.cells[d.index(id, ie + 1)]);
                    found = true;
                    break;
                }
            }
        }
        CHECK(found);
    }
    // the small-delta rows lie below the BI boundary: all tracking, no transitions
    for (std::size_t ie = 0; ie < d.epsilons.size(); ++ie)
        CHECK(d.cells[d.index(0, ie)] == TipClass::tracking);
}

TEST_CASE("return partition follows the four-way table") {
    TippingDiagram mono, nonmono;
    mono.deltas = nonmono.deltas = {0.1, 0.2};
    mono.epsilons = nonmono.epsilons = {1.0, 2.0};
    mono.cells = {TipClass::tracking, TipClass::tipped, TipClass::tracking, TipClass::tipped};
    nonmono.cells = {TipClass::tracking, TipClass::tracking, TipClass::tipped, TipClass::tipped};
    const auto part = return_partition(mono, nonmono);
    CHECK(part.cells[0] == ReturnRegion::track);
    CHECK(part.cells[1] == ReturnRegion::ret);
    CHECK(part.cells[2] == ReturnRegion::return_tipping);
    CHECK(part.cells[3] == ReturnRegion::no_return);

    nonmono.epsilons = {1.0, 3.0};
    CHECK_THROWS_AS(return_partition(mono, nonmono), std::invalid_argument);
}

TEST_CASE("canard witness follows the moving saddle") {
    const auto model = r_model(0.75, 0.075);
    const auto tmpl = model.make_shift(ShiftShape::tanh_mono, 0.6, 0.1);
    const auto w = canard_witness(model, tmpl, 0.6, 0.1, 0.2, 1e-10);
    CHECK(w.eps == Catch::Approx(0.142953182).margin(1e-8));
    REQUIRE(!w.trajectory.times.empty());
    double min_dist = 1e18;
    for (double d : w.dist_to_unstable) min_dist = std::min(min_dist, d);
    // the threshold trajectory hovers near the saddle; double precision caps
    // how deep the approach can get (see the acceptance suite for the limit)
    CHECK(min_dist < 2.5);

    // time on the unstable object grows by about ln(2)/lambda_u per bracket
    // halving; the increment stays bounded
    auto window_within = [](const CanardWitness<2>& cw, double dist) {
        double best = 0.0, cur = -1.0;
        for (std::size_t i = 0; i < cw.trajectory.times.size(); ++i) {
            if (cw.dist_to_unstable[i] < dist) {
                if (cur < 0) cur = cw.trajectory.times[i];
                best = std::max(best, cw.trajectory.times[i] - cur);
            } else
                cur = -1.0;
        }
        return best;
    };
    const auto w2 = canard_witness(model, tmpl, 0.6, 0.1, 0.2, 5e-11);
    const double t1 = window_within(w, 5.0);
    const double t2 = window_within(w2, 5.0);
    CHECK(t1 > 10.0);
    CHECK(t2 >= t1 - 0.5);
    CHECK(t2 - t1 < 3.5);
}

TEST_CASE("canard witness requires a unique crossing in the bracket") {
    const auto model = r_model(0.75, 0.075);
    const auto tmpl = model.make_shift(ShiftShape::tanh_mono, 0.6, 0.1);
    CHECK_THROWS_AS(canard_witness(model, tmpl, 0.6, 0.25, 0.9, 1e-10), std::invalid_argument);
}

TEST_CASE("classification against restored parameters for non-monotone shifts") {
    // inside the tongue the pulse tips even though the end parameters equal p1
    const auto model = r_model(1.0, 0.075);
    auto shift = model.make_shift(ShiftShape::sech_pulse, 0.7, 0.4);
    const auto out = simulate_shift(model, shift);
    CHECK(out.classification == TipClass::tipped);
    // e2 at the restored parameters is (50, 0)
    CHECK(out.final_distance_alt < 1e-3);
}

TEST_CASE("ecosystem partition: return band exists at high rates only") {
    const auto model = r_model(1.0, 0.075);
    DiagramGrid grid;
    grid.delta = {0.4, 1.0, 13, false};
    grid.eps = {0.05, 3.0, 18, true};
    const auto mono =
        tipping_diagram(model, model.make_shift(ShiftShape::sech_mono, 0.5, 0.1), grid);
    const auto nonm =
        tipping_diagram(model, model.make_shift(ShiftShape::sech_pulse, 0.5, 0.1), grid);
    const auto part = return_partition(mono, nonm);
    CHECK(part.count(ReturnRegion::track) > 0);
    CHECK(part.count(ReturnRegion::ret) > 0);
    CHECK(part.count(ReturnRegion::no_return) > 0);
    // the reversal never induces tipping in this model
    CHECK(part.count(ReturnRegion::return_tipping) == 0);
    // points of return thin out and vanish near eps ~ 0.2: below that the
    // transition goes straight from tracking to no return
    std::size_t ret_low = 0, ret_high = 0;
    for (std::size_t id = 0; id < part.deltas.size(); ++id)
        for (std::size_t ie = 0; ie < part.epsilons.size(); ++ie)
            if (part.cells[part.index(id, ie)] == ReturnRegion::ret) {
                (part.epsilons[ie] < 0.15 ? ret_low : ret_high) += 1;
            }
    CHECK(ret_low == 0);
    CHECK(ret_high > 20);
}
