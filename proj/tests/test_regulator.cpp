#include <cmath>
#include <vector>

#include "doctest.h"
#include "gridsim/errors.hpp"
#include "gridsim/regulator.hpp"

using namespace gridsim;
using namespace gridsim::vr;

namespace {
const RegulatorParams kDefaults{};
}

TEST_CASE("tap ratio tracks the tap position") {
    TapState st;
    CHECK(tap_ratio(st, kDefaults) == 1.0);
    st.tap = 8;
    CHECK(tap_ratio(st, kDefaults) == doctest::Approx(1.05).epsilon(1e-12));
    st.tap = -16;
    CHECK(tap_ratio(st, kDefaults) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("low voltage commands the rounded corrective raise") {
    TapState st;
    st = step_tap(st, 0.975, 0.0, kDefaults);
    CHECK(st.tap == 4);  // (1 - 0.975)/0.00625 = 4 steps
    CHECK(st.travel == 4.0);
    CHECK(st.last_decision == 0.0);
    CHECK(st.raw_target == doctest::Approx(-4.0).epsilon(1e-9));
}

TEST_CASE("high voltage commands a lowering correction") {
    TapState st;
    st = step_tap(st, 1.03, 0.0, kDefaults);
    CHECK(st.tap == -5);  // round(-4.8) = -5
    CHECK(st.travel == 5.0);
}

TEST_CASE("half-step targets round away from zero") {
    TapState st;
    st = step_tap(st, 1.0 - 2.5 * 0.00625, 0.0, kDefaults);  // exact +2.5 steps
    CHECK(st.tap == 3);
    TapState st2;
    st2 = step_tap(st2, 1.0 + 2.5 * 0.00625, 0.0, kDefaults);
    CHECK(st2.tap == -3);
}

TEST_CASE("corrections clamp at the physical tap range") {
    TapState st;
    st.tap = 14;
    st = step_tap(st, 0.80, 0.0, kDefaults);  // wants +32, gets +2
    CHECK(st.tap == 16);
    CHECK(st.travel == 2.0);

    // Pinned at the limit: further sag produces no travel.
    st = step_tap(st, 0.80, 1.0, kDefaults);
    CHECK(st.tap == 16);
    CHECK(st.travel == 2.0);
}

TEST_CASE("dead-band voltages hold the tap but count as a decision") {
    TapState st;
    st = step_tap(st, 1.005, 0.0, kDefaults);
    CHECK(st.tap == 0);
    CHECK(st.travel == 0.0);
    CHECK(st.last_decision == 0.0);

    // 0.3 h later: outside the band but within the operating cycle, so the
    // state is returned unchanged and the decision clock is NOT refreshed.
    TapState gated = step_tap(st, 0.95, 0.3, kDefaults);
    CHECK(gated.tap == 0);
    CHECK(gated.travel == 0.0);
    CHECK(gated.last_decision == 0.0);

    // One full cycle after the hold, the correction goes through.
    TapState acted = step_tap(gated, 0.95, 0.5, kDefaults);
    CHECK(acted.tap == 8);
    CHECK(acted.travel == 8.0);
    CHECK(acted.last_decision == 0.5);
}

TEST_CASE("band edges belong to the dead band") {
    TapState lo = step_tap(TapState{}, 0.99, 0.0, kDefaults);
    TapState hi = step_tap(TapState{}, 1.01, 0.0, kDefaults);
    CHECK(lo.tap == 0);
    CHECK(hi.tap == 0);
}

TEST_CASE("decision rate is capped by the operating cycle") {
    TapState st;
    int changes = 0;
    int prev_tap = 0;
    for (int k = 0; k < 240; ++k) {  // one day at 0.1 h
        const double v = (k % 2 == 0) ? 0.97 : 1.03;
        st = step_tap(st, v, k * 0.1, kDefaults);
        if (st.tap != prev_tap) ++changes;
        prev_tap = st.tap;
    }
    CHECK(changes <= 48);  // at most one per 0.5 h cycle
    CHECK(changes > 0);
}

TEST_CASE("a monotone sag saturates the tap and keeps it there") {
    TapState st;
    int prev = 0;
    bool saturated = false;
    for (int k = 0; k < 60; ++k) {
        const double v = 1.0 - 0.004 * k;  // drops below 0.9 around k = 26
        st = step_tap(st, v, 0.5 * k, kDefaults);
        CHECK(st.tap >= prev);  // never steps back down on a worsening sag
        CHECK(st.tap <= kDefaults.tap_max);
        if (st.tap == kDefaults.tap_max) saturated = true;
        if (saturated) CHECK(st.tap == kDefaults.tap_max);
        prev = st.tap;
    }
    CHECK(saturated);
}

TEST_CASE("a pinned tap wears less than an oscillating one") {
    TapState pinned;
    TapState osc;
    for (int k = 0; k < 48; ++k) {
        pinned = step_tap(pinned, 0.90, 0.5 * k, kDefaults);
        osc = step_tap(osc, (k % 2 == 0) ? 0.985 : 1.015, 0.5 * k, kDefaults);
    }
    CHECK(pinned.tap == 16);
    CHECK(pinned.travel == 16.0);
    CHECK(osc.travel > pinned.travel);
}

TEST_CASE("step rejects a non-physical voltage") {
    CHECK_THROWS_AS(step_tap(TapState{}, 0.0, 0.0, kDefaults), DomainError);
    CHECK_THROWS_AS(step_tap(TapState{}, -1.0, 0.0, kDefaults), DomainError);
}

TEST_CASE("parameter validation lists every violation") {
    RegulatorParams bad;
    bad.step_size = 0.0;
    bad.dead_band_lo = 1.02;  // above dead_band_hi
    bad.max_operations = 0.0;
    try {
        validate(bad);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("step size") != std::string::npos);
        CHECK(msg.find("dead-band") != std::string::npos);
        CHECK(msg.find("operation count") != std::string::npos);
    }
}

TEST_CASE("history wear counts absolute tap movement over the window") {
    const std::vector<int> h{0, 2, 2, 1};
    CHECK(vr_loss_of_life(h, 10.0, 0, 3) == 0.3);
    CHECK(vr_loss_of_life(h, 10.0, 0, 1) == doctest::Approx(0.2).epsilon(1e-12));
    // Additivity over adjacent windows.
    const double whole = vr_loss_of_life(h, 10.0, 0, 3);
    const double parts = vr_loss_of_life(h, 10.0, 0, 1) + vr_loss_of_life(h, 10.0, 1, 3);
    CHECK(parts == doctest::Approx(whole).epsilon(1e-12));
    CHECK(vr_loss_of_life(h, 10.0, 2, 2) == 0.0);
}

TEST_CASE("a constant history accrues no wear") {
    const std::vector<int> h{5, 5, 5, 5, 5};
    CHECK(vr_loss_of_life(h, 100.0, 0, 4) == 0.0);
}

TEST_CASE("travel equal to the rating consumes exactly one life") {
    std::vector<int> h;
    for (int i = 0; i <= 1000; ++i) h.push_back(i % 2);
    CHECK(vr_loss_of_life(h, 1000.0, 0, 1000) == 1.0);
    CHECK(vr_loss_of_life(1000.0, 1000.0) == 1.0);
}

TEST_CASE("history wear rejects invalid windows") {
    const std::vector<int> h{0, 1, 2};
    CHECK_THROWS_AS(vr_loss_of_life(h, 10.0, 2, 1), RangeError);
    CHECK_THROWS_AS(vr_loss_of_life(h, 10.0, 0, 3), RangeError);
}

TEST_CASE("regulator lifetime from daily travel") {
    const auto est = vr_lifetime(10.0, 73000.0);
    CHECK_FALSE(est.degenerate);
    CHECK(est.years == doctest::Approx(20.0).epsilon(1e-12));

    const auto doubled = vr_lifetime(20.0, 73000.0);
    CHECK(doubled.years == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("zero tap travel flags an unbounded lifetime") {
    const auto est = vr_lifetime(0.0, 100000.0);
    CHECK(est.degenerate);
    CHECK(std::isinf(est.years));
    CHECK_THROWS_AS(vr_lifetime(-1.0, 100000.0), DomainError);
}
