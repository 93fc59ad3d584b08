#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "gridsim/errors.hpp"
#include "gridsim/feeder.hpp"
#include "gridsim/pev.hpp"
#include "gridsim/rng.hpp"

using namespace gridsim;
using namespace gridsim::pev;

namespace {

ChargingSpec test_spec(int n) {
    ChargingSpec spec;
    spec.n_pev = n;
    spec.allocation = {{"B", 1.0}};
    return spec;
}

feeder::FeederModel small_model(double peak_kw = 100.0) {
    feeder::FeederModel m;
    m.nodes = {{"A", 1.0}, {"B", 1.0}};
    m.branches = {{"A", "B", 0.01, 0.02}};
    m.source = "A";
    m.load_weights = {{"B", 1.0}};
    m.transformer_node = "B";
    m.transformer_s_r_kva = 500.0;
    m.power_base_kva = 3000.0;
    m.peak_base_load_kw = peak_kw;
    return m;
}

double phi(double z) { return 0.5 * (1.0 + std::erf(z / std::sqrt(2.0))); }

// CDF of a normal(mu, sigma) wrapped onto [0, 24).
double wrapped_normal_cdf(double t, double mu, double sigma) {
    double sum = 0.0;
    for (int k = -4; k <= 4; ++k) {
        sum += phi((t - mu + 24.0 * k) / sigma) - phi((0.0 - mu + 24.0 * k) / sigma);
    }
    return sum;
}

}  // namespace

TEST_CASE("charging interval from battery size and state of charge") {
    CHECK(charging_interval(23.0, 0.0, 10.0) == doctest::Approx(2.3).epsilon(1e-12));
    CHECK(charging_interval(23.0, 1.0, 10.0) == 0.0);
    CHECK(charging_interval(23.0, 0.5, 10.0) == doctest::Approx(1.15).epsilon(1e-12));
    CHECK_THROWS_AS(charging_interval(23.0, 1.1, 10.0), DomainError);
    CHECK_THROWS_AS(charging_interval(23.0, -0.1, 10.0), DomainError);
    CHECK_THROWS_AS(charging_interval(0.0, 0.5, 10.0), DomainError);
}

TEST_CASE("sampled events respect their invariants") {
    RngStream rng = RngStream::derive(42, 1, 0);
    const auto events = sample_events(test_spec(5000), rng);
    REQUIRE(events.size() == 5000);
    for (const auto& ev : events) {
        CHECK(ev.duration_h >= 0.0);
        CHECK(ev.start_h >= 0.0);
        CHECK(ev.start_h < 24.0);
        CHECK(ev.node == "B");
    }
}

TEST_CASE("sampling is reproducible for a fixed stream") {
    RngStream a = RngStream::derive(7, 3, 1);
    RngStream b = RngStream::derive(7, 3, 1);
    const auto ea = sample_events(test_spec(100), a);
    const auto eb = sample_events(test_spec(100), b);
    REQUIRE(ea.size() == eb.size());
    for (std::size_t i = 0; i < ea.size(); ++i) {
        CHECK(ea[i].start_h == eb[i].start_h);
        CHECK(ea[i].duration_h == eb[i].duration_h);
        CHECK(ea[i].node == eb[i].node);
    }
}

TEST_CASE("a larger fleet extends a smaller one vehicle-for-vehicle") {
    RngStream a = RngStream::derive(99, 1, 0);
    RngStream b = RngStream::derive(99, 1, 0);
    const auto small = sample_events(test_spec(150), a);
    const auto large = sample_events(test_spec(900), b);
    REQUIRE(large.size() == 900);
    for (std::size_t i = 0; i < small.size(); ++i) {
        CHECK(small[i].start_h == large[i].start_h);
        CHECK(small[i].duration_h == large[i].duration_h);
        CHECK(small[i].node == large[i].node);
    }
}

TEST_CASE("a dedicated placement stream pins nodes while timing varies") {
    ChargingSpec spec = test_spec(200);
    spec.allocation = {{"A", 0.5}, {"B", 0.5}};
    RngStream t1 = RngStream::derive(1, 10, 0);
    RngStream t2 = RngStream::derive(2, 10, 0);
    RngStream p1 = RngStream::derive(1, 0, 0);
    RngStream p2 = RngStream::derive(1, 0, 0);
    const auto ea = sample_events(spec, t1, p1);
    const auto eb = sample_events(spec, t2, p2);
    bool timing_differs = false;
    for (std::size_t i = 0; i < ea.size(); ++i) {
        CHECK(ea[i].node == eb[i].node);
        if (ea[i].start_h != eb[i].start_h) timing_differs = true;
    }
    CHECK(timing_differs);
}

TEST_CASE("clamping lifts the mean charging interval slightly above nominal") {
    RngStream rng = RngStream::derive(123, 1, 0);
    const auto events = sample_events(test_spec(20000), rng);
    double sum = 0.0;
    for (const auto& ev : events) sum += ev.duration_h;
    const double mean = sum / static_cast<double>(events.size());
    CHECK(mean > 1.176);  // clamped-Gaussian mean exceeds the nominal 1.2 minus noise
    CHECK(mean < 1.30);
}

TEST_CASE("start times follow a wrapped normal distribution") {
    RngStream rng = RngStream::derive(2027, 1, 0);
    const auto events = sample_events(test_spec(20000), rng);

    // Circular mean: the arithmetic mean is meaningless across midnight.
    double s = 0.0, c = 0.0;
    for (const auto& ev : events) {
        s += std::sin(ev.start_h * 3.14159265358979323846 / 12.0);
        c += std::cos(ev.start_h * 3.14159265358979323846 / 12.0);
    }
    double mean = std::atan2(s, c) * 12.0 / 3.14159265358979323846;
    if (mean < 0.0) mean += 24.0;
    double dist = std::abs(mean - 20.5);
    dist = std::min(dist, 24.0 - dist);
    CHECK(dist < 0.15);

    // Kolmogorov-Smirnov distance against the wrapped-normal CDF.
    std::vector<double> sorted;
    sorted.reserve(events.size());
    for (const auto& ev : events) sorted.push_back(ev.start_h);
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = wrapped_normal_cdf(sorted[i], 20.5, 4.5);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    }
    CHECK(d < 0.02);
}

TEST_CASE("state-of-charge mode bounds the interval by the battery size") {
    ChargingSpec spec = test_spec(20000);
    spec.interval_mode = IntervalMode::SocDriven;
    RngStream rng = RngStream::derive(11, 1, 0);
    const auto events = sample_events(spec, rng);
    double sum = 0.0;
    for (const auto& ev : events) {
        CHECK(ev.duration_h >= 0.0);
        CHECK(ev.duration_h <= 2.3 + 1e-12);
        sum += ev.duration_h;
    }
    CHECK(sum / static_cast<double>(events.size()) == doctest::Approx(1.15).epsilon(0.05));
}

TEST_CASE("a fleet without an allocation is rejected") {
    ChargingSpec spec;
    spec.n_pev = 10;
    RngStream rng(1);
    CHECK_THROWS_AS(sample_events(spec, rng), DomainError);

    ChargingSpec bad = test_spec(10);
    bad.allocation = {{"B", 0.4}};  // does not sum to 1
    CHECK_THROWS_AS(sample_events(bad, rng), DomainError);
}

TEST_CASE("load profile with no charging is the scaled diurnal baseline") {
    const auto m = small_model(100.0);
    const auto shape = default_base_shape();
    const auto profile = build_load_profile(shape, m, {}, 1.0, 1, 10.0);
    REQUIRE(profile.steps == 24);
    for (int k = 0; k < 24; ++k) {
        CHECK(profile.baseline_kw[1][k] == doctest::Approx(100.0 * shape[k]).epsilon(1e-12));
        CHECK(profile.baseline_kw[0][k] == 0.0);
        CHECK(profile.pev_kw[0][k] == 0.0);
        CHECK(profile.pev_kw[1][k] == 0.0);
        CHECK(profile.total_kw(1, k) == profile.baseline_kw[1][k]);
    }
}

TEST_CASE("a 2.3 h charge at 0.1 h resolution covers exactly 23 steps") {
    const auto m = small_model();
    const auto shape = resample_shape(default_base_shape(), 0.1);
    const std::vector<ChargingEvent> events{{0, "B", 20.0, 2.3}};
    const auto profile = build_load_profile(shape, m, events, 0.1, 1, 10.0);
    for (int k = 0; k < 240; ++k) {
        const double expect = (k >= 200 && k <= 222) ? 10.0 : 0.0;
        CHECK(profile.pev_kw[1][k] == expect);
    }
}

TEST_CASE("charging past midnight wraps to the start of the horizon") {
    const auto m = small_model();
    const auto shape = resample_shape(default_base_shape(), 0.1);
    const std::vector<ChargingEvent> events{{0, "B", 23.5, 1.0}};

    const auto one_day = build_load_profile(shape, m, events, 0.1, 1, 10.0);
    for (int k = 0; k < 240; ++k) {
        const bool on = (k >= 235) || (k <= 4);
        CHECK(one_day.pev_kw[1][k] == (on ? 10.0 : 0.0));
    }

    const auto two_days = build_load_profile(shape, m, events, 0.1, 2, 10.0);
    for (int k = 0; k < 480; ++k) {
        const bool on = (k >= 235 && k <= 244);
        CHECK(two_days.pev_kw[1][k] == (on ? 10.0 : 0.0));
    }
}

TEST_CASE("a zero-length charge contributes nothing") {
    const auto m = small_model();
    const auto shape = resample_shape(default_base_shape(), 0.1);
    const std::vector<ChargingEvent> events{{0, "B", 12.0, 0.0}};
    const auto profile = build_load_profile(shape, m, events, 0.1, 1, 10.0);
    for (int k = 0; k < 240; ++k) CHECK(profile.pev_kw[1][k] == 0.0);
}

TEST_CASE("aggregate charging never exceeds the fleet's plated capacity") {
    const auto m = small_model();
    const auto shape = resample_shape(default_base_shape(), 0.1);
    RngStream rng = RngStream::derive(5, 1, 0);
    const auto events = sample_events(test_spec(100), rng);
    const auto profile = build_load_profile(shape, m, events, 0.1, 1, 10.0);
    double total_energy = 0.0;
    for (int k = 0; k < 240; ++k) {
        double instant = 0.0;
        for (std::size_t node = 0; node < 2; ++node) instant += profile.pev_kw[node][k];
        CHECK(instant <= 100.0 * 10.0 + 1e-9);
        total_energy += instant * 0.1;
    }
    double commanded = 0.0;
    for (const auto& ev : events) commanded += ev.duration_h * 10.0;
    // Quantization rounds each event's coverage up to whole steps.
    CHECK(total_energy >= commanded - 100.0 * 10.0 * 0.1);
    CHECK(total_energy <= commanded + 2.0 * 100.0 * 10.0 * 0.1);
}

TEST_CASE("profile construction rejects bad resolutions and windows") {
    const auto m = small_model();
    const auto shape_hourly = default_base_shape();
    CHECK_THROWS_AS(build_load_profile(shape_hourly, m, {}, 0.7, 1, 10.0), ResolutionError);
    // Hourly shape with a 0.1 h grid: the shape must be resampled first.
    CHECK_THROWS_AS(build_load_profile(shape_hourly, m, {}, 0.1, 1, 10.0), ResolutionError);

    const auto shape = resample_shape(shape_hourly, 0.1);
    const std::vector<ChargingEvent> late{{0, "B", 25.0, 1.0}};
    CHECK_THROWS_AS(build_load_profile(shape, m, late, 0.1, 1, 10.0), DomainError);
    const std::vector<ChargingEvent> ghost{{0, "Z", 10.0, 1.0}};
    CHECK_THROWS_AS(build_load_profile(shape, m, ghost, 0.1, 1, 10.0), DomainError);
}

TEST_CASE("penetration level is plated fleet power over peak base load") {
    ChargingSpec spec = test_spec(900);
    CHECK(penetration_level(spec, 3000.0) == doctest::Approx(300.0).epsilon(1e-12));
    spec.n_pev = 150;
    CHECK(penetration_level(spec, 3000.0) == doctest::Approx(50.0).epsilon(1e-12));
    spec.n_pev = 0;
    CHECK(penetration_level(spec, 3000.0) == 0.0);
}

TEST_CASE("fleet sizing inverts the penetration level up to one vehicle") {
    CHECK(fleet_size_for_pl(300.0, 3000.0, 10.0) == 900);
    CHECK(fleet_size_for_pl(50.0, 3000.0, 10.0) == 150);
    CHECK(fleet_size_for_pl(0.0, 3000.0, 10.0) == 0);
    for (double pl : {0.0, 37.0, 50.0, 123.0, 300.0}) {
        ChargingSpec spec = test_spec(static_cast<int>(fleet_size_for_pl(pl, 3000.0, 10.0)));
        const double back = penetration_level(spec, 3000.0);
        CHECK(std::abs(back - pl) <= 100.0 * 10.0 / 3000.0 / 2.0 + 1e-9);
    }
    CHECK_THROWS_AS(fleet_size_for_pl(-1.0, 3000.0, 10.0), DomainError);
}

TEST_CASE("the built-in diurnal shape peaks at one in the evening") {
    const auto shape = default_base_shape();
    REQUIRE(shape.size() == 24);
    CHECK(*std::max_element(shape.begin(), shape.end()) == 1.0);
    CHECK(shape[20] == 1.0);
    for (double v : shape) CHECK(v > 0.0);
    const double mean = std::accumulate(shape.begin(), shape.end(), 0.0) / 24.0;
    CHECK(mean > 0.5);
    CHECK(mean < 0.8);
}

TEST_CASE("shape resampling is periodic linear interpolation") {
    const auto hourly = default_base_shape();
    const auto same = resample_shape(hourly, 1.0);
    REQUIRE(same.size() == 24);
    for (int k = 0; k < 24; ++k) CHECK(same[k] == hourly[k]);

    const auto half = resample_shape(hourly, 0.5);
    REQUIRE(half.size() == 48);
    for (int k = 0; k < 24; ++k) {
        CHECK(half[2 * k] == hourly[k]);
        const double mid = 0.5 * (hourly[k] + hourly[(k + 1) % 24]);
        CHECK(half[2 * k + 1] == doctest::Approx(mid).epsilon(1e-12));
    }

    const auto fine = resample_shape(hourly, 0.1);
    REQUIRE(fine.size() == 240);
    CHECK(*std::max_element(fine.begin(), fine.end()) == 1.0);
    CHECK_THROWS_AS(resample_shape(hourly, 0.7), ResolutionError);
}
