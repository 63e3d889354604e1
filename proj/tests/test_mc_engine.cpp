#include "doctest.h"

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "cmt/curves.hpp"
#include "cmt/error.hpp"
#include "cmt/mc_engine.hpp"

using namespace cmt;

namespace {

SimulationConfig short_config(std::size_t paths = 256) {
    SimulationConfig cfg;
    cfg.expiry = 0.25;
    cfg.spec.recovery = 0.2;
    cfg.n_paths = paths;
    cfg.seed = 99;
    cfg.workers = 1;
    return cfg;
}

bool same_bits(const PathRecord& a, const PathRecord& b) {
    return std::memcmp(&a.terminal_yield, &b.terminal_yield, sizeof(double)) == 0 &&
           std::memcmp(&a.cmt, &b.cmt, sizeof(double)) == 0 && std::memcmp(&a.payoff, &b.payoff, sizeof(double)) == 0 &&
           std::memcmp(&a.yield_vol, &b.yield_vol, sizeof(double)) == 0 && a.clamp_events == b.clamp_events &&
           a.absorbed == b.absorbed;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected cmt::Error");
    return ErrorCode::InvalidArgument;
}

const DiscountCurve kDc = DiscountCurve::flat(0.015, 40.0);
const HazardCurve kHz = HazardCurve::flat(0.004, 40.0);

}  // namespace

TEST_CASE("distribution statistics") {
    const std::vector<double> two{-1.0, 1.0};
    const auto s2 = distribution_stats(two);
    CHECK(s2.mean == 0.0);
    CHECK(s2.skewness == 0.0);
    CHECK(s2.excess_kurtosis == doctest::Approx(-2.0).epsilon(1e-15));

    const std::vector<double> five{1, 2, 3, 4, 5};
    const auto s5 = distribution_stats(five);
    CHECK(s5.mean == 3.0);
    CHECK(s5.std_dev == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(s5.min == 1.0);
    CHECK(s5.max == 5.0);
    CHECK(s5.std_error() == doctest::Approx(std::sqrt(2.0 / 5.0)).epsilon(1e-15));

    const std::vector<double> flat(7, 0.3);
    const auto sc = distribution_stats(flat);
    CHECK(sc.std_dev == 0.0);
    CHECK(sc.skewness == 0.0);
    CHECK(sc.excess_kurtosis == 0.0);

    const std::vector<double> skewed{0, 0, 0, 0, 10};
    CHECK(distribution_stats(skewed).skewness > 0.0);

    const std::vector<double> one{1.0};
    CHECK(code_of([&] { distribution_stats(one); }) == ErrorCode::InsufficientSamples);
}

TEST_CASE("yield volatility") {
    BondSpec zc;
    zc.coupon_mode = CouponMode::FixedCoupon;
    zc.fixed_coupon = 0.0;
    const auto yf = YieldFunction::fixed(zc);
    const double y = 0.02;
    const auto v = yf.evaluate(y);
    const double sb = 0.03;
    const double sy = yield_vol(y, v.f, v.df, sb);
    CHECK(sy == doctest::Approx(-(1.0 + y) / (zc.theta * y) * sb).epsilon(1e-13));
    CHECK(sy == doctest::Approx(-5.1 * sb).epsilon(1e-13));
    CHECK(std::abs(sy * y * v.df - v.f * sb) < 1e-14);
    CHECK(yield_vol(y, v.f, v.df, 0.0) == 0.0);
    CHECK(code_of([&] { yield_vol(0.0, v.f, v.df, sb); }) == ErrorCode::DegenerateYield);
}

TEST_CASE("log-Euler yield step") {
    CHECK(step_yield(0.013, 0.0, -8.0, 70.0, 1.0 / 365.0, 2.5) == 0.013);
    for (double z : {-40.0, -8.0, 0.0, 8.0})
        CHECK(step_yield(0.013, -2.5, -8.0, 70.0, 1.0 / 365.0, z) > 0.0);

    SUBCASE("mean agrees with a raw Euler step to first order") {
        const double y = 0.013, sy = -0.6, fp = -8.5, fpp = 75.0, dt = 1.0 / 52.0;
        const double mu = -0.5 * (y * fpp / fp) * sy * sy;
        std::mt19937_64 rng(3);
        std::normal_distribution<double> normal;
        const int n = 1000000;
        double sum = 0.0, sum2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = step_yield(y, sy, fp, fpp, dt, normal(rng));
            sum += x;
            sum2 += x * x;
        }
        const double mean = sum / n;
        const double var = sum2 / n - mean * mean;
        const double euler_mean = y * (1.0 + mu * dt);
        const double euler_var = y * y * sy * sy * dt;
        CHECK(std::abs(mean - euler_mean) < 3.0 * std::sqrt(var / n) + y * mu * mu * dt * dt);
        CHECK(var == doctest::Approx(euler_var).epsilon(0.02));
    }
}

TEST_CASE("bond volatility") {
    BondSpec spec;
    const double T = 1.0, y = 0.015;
    auto snap = FwdZcSnapshot::make(spec, T, 1.0 / 12.0);
    snap.set_initial(kDc);

    snap.set_coefficients({0.1, 0.0}, 0.5);
    CHECK(bond_vol(snap, 0.01, spec, y, 1.0) == 0.0);

    snap.set_coefficients({0.1, 0.01}, 0.5);
    const HullWhiteParams hw{0.1, 0.01};
    const double c = std::pow(1.0 + y, 0.5) - 1.0;
    double expected = kDc.forward_df(T, T + 10.0) * forward_zc_vol(hw, 0.5, T, T + 10.0);
    for (int i = 1; i <= 20; ++i) {
        const double u = T + 0.5 * i;
        expected += c * kDc.forward_df(T, u) * forward_zc_vol(hw, 0.5, T, u);
    }
    CHECK(bond_vol(snap, 0.0, spec, y, 0.97) == doctest::Approx(expected / 0.97).epsilon(1e-12));

    auto coarse = FwdZcSnapshot::make(spec, T, 0.5);
    coarse.set_initial(kDc);
    coarse.set_coefficients(hw, 0.5);
    CHECK(bond_vol(coarse, 0.01, spec, y, 1.0) == bond_vol(snap, 0.01, spec, y, 1.0));
    CHECK(code_of([&] { bond_vol(snap, 0.01, spec, y, 0.0); }) == ErrorCode::DegenerateBond);
}

TEST_CASE("degenerate diffusion") {
    auto cfg = short_config(8);
    cfg.hw.sigma = 0.0;
    const auto res = price(cfg, kDc, kHz);
    CHECK(std::abs(res.terminal_yield.mean - res.initial_yield) < 1e-12);
    CHECK(res.terminal_yield.std_error == 0.0);
    for (const auto& p : res.paths) {
        CHECK(p.terminal_yield == res.initial_yield);
        CHECK(p.cmt == cmt_from_yield(2, res.initial_yield));
    }
    CHECK(res.initial_yield == doctest::Approx(initial_forward_yield(kDc, kHz, cfg.spec, cfg.expiry)).epsilon(1e-15));

    cfg.payoff.kind = PayoffKind::Caplet;
    cfg.payoff.strike = 0.01;
    const auto cap = price(cfg, kDc, kHz);
    const double intrinsic =
        kDc.discount_factor(cfg.expiry + 0.25) * 0.25 * std::max(cmt_from_yield(2, cap.initial_yield) - 0.01, 0.0);
    CHECK(std::abs(cap.mean - intrinsic) < 1e-12);
}

TEST_CASE("determinism across runs and worker counts") {
    auto cfg = short_config(64);
    const auto a = price(cfg, kDc, kHz);
    const auto b = price(cfg, kDc, kHz);
    cfg.workers = 3;
    const auto c = price(cfg, kDc, kHz);
    REQUIRE(a.paths.size() == 64);
    for (std::size_t i = 0; i < a.paths.size(); ++i) {
        CHECK(same_bits(a.paths[i], b.paths[i]));
        CHECK(same_bits(a.paths[i], c.paths[i]));
    }
    CHECK(std::memcmp(&a.mean, &c.mean, sizeof(double)) == 0);

    // Path p does not depend on how many paths run alongside it.
    const auto single = simulate_path(cfg, kDc, kHz, 17);
    CHECK(same_bits(single, PathRecord{a.paths[17].terminal_yield, a.paths[17].cmt, a.paths[17].bond_value,
                                       a.paths[17].yield_vol, single.payoff, a.paths[17].clamp_events,
                                       a.paths[17].absorbed}));

    cfg.seed = 100;
    CHECK(price(cfg, kDc, kHz).mean != a.mean);
}

TEST_CASE("caplet and floorlet parity on shared paths") {
    auto cfg = short_config(512);
    cfg.payoff.kind = PayoffKind::Caplet;
    cfg.payoff.strike = 0.02;
    const auto cap = price(cfg, kDc, kHz);
    cfg.payoff.kind = PayoffKind::Floorlet;
    const auto floor = price(cfg, kDc, kHz);
    const double weight = kDc.discount_factor(cfg.expiry + 0.25) * 0.25;
    const double gap = cap.mean - floor.mean - weight * (cap.cmt.mean - 0.02);
    CHECK(std::abs(gap) < 2.0 * std::hypot(cap.std_error, floor.std_error));
    CHECK(std::abs(gap) < 1e-15);
}

TEST_CASE("at-the-money strike and one-period caps") {
    auto cfg = short_config(128);
    cfg.payoff.kind = PayoffKind::Caplet;
    const auto atm = price(cfg, kDc, kHz);
    REQUIRE(atm.strike.has_value());
    CHECK(*atm.strike == atm.cmt.mean);
    CHECK(atm.mean > 0.0);

    cfg.payoff.strike = 0.018;
    const auto caplet = price(cfg, kDc, kHz);
    cfg.payoff.kind = PayoffKind::Cap;
    cfg.payoff.cap_maturity = cfg.expiry + 0.25;
    const auto cap = price(cfg, kDc, kHz);
    CHECK(cap.mean == caplet.mean);

    cfg.payoff.cap_maturity = cfg.expiry + 0.75;
    const auto longer = price(cfg, kDc, kHz);
    CHECK(longer.mean > cap.mean);

    cfg.payoff.strike.reset();
    CHECK(code_of([&] { price(cfg, kDc, kHz); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("yield collapse policy") {
    // Low rates and a large short-rate vol push some log-Euler paths into y = 0.
    const auto low = DiscountCurve::flat(0.005, 40.0);
    const auto zero = HazardCurve::flat(0.0, 40.0);
    SimulationConfig cfg;
    cfg.expiry = 1.0;
    cfg.hw.sigma = 0.02;
    cfg.n_paths = 256;
    cfg.workers = 1;

    const auto res = price(cfg, low, zero);
    REQUIRE(res.absorbed_paths > 0);
    std::size_t seen = 0;
    for (const auto& p : res.paths) {
        if (!p.absorbed) continue;
        ++seen;
        CHECK(p.terminal_yield == 0.0);
        CHECK(p.cmt == 0.0);
        CHECK(p.yield_vol == 0.0);
    }
    CHECK(seen == res.absorbed_paths);
    CHECK(res.yield_vol_stats.count == cfg.n_paths - res.absorbed_paths);

    cfg.zero_yield = ZeroYieldPolicy::Fail;
    CHECK(code_of([&] { price(cfg, low, zero); }) == ErrorCode::DegenerateYield);
}

TEST_CASE("caplet grid") {
    auto cfg = short_config(256);
    const std::vector<double> expiries{0.25, 0.5};
    const std::vector<double> strikes{0.8, 1.0, 1.25};
    const auto grid = price_caplet_grid(cfg, kDc, kHz, expiries, strikes, true);
    REQUIRE(grid.size() == 6);
    for (std::size_t e = 0; e < 2; ++e) {
        const double fwd = grid[3 * e].option.forward;
        CHECK(grid[3 * e].option.strike == doctest::Approx(0.8 * fwd).epsilon(1e-15));
        CHECK_FALSE(grid[3 * e].option.is_call);
        CHECK(grid[3 * e + 1].option.is_call);
        CHECK(grid[3 * e + 2].option.is_call);
        CHECK(grid[3 * e + 2].option.price < grid[3 * e + 1].option.price);
    }
    // The 0.25y expiry shares its paths and strike with a plain caplet run.
    cfg.payoff.kind = PayoffKind::Caplet;
    cfg.payoff.strike = grid[2].option.strike;
    CHECK(price(cfg, kDc, kHz).mean == doctest::Approx(grid[2].option.price).epsilon(1e-14));
}

TEST_CASE("configuration validation") {
    auto cfg = short_config();
    cfg.n_paths = 0;
    CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::InvalidArgument);
    cfg = short_config();
    cfg.step = 1.0;
    CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::InvalidArgument);
    cfg = short_config();
    cfg.payoff.kind = PayoffKind::Caplet;
    cfg.payoff.strike = -0.01;
    CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::InvalidArgument);
    cfg = short_config();
    CHECK(code_of([&] { price(cfg, DiscountCurve::flat(0.01, 5.0), kHz); }) == ErrorCode::ExtrapolationNotAllowed);
}
