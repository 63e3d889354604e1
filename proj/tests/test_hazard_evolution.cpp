#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "cmt/bondmath.hpp"
#include "cmt/curves.hpp"
#include "cmt/error.hpp"
#include "cmt/hazard_evolution.hpp"
#include "cmt/hullwhite.hpp"

using namespace cmt;

namespace {

BondSpec spec_with_recovery(double R) {
    BondSpec s;
    s.recovery = R;
    return s;
}

FwdZcSnapshot snapshot(const BondSpec& spec, const DiscountCurve& dc, const HullWhiteParams& hw, double T, double t,
                       double quad_step = 1.0 / 12.0) {
    auto snap = FwdZcSnapshot::make(spec, T, quad_step);
    snap.set_initial(dc);
    snap.set_coefficients(hw, t);
    return snap;
}

}  // namespace

TEST_CASE("snapshot grid") {
    const BondSpec spec;
    const auto snap = FwdZcSnapshot::make(spec, 1.0, 1.0 / 12.0);
    CHECK(snap.offsets.front() == 0.0);
    CHECK(snap.offsets.back() == spec.theta);
    CHECK(snap.coupon_nodes.size() == 20);
    CHECK(snap.quad_nodes.size() == 121);
    for (std::size_t k = 0; k < snap.coupon_nodes.size(); ++k)
        CHECK(snap.offsets[snap.coupon_nodes[k]] == static_cast<double>(k + 1) / spec.kappa);
    for (std::size_t i = 1; i < snap.size(); ++i) CHECK(snap.offsets[i] > snap.offsets[i - 1]);
    for (std::size_t i = 0; i < snap.size(); ++i) CHECK(snap.price(i) == 1.0);
}

TEST_CASE("psi oracles") {
    const auto dc = DiscountCurve::flat(0.01, 40.0);
    SUBCASE("zero intensity, no recovery, unit prices") {
        const BondSpec spec;
        const auto snap = FwdZcSnapshot::make(spec, 1.0, 1.0 / 12.0);
        const double y = 0.015;
        const double c = std::pow(1.0 + y, 1.0 / spec.kappa) - 1.0;
        double sum = 0.0;
        for (int i = 1; i <= 20; ++i) sum += 0.5 * i;
        const HazardState st{0.0, 0.0, HazardInit::Stabilized};
        CHECK(psi(st, snap, spec, y) == doctest::Approx(spec.theta / 2.0 + c * sum / 2.0).epsilon(1e-14));
    }
    SUBCASE("zero coupon reduces to the principal term") {
        const BondSpec spec;
        const auto snap = snapshot(spec, dc, {0.1, 0.01}, 1.0, 0.0);
        const double lam = 0.013;
        const HazardState st{lam, lam, HazardInit::Stabilized};
        const double expected = 0.5 * spec.theta * std::exp(-spec.theta * lam) * dc.forward_df(1.0, 11.0);
        CHECK(psi(st, snap, spec, 0.0) == doctest::Approx(expected).epsilon(1e-13));
    }
    SUBCASE("positive for non-negative inputs") {
        const auto spec = spec_with_recovery(0.4);
        const auto snap = snapshot(spec, dc, {0.1, 0.01}, 2.0, 0.5);
        for (double lam : {0.0, 0.01, 0.5, 5.0})
            CHECK(psi({lam, lam, HazardInit::Stabilized}, snap, spec, 0.01) > 0.0);
    }
}

TEST_CASE("phi oracles") {
    const auto dc = DiscountCurve::flat(0.012, 40.0);
    const HullWhiteParams hw{0.1, 0.01};
    const double T = 1.0, t = 0.4, dt = 1.0 / 365.0, y = 0.012;

    SUBCASE("zero intensity without recovery is the drift sum") {
        const BondSpec spec;
        const auto snap = snapshot(spec, dc, hw, T, t);
        const double c = std::pow(1.0 + y, 0.5) - 1.0;
        double expected = forward_zc_drift(hw, t, T, T + 10.0) * dc.forward_df(T, T + 10.0);
        for (int i = 1; i <= 20; ++i) {
            const double u = T + 0.5 * i;
            expected += c * forward_zc_drift(hw, t, T, u) * dc.forward_df(T, u);
        }
        expected *= dt;
        CHECK(phi({0.0, 0.0, HazardInit::Stabilized}, snap, spec, y, dt) == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("fixed-point algebra without drift") {
        const BondSpec spec;
        const auto snap = snapshot(spec, dc, {0.1, 0.0}, T, t);
        const double lam = 0.007;
        const HazardState st{lam, lam, HazardInit::Stabilized};
        CHECK(phi(st, snap, spec, y, dt) == doctest::Approx(lam * psi(st, snap, spec, y)).epsilon(1e-15));
    }
    SUBCASE("recovery group converges at second order in the quadrature step") {
        const auto spec = spec_with_recovery(0.3);
        const HazardState st{0.01, 0.012, HazardInit::Stabilized};
        std::vector<double> values;
        for (double h : {1.0 / 4.0, 1.0 / 8.0, 1.0 / 16.0}) {
            const auto snap = snapshot(spec, dc, hw, T, t, h);
            values.push_back(phi(st, snap, spec, y, dt));
        }
        const double ratio = (values[0] - values[1]) / (values[1] - values[2]);
        CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
    }
}

TEST_CASE("leapfrog recursion") {
    const auto dc = DiscountCurve::flat(0.01, 40.0);
    const BondSpec spec;
    const double dt = 1.0 / 365.0;

    SUBCASE("stabilized start is a fixed point without drift or recovery") {
        const double lam = 0.0123;
        auto st = HazardState::initial(lam, HazardInit::Stabilized);
        for (int j = 0; j < 250; ++j) {
            const auto snap = snapshot(spec, dc, {0.1, 0.0}, 1.0, j * dt);
            const auto step = step_hazard(st, snap, spec, 0.01, dt);
            CHECK_FALSE(step.clamped);
            st = step.next;
            CHECK(std::abs(st.lambda_curr - lam) < 1e-14);
        }
    }
    SUBCASE("paper-exact start alternates between zero and the initial level") {
        const double lam = 0.0123;
        auto st = HazardState::initial(lam, HazardInit::PaperExact);
        CHECK(st.lambda_prev == 0.0);
        const auto snap = snapshot(spec, dc, {0.1, 0.0}, 1.0, 0.0);
        for (int j = 1; j <= 10; ++j) {
            st = step_hazard(st, snap, spec, 0.01, dt).next;
            CHECK(st.lambda_curr == (j % 2 == 1 ? 0.0 : lam));
        }
    }
    SUBCASE("negative ratio clamps to zero") {
        HazardTerms terms;
        terms.weight = 1.0;
        terms.psi = 1.0;
        terms.rest = -0.5;
        terms.lambda_prev = 0.1;
        const auto step = step_hazard(terms, {0.1, 0.2, HazardInit::Stabilized});
        CHECK(step.clamped);
        CHECK(step.next.lambda_curr == 0.0);
        CHECK(step.next.lambda_prev == 0.2);
        terms.rest = 50.0;
        CHECK(step_hazard(terms, {0.1, 0.2, HazardInit::Stabilized}).next.lambda_curr == kHazardCap);
        terms.psi = 0.0;
        CHECK_THROWS_AS(step_hazard(terms, {0.1, 0.2, HazardInit::Stabilized}), Error);
    }
    SUBCASE("stays within bounds on random inputs") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const auto rspec = spec_with_recovery(0.6);
        for (int trial = 0; trial < 200; ++trial) {
            auto snap = snapshot(rspec, dc, {0.02 + 0.3 * u01(rng), 0.05 * u01(rng)}, 1.0, 0.9 * u01(rng));
            for (auto& lp : snap.log_p) lp += 0.2 * (u01(rng) - 0.5);
            const HazardState st{2.0 * u01(rng), 2.0 * u01(rng), HazardInit::Stabilized};
            const double next = step_hazard(st, snap, rspec, 0.05 * u01(rng), 0.5 * u01(rng) + 1e-3).next.lambda_curr;
            CHECK(next >= 0.0);
            CHECK(next <= kHazardCap);
        }
    }
}

TEST_CASE("ratio is homogeneous in the forward prices") {
    const auto dc = DiscountCurve::flat(0.015, 40.0);
    const auto spec = spec_with_recovery(0.25);
    const HazardState st{0.01, 0.015, HazardInit::Stabilized};
    auto snap = snapshot(spec, dc, {0.1, 0.01}, 2.0, 1.0);
    const auto base = hazard_terms(st, snap, spec, 0.015, 0.01);
    for (auto& lp : snap.log_p) lp += std::log(1.7);
    const auto scaled = hazard_terms(st, snap, spec, 0.015, 0.01);
    CHECK(scaled.phi() / scaled.psi == doctest::Approx(base.phi() / base.psi).epsilon(1e-12));
}

TEST_CASE("without recovery the quadrature grid does not matter") {
    const auto dc = DiscountCurve::flat(0.01, 40.0);
    const BondSpec spec;
    const HullWhiteParams hw{0.1, 0.01};
    const HazardState st{0.011, 0.012, HazardInit::Stabilized};
    const auto a = step_hazard(st, snapshot(spec, dc, hw, 1.0, 0.3, 1.0 / 12.0), spec, 0.01, 1.0 / 365.0);
    const auto b = step_hazard(st, snapshot(spec, dc, hw, 1.0, 0.3, 1.0 / 7.0), spec, 0.01, 1.0 / 365.0);
    const auto c = step_hazard(st, snapshot(spec, dc, hw, 1.0, 0.3, 0.5), spec, 0.01, 1.0 / 365.0);
    CHECK(a.next.lambda_curr == b.next.lambda_curr);
    CHECK(a.next.lambda_curr == c.next.lambda_curr);
}

TEST_CASE("survival from a constant intensity") {
    CHECK(survival_from_lambda(0.0, 1.0, 11.0) == 1.0);
    CHECK(survival_from_lambda(0.02, 1.0, 11.0) == doctest::Approx(0.8187308).epsilon(1e-7));
    CHECK(survival_from_lambda(0.3, 2.0, 2.0) == 1.0);
    CHECK_THROWS_AS(survival_from_lambda(0.02, 2.0, 1.0), Error);
    CHECK_THROWS_AS(HazardState::initial(-0.1, HazardInit::Stabilized), Error);
}
