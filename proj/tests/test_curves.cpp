#include "doctest.h"

#include <cmath>
#include <vector>

#include "cmt/csv_io.hpp"
#include "cmt/curves.hpp"
#include "cmt/error.hpp"

using namespace cmt;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected cmt::Error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("year fractions use ACT/365F") {
    CHECK(year_fraction(parse_date("2012-03-28"), parse_date("2012-04-27")) == doctest::Approx(30.0 / 365.0).epsilon(1e-15));
    CHECK(year_fraction(parse_date("2012-03-28"), parse_date("2013-03-28")) == 1.0);
    // 2012 is a leap year, so the 366-day span is not a whole year.
    CHECK(year_fraction(parse_date("2012-01-01"), parse_date("2013-01-01")) == doctest::Approx(366.0 / 365.0));
    CHECK(year_fraction(parse_date("2012-03-28"), parse_date("2012-03-28")) == 0.0);
    CHECK(code_of([] { year_fraction(parse_date("2013-03-28"), parse_date("2012-03-28")); }) ==
          ErrorCode::InvalidDateOrder);
    CHECK(code_of([] { parse_date("2012-02-30"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_date("28/03/2012"); }) == ErrorCode::ParseError);
}

TEST_CASE("discount curve interpolates log-linearly") {
    const DiscountCurve dc({{0.0, 1.0}, {1.0, 0.99}, {2.0, 0.97}});
    CHECK(dc.discount_factor(0.0) == 1.0);
    CHECK(dc.discount_factor(1.0) == doctest::Approx(0.99).epsilon(1e-15));
    CHECK(dc.discount_factor(1.5) == doctest::Approx(std::sqrt(0.99 * 0.97)).epsilon(1e-14));
    CHECK(dc.discount_factor(1.5) == doctest::Approx(0.9799490).epsilon(1e-7));
    CHECK(dc.forward_df(1.0, 2.0) == doctest::Approx(0.97 / 0.99).epsilon(1e-14));

    SUBCASE("forward rates are flat between pillars") {
        const double f1 = -std::log(dc.forward_df(1.1, 1.2)) / 0.1;
        const double f2 = -std::log(dc.forward_df(1.7, 1.9)) / 0.2;
        CHECK(f1 == doctest::Approx(f2).epsilon(1e-12));
    }
    SUBCASE("extrapolation is opt-in") {
        CHECK(code_of([&] { dc.discount_factor(2.5); }) == ErrorCode::ExtrapolationNotAllowed);
        const DiscountCurve ext({{0.0, 1.0}, {1.0, 0.99}, {2.0, 0.97}}, true);
        const double last_fwd = std::log(0.99 / 0.97);
        CHECK(ext.discount_factor(3.0) == doctest::Approx(0.97 * std::exp(-last_fwd)).epsilon(1e-14));
    }
}

TEST_CASE("discount curve validation") {
    CHECK(code_of([] { DiscountCurve({{0.0, 1.0}, {2.0, 0.98}, {1.0, 0.99}}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { DiscountCurve({{0.5, 1.0}, {1.0, 0.99}}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { DiscountCurve({{0.0, 1.0}, {1.0, -0.1}}); }) == ErrorCode::InvalidArgument);
    const auto flat = DiscountCurve::flat(0.01, 10.0);
    CHECK(flat.forward_df(1.0, 2.0) == doctest::Approx(std::exp(-0.01)).epsilon(1e-14));
    CHECK(code_of([&] { flat.forward_df(2.0, 1.0); }) == ErrorCode::InvalidInterval);
    CHECK(code_of([&] { flat.discount_factor(-1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("hazard curve survival") {
    const auto flat = HazardCurve::flat(0.02, 20.0);
    CHECK(flat.survival(10.0) == doctest::Approx(std::exp(-0.2)).epsilon(1e-15));
    CHECK(flat.survival(10.0) == doctest::Approx(0.8187308).epsilon(1e-7));

    const HazardCurve piecewise({{5.0, 0.01}, {20.0, 0.03}});
    CHECK(piecewise.survival(10.0) == doctest::Approx(std::exp(-0.2)).epsilon(1e-15));
    CHECK(piecewise.hazard_rate(4.999) == 0.01);
    CHECK(piecewise.hazard_rate(5.0) == 0.03);
    CHECK(piecewise.left_hazard_rate(5.0) == 0.01);
    CHECK(piecewise.left_hazard_rate(5.001) == 0.03);
    CHECK(piecewise.forward_survival(5.0, 10.0) == doctest::Approx(std::exp(-0.15)).epsilon(1e-15));

    SUBCASE("survival is non-increasing and starts at one") {
        CHECK(piecewise.survival(0.0) == 1.0);
        double prev = 1.0;
        for (int i = 1; i <= 200; ++i) {
            const double s = piecewise.survival(0.1 * i);
            CHECK(s <= prev);
            CHECK(s > 0.0);
            prev = s;
        }
    }
    SUBCASE("initial forward hazard") {
        // S(T) = 0.9, S(T+theta) = 0.8 with theta = 10.
        const double lam1 = -std::log(0.9);
        const double lam2 = -std::log(0.8 / 0.9) / 10.0;
        const HazardCurve hz({{1.0, lam1}, {11.0, lam2}});
        CHECK(initial_forward_hazard(hz, 1.0, 10.0) == doctest::Approx(0.0117783).epsilon(1e-6));
        CHECK(initial_forward_hazard(flat, 2.0, 10.0) == doctest::Approx(0.02).epsilon(1e-13));
        CHECK(code_of([&] { initial_forward_hazard(hz, 1.0, 0.0); }) == ErrorCode::InvalidTenor);
    }
    SUBCASE("validation and extrapolation") {
        CHECK(code_of([] { HazardCurve({{1.0, -0.01}}); }) == ErrorCode::InvalidArgument);
        CHECK(code_of([] { HazardCurve({{2.0, 0.01}, {1.0, 0.01}}); }) == ErrorCode::InvalidArgument);
        CHECK(code_of([&] { piecewise.survival(25.0); }) == ErrorCode::ExtrapolationNotAllowed);
        const auto ext = piecewise.with_extrapolation(true);
        CHECK(ext.survival(25.0) == doctest::Approx(std::exp(-(0.05 + 0.6))).epsilon(1e-14));
    }
}

TEST_CASE("bootstrapped hazard curve") {
    const auto dc = DiscountCurve::flat(0.01, 30.0);

    SUBCASE("zero-coupon bond with no recovery") {
        const BondQuote q{10.0, 0.0, 1, PriceType::Dirty, dc.discount_factor(10.0) * std::exp(-0.2)};
        const auto hz = strip_hazard(std::span(&q, 1), dc, 0.0);
        REQUIRE(hz.pillars().size() == 1);
        CHECK(hz.pillars()[0].value == doctest::Approx(0.02).epsilon(1e-10));
    }
    SUBCASE("risk-free quotes strip to zero intensity") {
        const auto zero = HazardCurve::flat(0.0, 30.0);
        std::vector<BondQuote> qs;
        for (double m : {2.0, 5.0, 10.0}) {
            BondQuote q{m, 0.015, 2, PriceType::Dirty, 1.0};
            q.price = spot_bond_price(q, dc, zero, 0.2);
            qs.push_back(q);
        }
        const auto hz = strip_hazard(qs, dc, 0.2);
        for (const auto& p : hz.pillars()) CHECK(p.value == 0.0);
    }
    SUBCASE("roundtrip through a known curve") {
        const HazardCurve truth({{3.0, 0.004}, {7.0, 0.009}, {15.0, 0.015}});
        std::vector<BondQuote> qs;
        for (double m : {3.0, 7.0, 15.0}) {
            BondQuote q{m, 0.02, 2, PriceType::Dirty, 1.0};
            q.price = spot_bond_price(q, dc, truth, 0.4);
            qs.push_back(q);
        }
        const auto hz = strip_hazard(qs, dc, 0.4);
        for (std::size_t i = 0; i < qs.size(); ++i) {
            CHECK(hz.pillars()[i].value == doctest::Approx(truth.pillars()[i].value).epsilon(1e-9));
            CHECK(std::abs(spot_bond_price(qs[i], dc, hz, 0.4) - qs[i].price) < 1e-10);
        }
    }
    SUBCASE("bad quote sets") {
        std::vector<BondQuote> inverted{{5.0, 0.01, 2, PriceType::Dirty, 0.95}, {2.0, 0.01, 2, PriceType::Dirty, 0.98}};
        CHECK(code_of([&] { strip_hazard(inverted, dc, 0.2); }) == ErrorCode::InvalidArgument);
        const BondQuote rich{5.0, 0.01, 2, PriceType::Dirty, 1.2};
        CHECK(code_of([&] { strip_hazard(std::span(&rich, 1), dc, 0.2); }) == ErrorCode::NegativeHazardImplied);
    }
    SUBCASE("clean quotes add linear accrued") {
        // 2.75y semiannual: the previous coupon was a quarter year ago.
        const BondQuote clean{2.75, 0.02, 2, PriceType::Clean, 0.99};
        CHECK(dirty_price(clean) == doctest::Approx(0.99 + 0.02 * 0.25).epsilon(1e-14));
    }
}

TEST_CASE("fixture files load") {
    const std::string dir = CMT_DATA_DIR;
    const auto dc = load_discount_csv(dir + "/jpy_like_discount.csv");
    const auto hz = load_hazard_csv(dir + "/jpy_like_hazard.csv");
    const auto qs = load_bond_quotes_csv(dir + "/jpy_like_quotes.csv");
    CHECK(dc.last_time() >= 40.0);
    CHECK(hz.pillars().size() == 10);
    CHECK(qs.size() >= 10);
    CHECK(code_of([&] { load_discount_csv(dir + "/does_not_exist.csv"); }) == ErrorCode::IoError);
    CHECK(code_of([&] { load_discount_csv(dir + "/jpy_like_hazard.csv"); }) == ErrorCode::ParseError);

    const auto stripped = strip_hazard(qs, dc, 0.2);
    for (std::size_t i = 0; i < qs.size(); ++i)
        CHECK(std::abs(spot_bond_price(qs[i], dc, stripped, 0.2) - dirty_price(qs[i])) < 1e-10);
}
