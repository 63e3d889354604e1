#include "cmt/curves.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <string>

#include "cmt/bondmath.hpp"
#include "cmt/error.hpp"

namespace cmt {

namespace {

std::string fmt_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", t);
    return buf;
}

void check_pillar_times(const std::vector<CurvePillar>& pillars, const char* what) {
    for (std::size_t i = 0; i < pillars.size(); ++i) {
        CMT_REQUIRE(std::isfinite(pillars[i].t) && std::isfinite(pillars[i].value), ErrorCode::InvalidArgument,
                    std::string(what) + ": non-finite pillar");
        if (i > 0)
            CMT_REQUIRE(pillars[i].t > pillars[i - 1].t, ErrorCode::InvalidArgument,
                        std::string(what) + ": pillar times must be strictly increasing");
    }
}

}  // namespace

Date parse_date(const char* iso) {
    int y = 0, m = 0, d = 0;
    const char* end = iso + std::strlen(iso);
    auto r1 = std::from_chars(iso, end, y);
    bool ok = r1.ec == std::errc{} && r1.ptr != end && *r1.ptr == '-';
    if (ok) {
        auto r2 = std::from_chars(r1.ptr + 1, end, m);
        ok = r2.ec == std::errc{} && r2.ptr != end && *r2.ptr == '-';
        if (ok) {
            auto r3 = std::from_chars(r2.ptr + 1, end, d);
            ok = r3.ec == std::errc{} && r3.ptr == end;
        }
    }
    Date date{y, static_cast<unsigned>(m), static_cast<unsigned>(d)};
    using namespace std::chrono;
    ok = ok && m > 0 && d > 0 && year_month_day{year{y}, month{date.month}, day{date.day}}.ok();
    CMT_REQUIRE(ok, ErrorCode::ParseError, std::string("invalid date '") + iso + "'");
    return date;
}

double year_fraction(const Date& d1, const Date& d2) {
    using namespace std::chrono;
    const sys_days a{year_month_day{year{d1.year}, month{d1.month}, day{d1.day}}};
    const sys_days b{year_month_day{year{d2.year}, month{d2.month}, day{d2.day}}};
    CMT_REQUIRE(b >= a, ErrorCode::InvalidDateOrder, "end date precedes start date");
    return static_cast<double>((b - a).count()) / 365.0;
}

// ---------------------------------------------------------------------------

DiscountCurve::DiscountCurve(std::vector<CurvePillar> pillars, bool allow_extrapolation)
    : pillars_(std::move(pillars)), extrapolate_(allow_extrapolation) {
    CMT_REQUIRE(pillars_.size() >= 2, ErrorCode::InvalidArgument, "discount curve needs at least two pillars");
    check_pillar_times(pillars_, "discount curve");
    CMT_REQUIRE(pillars_.front().t == 0.0 && pillars_.front().value == 1.0, ErrorCode::InvalidArgument,
                "discount curve must start at (0, 1)");
    log_dfs_.reserve(pillars_.size());
    for (const auto& p : pillars_) {
        CMT_REQUIRE(p.value > 0.0, ErrorCode::InvalidArgument, "discount factors must be positive");
        log_dfs_.push_back(std::log(p.value));
    }
}

DiscountCurve DiscountCurve::flat(double rate, double horizon, bool allow_extrapolation) {
    return DiscountCurve({{0.0, 1.0}, {horizon, std::exp(-rate * horizon)}}, allow_extrapolation);
}

double DiscountCurve::log_df(double t) const {
    CMT_REQUIRE(t >= 0.0, ErrorCode::InvalidArgument, "negative time " + fmt_time(t));
    const std::size_t n = pillars_.size();
    if (t > pillars_.back().t) {
        CMT_REQUIRE(extrapolate_, ErrorCode::ExtrapolationNotAllowed,
                    "t=" + fmt_time(t) + " beyond last discount pillar " + fmt_time(pillars_.back().t));
        const double slope = (log_dfs_[n - 1] - log_dfs_[n - 2]) / (pillars_[n - 1].t - pillars_[n - 2].t);
        return log_dfs_[n - 1] + slope * (t - pillars_[n - 1].t);
    }
    auto it = std::lower_bound(pillars_.begin(), pillars_.end(), t,
                               [](const CurvePillar& p, double x) { return p.t < x; });
    const auto i = static_cast<std::size_t>(it - pillars_.begin());
    if (it->t == t) return log_dfs_[i];
    const double w = (t - pillars_[i - 1].t) / (pillars_[i].t - pillars_[i - 1].t);
    return (1.0 - w) * log_dfs_[i - 1] + w * log_dfs_[i];
}

double DiscountCurve::discount_factor(double t) const {
    auto it = std::lower_bound(pillars_.begin(), pillars_.end(), t,
                               [](const CurvePillar& p, double x) { return p.t < x; });
    if (it != pillars_.end() && it->t == t) return it->value;
    return std::exp(log_df(t));
}

double DiscountCurve::forward_df(double T, double U) const {
    CMT_REQUIRE(U >= T, ErrorCode::InvalidInterval, "forward_df requires U >= T");
    if (U == T) return 1.0;
    return std::exp(log_df(U) - log_df(T));
}

// ---------------------------------------------------------------------------

HazardCurve::HazardCurve(std::vector<CurvePillar> pillars, bool allow_extrapolation)
    : pillars_(std::move(pillars)), extrapolate_(allow_extrapolation) {
    CMT_REQUIRE(!pillars_.empty(), ErrorCode::InvalidArgument, "hazard curve needs at least one pillar");
    check_pillar_times(pillars_, "hazard curve");
    CMT_REQUIRE(pillars_.front().t > 0.0, ErrorCode::InvalidArgument, "hazard pillar times must be positive");
    cumulative_.reserve(pillars_.size());
    double acc = 0.0, prev = 0.0;
    for (const auto& p : pillars_) {
        CMT_REQUIRE(p.value >= 0.0, ErrorCode::InvalidArgument, "hazard rates must be non-negative");
        acc += p.value * (p.t - prev);
        prev = p.t;
        cumulative_.push_back(acc);
    }
}

HazardCurve HazardCurve::flat(double lambda, double horizon, bool allow_extrapolation) {
    return HazardCurve({{horizon, lambda}}, allow_extrapolation);
}

HazardCurve HazardCurve::with_extrapolation(bool allow) const {
    HazardCurve copy = *this;
    copy.extrapolate_ = allow;
    return copy;
}

double HazardCurve::hazard_rate(double t) const {
    CMT_REQUIRE(t >= 0.0, ErrorCode::InvalidArgument, "negative time " + fmt_time(t));
    if (t >= pillars_.back().t) {
        CMT_REQUIRE(t == pillars_.back().t || extrapolate_, ErrorCode::ExtrapolationNotAllowed,
                    "t=" + fmt_time(t) + " beyond last hazard pillar " + fmt_time(pillars_.back().t));
        return pillars_.back().value;
    }
    auto it = std::upper_bound(pillars_.begin(), pillars_.end(), t,
                               [](double x, const CurvePillar& p) { return x < p.t; });
    return it->value;
}

double HazardCurve::left_hazard_rate(double t) const {
    CMT_REQUIRE(t > 0.0, ErrorCode::InvalidArgument, "left limit needs t > 0");
    if (t > pillars_.back().t) return hazard_rate(t);
    auto it = std::lower_bound(pillars_.begin(), pillars_.end(), t,
                               [](const CurvePillar& p, double x) { return p.t < x; });
    return it->value;
}

double HazardCurve::integrated_hazard(double T) const {
    CMT_REQUIRE(T >= 0.0, ErrorCode::InvalidArgument, "negative time " + fmt_time(T));
    const double last = pillars_.back().t;
    if (T > last) {
        CMT_REQUIRE(extrapolate_, ErrorCode::ExtrapolationNotAllowed,
                    "T=" + fmt_time(T) + " beyond last hazard pillar " + fmt_time(last));
        return cumulative_.back() + pillars_.back().value * (T - last);
    }
    auto it = std::lower_bound(pillars_.begin(), pillars_.end(), T,
                               [](const CurvePillar& p, double x) { return p.t < x; });
    const auto i = static_cast<std::size_t>(it - pillars_.begin());
    const double start = i == 0 ? 0.0 : pillars_[i - 1].t;
    const double before = i == 0 ? 0.0 : cumulative_[i - 1];
    return before + it->value * (T - start);
}

double HazardCurve::survival(double T) const { return std::exp(-integrated_hazard(T)); }

double HazardCurve::forward_survival(double T, double U) const {
    CMT_REQUIRE(T >= 0.0 && U >= T, ErrorCode::InvalidInterval, "forward_survival requires 0 <= T <= U");
    if (U == T) return 1.0;
    return std::exp(-(integrated_hazard(U) - integrated_hazard(T)));
}

double initial_forward_hazard(const HazardCurve& curve, double T, double theta) {
    CMT_REQUIRE(theta > 0.0, ErrorCode::InvalidTenor, "tenor must be positive");
    return std::log(curve.survival(T) / curve.survival(T + theta)) / theta;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> coupon_times(const BondQuote& q) {
    std::vector<double> times;
    const double period = 1.0 / q.frequency;
    for (int k = 0;; ++k) {
        const double t = q.maturity - k * period;
        if (t <= 1e-12) break;
        times.push_back(t);
    }
    std::reverse(times.begin(), times.end());
    return times;
}

void validate_quote(const BondQuote& q) {
    CMT_REQUIRE(q.maturity > 0.0 && std::isfinite(q.maturity), ErrorCode::InvalidArgument,
                "quote maturity must be positive");
    CMT_REQUIRE(q.price > 0.0 && std::isfinite(q.price), ErrorCode::InvalidArgument, "quote price must be positive");
    CMT_REQUIRE(q.frequency >= 1, ErrorCode::InvalidArgument, "coupon frequency must be >= 1");
    CMT_REQUIRE(q.coupon_rate >= 0.0, ErrorCode::InvalidArgument, "coupon rate must be non-negative");
}

}  // namespace

double dirty_price(const BondQuote& quote) {
    if (quote.price_type == PriceType::Dirty) return quote.price;
    const auto times = coupon_times(quote);
    const double period = 1.0 / quote.frequency;
    const double elapsed = period - times.front();
    return quote.price + quote.coupon_rate * std::max(0.0, elapsed);
}

double spot_bond_price(const BondQuote& quote, const DiscountCurve& dc, const HazardCurve& hz, double recovery,
                       double quad_step) {
    validate_quote(quote);
    const double coupon = quote.coupon_rate / quote.frequency;
    double price = hz.survival(quote.maturity) * dc.discount_factor(quote.maturity);
    if (coupon != 0.0) {
        for (double t : coupon_times(quote)) price += coupon * hz.survival(t) * dc.discount_factor(t);
    }
    if (recovery != 0.0) {
        const double gamma = gamma_integral([&](double u) { return dc.discount_factor(u); },
                                            [&](double u) { return hz.survival(u); },
                                            [&](double u) {
                                                return u < quote.maturity ? hz.hazard_rate(u)
                                                                          : hz.left_hazard_rate(quote.maturity);
                                            },
                                            0.0, quote.maturity,
                                            quad_step);
        price += recovery * gamma;
    }
    return price;
}

HazardCurve strip_hazard(std::span<const BondQuote> quotes, const DiscountCurve& dc, double recovery,
                         double quad_step) {
    CMT_REQUIRE(!quotes.empty(), ErrorCode::InvalidArgument, "no bond quotes to strip");
    CMT_REQUIRE(recovery >= 0.0 && recovery < 1.0, ErrorCode::InvalidArgument, "recovery must be in [0, 1)");
    for (std::size_t i = 0; i < quotes.size(); ++i) {
        validate_quote(quotes[i]);
        if (i > 0)
            CMT_REQUIRE(quotes[i].maturity > quotes[i - 1].maturity, ErrorCode::InvalidArgument,
                        "quotes must be sorted by strictly increasing maturity (offending maturity " +
                            fmt_time(quotes[i].maturity) + ")");
    }

    constexpr double kLambdaMax = 10.0;
    constexpr double kLambdaTol = 1e-12;
    std::vector<CurvePillar> pillars;
    for (const BondQuote& q : quotes) {
        const double target = dirty_price(q);
        auto residual = [&](double lambda) {
            auto trial = pillars;
            trial.push_back({q.maturity, lambda});
            return spot_bond_price(q, dc, HazardCurve(std::move(trial)), recovery, quad_step) - target;
        };

        const double r0 = residual(0.0);
        const double scale = 1e-14 * std::max(1.0, target);
        if (std::abs(r0) <= scale) {
            pillars.push_back({q.maturity, 0.0});
            continue;
        }
        CMT_REQUIRE(r0 > 0.0, ErrorCode::NegativeHazardImplied,
                    "quote at maturity " + fmt_time(q.maturity) + " is above its risk-free value");
        double lo = 0.0, hi = kLambdaMax, r_lo = r0, r_hi = residual(kLambdaMax);
        CMT_REQUIRE(r_hi < 0.0, ErrorCode::StrippingFailed,
                    "hazard root not bracketed in [0, 10] at maturity " + fmt_time(q.maturity));

        // Bisection to a narrow bracket, then secant steps kept inside it.
        while (hi - lo > 1e-4) {
            const double mid = 0.5 * (lo + hi);
            const double r = residual(mid);
            if (r > 0.0) {
                lo = mid;
                r_lo = r;
            } else {
                hi = mid;
                r_hi = r;
            }
        }
        // Illinois variant: halve the stale endpoint's residual when the same
        // side is retained twice, which keeps the secant from stalling.
        double x = lo;
        int last_side = 0;
        bool converged = false;
        for (int iter = 0; iter < 200; ++iter) {
            double next = lo - r_lo * (hi - lo) / (r_hi - r_lo);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            const double r = residual(next);
            const double step = std::abs(next - x);
            x = next;
            if (r == 0.0 || step < kLambdaTol || hi - lo < kLambdaTol) {
                converged = true;
                break;
            }
            if (r > 0.0) {
                lo = next;
                r_lo = r;
                if (last_side == 1) r_hi *= 0.5;
                last_side = 1;
            } else {
                hi = next;
                r_hi = r;
                if (last_side == -1) r_lo *= 0.5;
                last_side = -1;
            }
        }
        CMT_REQUIRE(converged, ErrorCode::StrippingFailed,
                    "hazard root did not converge at maturity " + fmt_time(q.maturity));
        pillars.push_back({q.maturity, x});
    }
    return HazardCurve(std::move(pillars));
}

}  // namespace cmt
