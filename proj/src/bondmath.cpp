#include "cmt/bondmath.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmt/curves.hpp"
#include "cmt/error.hpp"

namespace cmt {

namespace {

// E(z) = (e^z - 1)/z and its first two derivatives. The series branch avoids
// the cancellation of the closed forms near z = 0.
struct Exprel {
    double e, d1, d2;
};

Exprel exprel(double z) {
    if (std::abs(z) < 1.0) {
        // E = sum z^k/(k+1)!, E' = sum k z^(k-1)/(k+1)!, E'' = sum k(k-1) z^(k-2)/(k+1)!
        double e = 0.0, d1 = 0.0, d2 = 0.0;
        double inv_fact = 1.0;   // 1/(k+1)!
        double zpow[26] = {1.0};  // z^k
        for (int k = 1; k < 26; ++k) zpow[k] = zpow[k - 1] * z;
        for (int k = 0; k < 24; ++k) {
            inv_fact /= (k + 1);
            e += zpow[k] * inv_fact;
            if (k >= 1) d1 += k * zpow[k - 1] * inv_fact;
            if (k >= 2) d2 += k * (k - 1) * zpow[k - 2] * inv_fact;
        }
        return {e, d1, d2};
    }
    const double ez = std::exp(z);
    const double em1 = std::expm1(z);
    return {em1 / z, (z * ez - em1) / (z * z), (z * z * ez - 2.0 * z * ez + 2.0 * em1) / (z * z * z)};
}

}  // namespace

void BondSpec::validate() const {
    CMT_REQUIRE(theta > 0.0 && std::isfinite(theta), ErrorCode::InvalidArgument, "bond tenor theta must be positive");
    CMT_REQUIRE(kappa >= 1, ErrorCode::InvalidArgument, "coupon frequency kappa must be >= 1");
    CMT_REQUIRE(recovery >= 0.0 && recovery < 1.0, ErrorCode::InvalidArgument, "recovery must be in [0, 1)");
    CMT_REQUIRE(coupon_mode == CouponMode::CmtPar || fixed_coupon >= 0.0, ErrorCode::InvalidArgument,
                "fixed coupon must be non-negative");
}

int BondSpec::coupon_count() const { return static_cast<int>(std::floor(kappa * theta + 1e-9)); }

double par_period_coupon(int kappa, double y) {
    CMT_REQUIRE(y > -1.0, ErrorCode::DomainError, "yield must exceed -1");
    return std::expm1(std::log1p(y) / kappa);
}

double period_coupon(const BondSpec& spec, double y_proxy) {
    return spec.coupon_mode == CouponMode::FixedCoupon ? spec.fixed_coupon / spec.kappa
                                                       : par_period_coupon(spec.kappa, y_proxy);
}

double cmt_from_yield(int kappa, double y_terminal) {
    CMT_REQUIRE(kappa >= 1, ErrorCode::InvalidArgument, "kappa must be >= 1");
    return kappa * par_period_coupon(kappa, y_terminal);
}

YieldFunction YieldFunction::fixed(const BondSpec& spec) {
    spec.validate();
    return YieldFunction(spec.theta, spec.kappa, spec.fixed_coupon / spec.kappa);
}

YieldFunction YieldFunction::for_spec(const BondSpec& spec, double y_proxy) {
    if (spec.coupon_mode == CouponMode::FixedCoupon) return fixed(spec);
    spec.validate();
    return YieldFunction(spec.theta, spec.kappa, par_period_coupon(spec.kappa, y_proxy));
}

// With L = ln(1+x) the annuity ratio (1 - e^{-theta L})/(e^{L/kappa} - 1) equals
// kappa*theta*E(-theta L)/E(L/kappa), which is smooth through x = 0.
YieldFunction::Value YieldFunction::evaluate(double x) const {
    CMT_REQUIRE(x >= -1.0 + kYieldFloorEps, ErrorCode::DomainError, "yield must be at least -1 + 1e-8");
    const double q = 1.0 + x;
    const double L = std::log1p(x);
    const double kt = kappa_ * theta_;

    const Exprel n = exprel(-theta_ * L);
    const Exprel m = exprel(L / kappa_);
    const double N = n.e, N1 = -theta_ * n.d1, N2 = theta_ * theta_ * n.d2;
    const double M = m.e, M1 = m.d1 / kappa_, M2 = m.d2 / (double(kappa_) * kappa_);

    const double h = kt * N / M;
    const double hL = kt * (N1 * M - N * M1) / (M * M);
    const double hLL = kt * (N2 / M - 2.0 * N1 * M1 / (M * M) - N * M2 / (M * M) + 2.0 * N * M1 * M1 / (M * M * M));

    const double hx = hL / q;
    const double hxx = (hLL - hL) / (q * q);
    const double principal = std::exp(-theta_ * L);

    return {coupon_ * h + principal, coupon_ * hx - theta_ * principal / q,
            coupon_ * hxx + theta_ * (theta_ + 1.0) * principal / (q * q)};
}

double YieldFunction::inverse(double price) const {
    constexpr double kHi = 10.0;
    const double lo_x = -1.0 + kYieldFloorEps;
    CMT_REQUIRE(std::isfinite(price), ErrorCode::InversionRangeError, "price must be finite");
    const double f_lo = (*this)(lo_x);
    const double f_hi = (*this)(kHi);
    CMT_REQUIRE(price <= f_lo && price >= f_hi, ErrorCode::InversionRangeError,
                "price " + std::to_string(price) + " outside attainable range");

    const double tol = 1e-12 * std::max(1.0, std::abs(price));
    double lo = lo_x, hi = kHi;
    double x = std::clamp(coupon_ * kappa_, 0.0, 1.0);
    for (int iter = 0; iter < 200; ++iter) {
        const Value v = evaluate(x);
        const double r = v.f - price;
        if (std::abs(r) <= tol) return x;
        // f decreasing: r > 0 means the root lies above x.
        if (r > 0.0)
            lo = x;
        else
            hi = x;
        double next = v.df != 0.0 ? x - r / v.df : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x) break;
        x = next;
    }
    CMT_REQUIRE(false, ErrorCode::ConvergenceError, "yield inversion did not converge");
    return x;
}

double bond_from_yield(const YieldFunction& yf, double x) { return yf(x); }

YieldFunction::Value bond_derivatives(const YieldFunction& yf, double x) { return yf.evaluate(x); }

double yield_from_bond(const YieldFunction& yf, double price) { return yf.inverse(price); }

double gamma_integral(const CurveFn& forward_df, const CurveFn& forward_survival, const CurveFn& intensity,
                      double T, double U, double quad_step) {
    CMT_REQUIRE(U >= T, ErrorCode::InvalidInterval, "gamma integral requires U >= T");
    CMT_REQUIRE(quad_step > 0.0, ErrorCode::InvalidArgument, "quadrature step must be positive");
    if (U == T) return 0.0;
    auto integrand = [&](double u) { return forward_df(u) * forward_survival(u) * intensity(u); };
    const double span = U - T;
    const auto full = static_cast<long>(std::floor(span / quad_step * (1.0 + 1e-12)));
    double sum = 0.0;
    double prev_u = T, prev_v = integrand(T);
    for (long k = 1; k <= full; ++k) {
        const double u = std::min(U, T + k * quad_step);
        const double v = integrand(u);
        sum += 0.5 * (u - prev_u) * (prev_v + v);
        prev_u = u;
        prev_v = v;
    }
    if (U - prev_u > 1e-12 * std::max(1.0, span)) sum += 0.5 * (U - prev_u) * (prev_v + integrand(U));
    return sum;
}

namespace {

struct ForwardLegs {
    double principal;  // S(0,T,T+theta) DF(0,T,T+theta)
    double annuity;    // sum S(0,T,T_i) DF(0,T,T_i)
    double gamma;
};

ForwardLegs forward_legs(const DiscountCurve& dc, const HazardCurve& hz, const BondSpec& spec, double T,
                         double quad_step) {
    spec.validate();
    CMT_REQUIRE(T >= 0.0, ErrorCode::InvalidArgument, "expiry must be non-negative");
    const double end = T + spec.theta;
    ForwardLegs legs{};
    legs.principal = hz.forward_survival(T, end) * dc.forward_df(T, end);
    const int n = spec.coupon_count();
    for (int i = 1; i <= n; ++i) {
        const double ti = T + static_cast<double>(i) / spec.kappa;
        legs.annuity += hz.forward_survival(T, ti) * dc.forward_df(T, ti);
    }
    legs.gamma = spec.recovery == 0.0
                     ? 0.0
                     : gamma_integral([&](double u) { return dc.forward_df(T, u); },
                                      [&](double u) { return hz.forward_survival(T, u); },
                                      [&](double u) { return u < end ? hz.hazard_rate(u) : hz.left_hazard_rate(end); },
                                      T, end, quad_step);
    return legs;
}

}  // namespace

double initial_forward_bond_price(const DiscountCurve& dc, const HazardCurve& hz, const BondSpec& spec, double T,
                                  double quad_step) {
    const ForwardLegs legs = forward_legs(dc, hz, spec, T, quad_step);
    CMT_REQUIRE(spec.coupon_mode == CouponMode::FixedCoupon, ErrorCode::InvalidArgument,
                "forward bond price needs a fixed coupon; CmtPar bonds are at par by construction");
    return legs.principal + spec.fixed_coupon / spec.kappa * legs.annuity + spec.recovery * legs.gamma;
}

double initial_forward_yield(const DiscountCurve& dc, const HazardCurve& hz, const BondSpec& spec, double T,
                             double quad_step) {
    if (spec.coupon_mode == CouponMode::FixedCoupon)
        return YieldFunction::fixed(spec).inverse(initial_forward_bond_price(dc, hz, spec, T, quad_step));

    const ForwardLegs legs = forward_legs(dc, hz, spec, T, quad_step);
    CMT_REQUIRE(legs.annuity > 0.0, ErrorCode::DegenerateCurve, "coupon annuity is not positive");
    const double base = (1.0 - legs.principal - spec.recovery * legs.gamma) / legs.annuity + 1.0;
    CMT_REQUIRE(base > 0.0, ErrorCode::DegenerateCurve, "par coupon below -100%");
    return std::pow(base, spec.kappa) - 1.0;
}

}  // namespace cmt
