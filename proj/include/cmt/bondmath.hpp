#pragma once

#include <functional>

namespace cmt {

class DiscountCurve;
class HazardCurve;

enum class CouponMode { FixedCoupon, CmtPar };

/// Constant-maturity bond: tenor theta (years), kappa coupons per year and
/// issuer recovery R. In FixedCoupon mode `fixed_coupon` is the per-annum rate;
/// in CmtPar mode the coupon is the par rate implied by the current yield proxy.
struct BondSpec {
    double theta = 10.0;
    int kappa = 2;
    double recovery = 0.0;
    CouponMode coupon_mode = CouponMode::CmtPar;
    double fixed_coupon = 0.0;

    void validate() const;
    /// Number of coupon dates T + i/kappa inside (T, T+theta].
    int coupon_count() const;
};

inline constexpr double kYieldFloorEps = 1e-8;

/// Bond price as a function of its yield to maturity:
/// f(x) = c (1 - (1+x)^-theta) / ((1+x)^(1/kappa) - 1) + (1+x)^-theta,
/// with c the per-period coupon.
class YieldFunction {
public:
    struct Value {
        double f;
        double df;
        double d2f;
    };

    static YieldFunction fixed(const BondSpec& spec);
    /// CmtPar coupon frozen at the par rate of `y_proxy`; in FixedCoupon mode
    /// the proxy is ignored.
    static YieldFunction for_spec(const BondSpec& spec, double y_proxy);

    double period_coupon() const { return coupon_; }
    double theta() const { return theta_; }
    int kappa() const { return kappa_; }

    double operator()(double x) const { return evaluate(x).f; }
    Value evaluate(double x) const;

    /// Inverse g = f^-1 by bracketed safeguarded Newton on [-1+eps, 10].
    double inverse(double price) const;

private:
    YieldFunction(double theta, int kappa, double coupon) : theta_(theta), kappa_(kappa), coupon_(coupon) {}

    double theta_;
    int kappa_;
    double coupon_;
};

double bond_from_yield(const YieldFunction& yf, double x);
YieldFunction::Value bond_derivatives(const YieldFunction& yf, double x);
double yield_from_bond(const YieldFunction& yf, double price);

/// Per-period par coupon (1+y)^(1/kappa) - 1.
double par_period_coupon(int kappa, double y);

/// Per-period coupon of `spec`: fixed_coupon/kappa, or the par coupon of y_proxy.
double period_coupon(const BondSpec& spec, double y_proxy);

/// kappa ((1+y)^(1/kappa) - 1).
double cmt_from_yield(int kappa, double y_terminal);

using CurveFn = std::function<double(double)>;

/// Composite trapezoid of P(u) S(u) lambda(u) over [T, U] on the nodes
/// T, T+h, ..., with a final partial panel ending at U.
double gamma_integral(const CurveFn& forward_df, const CurveFn& forward_survival, const CurveFn& intensity,
                      double T, double U, double quad_step);

/// Forward price at t=0 of the T-forward bond under the initial curves:
/// S DF + (c/kappa) sum S DF + R Gamma, with the coupon taken from the spec.
double initial_forward_bond_price(const DiscountCurve& dc, const HazardCurve& hz, const BondSpec& spec,
                                  double T, double quad_step = 1.0 / 12.0);

/// Initial forward yield y_{0,T}. CmtPar: the par-bond closed form
/// ((1 - S DF - R Gamma) / sum S DF + 1)^kappa - 1. FixedCoupon: the yield of
/// the initial forward bond price.
double initial_forward_yield(const DiscountCurve& dc, const HazardCurve& hz, const BondSpec& spec, double T,
                             double quad_step = 1.0 / 12.0);

}  // namespace cmt
