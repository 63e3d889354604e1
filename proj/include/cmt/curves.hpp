#pragma once

#include <span>
#include <vector>

namespace cmt {

/// Calendar date (proleptic Gregorian).
struct Date {
    int year;
    unsigned month;
    unsigned day;
};

/// Parses an ISO `YYYY-MM-DD` string. Throws ParseError.
Date parse_date(const char* iso);

/// ACT/365F year fraction between two dates. Throws InvalidDateOrder if d2 < d1.
double year_fraction(const Date& d1, const Date& d2);

struct CurvePillar {
    double t;
    double value;
};

/// Discount factors DF(0,t), log-linear between pillars (piecewise-flat forwards).
/// The first pillar must be (0, 1). Beyond the last pillar queries fail unless
/// flat-forward extrapolation was enabled at construction.
class DiscountCurve {
public:
    DiscountCurve(std::vector<CurvePillar> pillars, bool allow_extrapolation = false);

    /// Continuously-compounded flat curve out to `horizon`.
    static DiscountCurve flat(double rate, double horizon = 100.0, bool allow_extrapolation = false);

    double discount_factor(double t) const;
    /// DF(0,U)/DF(0,T), the T-forward discount factor to U.
    double forward_df(double T, double U) const;

    std::span<const CurvePillar> pillars() const { return pillars_; }
    double last_time() const { return pillars_.back().t; }
    bool extrapolates() const { return extrapolate_; }

private:
    double log_df(double t) const;

    std::vector<CurvePillar> pillars_;
    std::vector<double> log_dfs_;
    bool extrapolate_;
};

/// Piecewise-constant default intensity. Pillar k carries the intensity on
/// [t_{k-1}, t_k) with t_{-1} = 0; the last pillar's segment is closed on the right.
class HazardCurve {
public:
    HazardCurve(std::vector<CurvePillar> pillars, bool allow_extrapolation = false);

    static HazardCurve flat(double lambda, double horizon = 100.0, bool allow_extrapolation = false);

    /// Instantaneous intensity at t (right-continuous inside the pillar range).
    double hazard_rate(double t) const;
    /// Limit of the intensity from the left at t > 0: the value of the
    /// segment (t_{k-1}, t_k] containing t.
    double left_hazard_rate(double t) const;
    /// Exact integral of the intensity over [0, T].
    double integrated_hazard(double T) const;
    double survival(double T) const;
    double forward_survival(double T, double U) const;

    std::span<const CurvePillar> pillars() const { return pillars_; }
    double last_time() const { return pillars_.back().t; }
    bool extrapolates() const { return extrapolate_; }
    HazardCurve with_extrapolation(bool allow) const;

private:
    std::vector<CurvePillar> pillars_;
    std::vector<double> cumulative_;  // integrated hazard at each pillar time
    bool extrapolate_;
};

/// Initial forward intensity over the bond window [T, T+theta]:
/// -ln(S(T+theta)/S(T)) / theta.
double initial_forward_hazard(const HazardCurve& curve, double T, double theta);

enum class PriceType { Dirty, Clean };

struct BondQuote {
    double maturity;
    double coupon_rate;
    int frequency;
    PriceType price_type = PriceType::Dirty;
    double price;
};

/// Model dirty price at t=0 of a defaultable coupon bond with recovery of par:
/// S(M)DF(M) + sum c_i S(T_i)DF(T_i) + R * Gamma(0,0,M). Coupon dates roll back
/// from maturity in steps of 1/frequency.
double spot_bond_price(const BondQuote& quote, const DiscountCurve& dc, const HazardCurve& hz,
                       double recovery, double quad_step = 1.0 / 12.0);

/// Dirty price implied by the quote (clean quotes get linear accrued added).
double dirty_price(const BondQuote& quote);

/// Sequential bootstrap of a piecewise-constant hazard curve with one pillar per
/// quote maturity. Quotes must be sorted by strictly increasing maturity.
HazardCurve strip_hazard(std::span<const BondQuote> quotes, const DiscountCurve& dc, double recovery,
                         double quad_step = 1.0 / 12.0);

}  // namespace cmt
