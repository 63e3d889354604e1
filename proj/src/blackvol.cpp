#include "cmt/blackvol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cmt/error.hpp"

namespace cmt {

namespace {

constexpr double kVolLo = 1e-4;
constexpr double kVolHi = 5.0;

// Undiscounted Black price per unit accrual.
double normalized_price(double F, double K, double vol, double T, bool call) {
    if (K == 0.0) return call ? F : 0.0;
    if (vol == 0.0) return call ? std::max(F - K, 0.0) : std::max(K - F, 0.0);
    const double s = vol * std::sqrt(T);
    const double d1 = std::log(F / K) / s + 0.5 * s;
    const double d2 = d1 - s;
    return call ? F * norm_cdf(d1) - K * norm_cdf(d2) : K * norm_cdf(-d2) - F * norm_cdf(-d1);
}

double normalized_vega(double F, double K, double vol, double T) {
    if (K == 0.0 || vol == 0.0) return 0.0;
    const double s = vol * std::sqrt(T);
    const double d1 = std::log(F / K) / s + 0.5 * s;
    return F * norm_pdf(d1) * std::sqrt(T);
}

void check_inputs(double F, double K, double vol, double T) {
    CMT_REQUIRE(F > 0.0 && std::isfinite(F), ErrorCode::DomainError, "forward must be positive");
    CMT_REQUIRE(K >= 0.0 && std::isfinite(K), ErrorCode::DomainError, "strike must be non-negative");
    CMT_REQUIRE(vol >= 0.0 && std::isfinite(vol), ErrorCode::DomainError, "volatility must be non-negative");
    CMT_REQUIRE(T > 0.0 && std::isfinite(T), ErrorCode::DomainError, "expiry must be positive");
}

}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double black_price(double forward, double strike, double vol, double expiry, double df, double accrual, bool is_call) {
    check_inputs(forward, strike, vol, expiry);
    return df * accrual * normalized_price(forward, strike, vol, expiry, is_call);
}

double black_vega(double forward, double strike, double vol, double expiry, double df, double accrual) {
    check_inputs(forward, strike, vol, expiry);
    return df * accrual * normalized_vega(forward, strike, vol, expiry);
}

double implied_vol(double price, double forward, double strike, double expiry, double df, double accrual,
                   bool is_call) {
    check_inputs(forward, strike, 0.0, expiry);
    CMT_REQUIRE(df > 0.0 && accrual > 0.0, ErrorCode::DomainError, "discount and accrual must be positive");
    CMT_REQUIRE(std::isfinite(price), ErrorCode::NoArbitrageViolation, "price is not finite");
    const double F = forward, K = strike, T = expiry;
    const double scale = df * accrual;
    double p = price / scale;

    const double intrinsic = is_call ? std::max(F - K, 0.0) : std::max(K - F, 0.0);
    const double upper = is_call ? F : K;
    CMT_REQUIRE(p > intrinsic && p < upper, ErrorCode::NoArbitrageViolation,
                "price outside (intrinsic, upper bound)");

    // Work on the out-of-the-money side: calls for K >= F, puts otherwise.
    bool call = is_call;
    if (is_call && K < F) {
        p -= F - K;
        call = false;
    } else if (!is_call && K >= F) {
        p -= K - F;
        call = true;
    }
    CMT_REQUIRE(p > 0.0, ErrorCode::NoArbitrageViolation, "time value lost to rounding");

    const double ln_target = std::log(p);
    double lo = kVolLo, hi = kVolHi;
    CMT_REQUIRE(normalized_price(F, K, lo, T, call) < p, ErrorCode::ConvergenceError, "implied vol below 1e-4");
    CMT_REQUIRE(normalized_price(F, K, hi, T, call) > p, ErrorCode::ConvergenceError, "implied vol above 5");

    // Newton on ln(price), safeguarded by a bisection bracket.
    double vol = std::clamp(p / (0.4 * F * std::sqrt(T)), 2.0 * lo, 0.5 * hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double b = normalized_price(F, K, vol, T, call);
        if (b < p)
            lo = vol;
        else
            hi = vol;
        const double vega = normalized_vega(F, K, vol, T);
        double next = 0.5 * (lo + hi);
        if (b > 0.0 && vega > 0.0) {
            const double newton = vol - (std::log(b) - ln_target) * b / vega;
            if (newton > lo && newton < hi) next = newton;
        }
        if (std::abs(next - vol) <= 1e-15 * vol || hi - lo <= 1e-15 * hi) {
            vol = next;
            const double residual = std::abs(scale * normalized_price(F, K, vol, T, call) - scale * p);
            CMT_REQUIRE(residual <= 1e-12 * scale * std::max(F, K), ErrorCode::ConvergenceError,
                        "implied vol residual above tolerance");
            return vol;
        }
        vol = next;
    }
    CMT_REQUIRE(false, ErrorCode::ConvergenceError, "implied vol did not converge in 200 iterations");
    return vol;
}

std::vector<VolSurfacePoint> build_surface(std::span<const OptionQuote> quotes) {
    std::vector<VolSurfacePoint> out;
    out.reserve(quotes.size());
    for (const OptionQuote& q : quotes) {
        VolSurfacePoint pt{q.expiry, q.strike, 0.0, q.price, false};
        try {
            pt.implied_vol = implied_vol(q.price, q.forward, q.strike, q.expiry, q.df, q.accrual, q.is_call);
            pt.converged = true;
        } catch (const Error&) {
            pt.converged = false;
        }
        out.push_back(pt);
    }
    return out;
}

}  // namespace cmt
