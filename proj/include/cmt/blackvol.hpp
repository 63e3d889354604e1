#pragma once

#include <span>
#include <vector>

namespace cmt {

double norm_cdf(double x);
double norm_pdf(double x);

/// Black-76 caplet (call) or floorlet (put) on a forward rate F:
/// df * accrual * (F N(d1) - K N(d2)) for calls, mirrored for puts.
double black_price(double forward, double strike, double vol, double expiry, double df, double accrual, bool is_call);

/// d price / d vol.
double black_vega(double forward, double strike, double vol, double expiry, double df, double accrual);

/// Implied Black volatility in [1e-4, 5]. In-the-money inputs are mapped to
/// the out-of-the-money side through put-call parity before inversion.
/// Throws NoArbitrageViolation when the price is not strictly inside the
/// arbitrage bounds, ConvergenceError when the root leaves the bracket or
/// the iteration budget is exhausted.
double implied_vol(double price, double forward, double strike, double expiry, double df, double accrual,
                   bool is_call);

struct OptionQuote {
    double expiry = 0.0;
    double strike = 0.0;
    double price = 0.0;
    double forward = 0.0;
    double df = 1.0;
    double accrual = 1.0;
    bool is_call = true;
};

struct VolSurfacePoint {
    double expiry = 0.0;
    double strike = 0.0;
    double implied_vol = 0.0;
    double source_price = 0.0;
    bool converged = false;
};

/// Inverts every quote independently; failures are flagged, never thrown.
std::vector<VolSurfacePoint> build_surface(std::span<const OptionQuote> quotes);

}  // namespace cmt
