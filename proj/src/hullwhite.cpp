#include "cmt/hullwhite.hpp"

#include <cmath>

#include "cmt/error.hpp"

namespace cmt {

namespace {
constexpr double kSmallReversion = 1e-8;
}

void HullWhiteParams::validate() const {
    CMT_REQUIRE(alpha > 0.0 && std::isfinite(alpha), ErrorCode::InvalidArgument, "alpha must be positive");
    CMT_REQUIRE(sigma >= 0.0 && std::isfinite(sigma), ErrorCode::InvalidArgument, "sigma must be non-negative");
}

double zc_vol(const HullWhiteParams& p, double t, double T) {
    CMT_REQUIRE(T >= t, ErrorCode::InvalidInterval, "zc_vol requires T >= t");
    const double tau = T - t;
    // Two-term series: the bare limit sigma*tau would jump by sigma*tau*alpha*tau/2 at the switch.
    if (p.alpha * tau < kSmallReversion) return p.sigma * tau * (1.0 - 0.5 * p.alpha * tau);
    return -p.sigma * std::expm1(-p.alpha * tau) / p.alpha;
}

double forward_zc_vol(const HullWhiteParams& p, double t, double T, double U) {
    CMT_REQUIRE(t <= T && T <= U, ErrorCode::InvalidInterval, "forward_zc_vol requires t <= T <= U");
    if (p.alpha * (U - t) < kSmallReversion)
        return p.sigma * (U - T) * (1.0 - p.alpha * (T - t) - 0.5 * p.alpha * (U - T));
    return -p.sigma / p.alpha * std::exp(-p.alpha * (T - t)) * std::expm1(-p.alpha * (U - T));
}

double forward_zc_drift(const HullWhiteParams& p, double t, double T, double U) {
    CMT_REQUIRE(t <= T && T <= U, ErrorCode::InvalidInterval, "forward_zc_drift requires t <= T <= U");
    const double vT = zc_vol(p, t, T);
    return vT * vT - vT * zc_vol(p, t, U);
}

double step_forward_zc(const HullWhiteParams& p, double P, double t, double dt, double T, double U, double z) {
    const double xi = forward_zc_drift(p, t, T, U);
    const double vol = forward_zc_vol(p, t, T, U);
    return P * std::exp((xi - 0.5 * vol * vol) * dt + vol * std::sqrt(dt) * z);
}

}  // namespace cmt
