#pragma once

namespace cmt {

/// One-factor Hull-White volatility parameters, dr = alpha(r~ - r)dt + sigma dW.
/// Zero-coupon volatilities do not depend on the reversion level r~, so it is
/// not carried here.
struct HullWhiteParams {
    double alpha = 0.10;
    double sigma = 0.01;

    void validate() const;
};

/// sigma_P(t,T) = sigma (1 - e^{-alpha(T-t)}) / alpha.
double zc_vol(const HullWhiteParams& p, double t, double T);

/// sigma_P(t,T,U) = (sigma/alpha)(e^{-alpha(T-t)} - e^{-alpha(U-t)}) = sigma_P(t,U) - sigma_P(t,T).
double forward_zc_vol(const HullWhiteParams& p, double t, double T, double U);

/// xi(t,T,U) = sigma_P(t,T)^2 - sigma_P(t,T) sigma_P(t,U).
double forward_zc_drift(const HullWhiteParams& p, double t, double T, double U);

/// One log-Euler step of dP/P = xi dt + sigma_P dW with coefficients frozen at t.
double step_forward_zc(const HullWhiteParams& p, double P, double t, double dt, double T, double U, double z);

}  // namespace cmt
