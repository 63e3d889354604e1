#include "cmt/hazard_evolution.hpp"

#include <algorithm>
#include <cmath>

#include "cmt/curves.hpp"
#include "cmt/error.hpp"
#include "cmt/hullwhite.hpp"

namespace cmt {

HazardState HazardState::initial(double lambda0, HazardInit mode) {
    CMT_REQUIRE(lambda0 >= 0.0 && std::isfinite(lambda0), ErrorCode::InvalidArgument,
                "initial hazard rate must be non-negative");
    const double prev = mode == HazardInit::PaperExact ? 0.0 : lambda0;
    return {prev, lambda0, mode};
}

FwdZcSnapshot FwdZcSnapshot::make(const BondSpec& spec, double expiry, double quad_step) {
    spec.validate();
    CMT_REQUIRE(quad_step > 0.0, ErrorCode::InvalidArgument, "quadrature step must be positive");
    constexpr double kMerge = 1e-10;
    const double theta = spec.theta;

    std::vector<double> quad;
    for (long k = 0;; ++k) {
        const double off = k * quad_step;
        if (off >= theta - kMerge) break;
        quad.push_back(off);
    }
    quad.push_back(theta);
    std::vector<double> coupons;
    for (int i = 1; i <= spec.coupon_count(); ++i) coupons.push_back(static_cast<double>(i) / spec.kappa);

    std::vector<double> all = quad;
    all.insert(all.end(), coupons.begin(), coupons.end());
    std::sort(all.begin(), all.end());
    // Where a quadrature node and a coupon date coincide the exact coupon offset
    // wins, so coupon nodes do not depend on the quadrature step.
    std::vector<double> offsets;
    for (double x : all) {
        if (offsets.empty() || x - offsets.back() > kMerge)
            offsets.push_back(x);
        else if (std::binary_search(coupons.begin(), coupons.end(), x))
            offsets.back() = x;
    }

    auto index_of = [&](double x) {
        auto it = std::lower_bound(offsets.begin(), offsets.end(), x - kMerge);
        return static_cast<std::size_t>(it - offsets.begin());
    };

    FwdZcSnapshot snap;
    snap.expiry = expiry;
    for (double x : quad) snap.quad_nodes.push_back(index_of(x));
    for (double x : coupons) snap.coupon_nodes.push_back(index_of(x));
    snap.offsets = std::move(offsets);
    const std::size_t n = snap.offsets.size();
    snap.log_p.assign(n, 0.0);
    snap.drift.assign(n, 0.0);
    snap.vol.assign(n, 0.0);
    snap.maturity_node = n - 1;
    return snap;
}

double FwdZcSnapshot::price(std::size_t i) const { return std::exp(log_p[i]); }

void FwdZcSnapshot::set_initial(const DiscountCurve& dc) {
    for (std::size_t i = 0; i < size(); ++i) log_p[i] = std::log(dc.forward_df(expiry, expiry + offsets[i]));
}

void FwdZcSnapshot::set_coefficients(const HullWhiteParams& hw, double t) {
    for (std::size_t i = 0; i < size(); ++i) {
        const double u = expiry + offsets[i];
        drift[i] = forward_zc_drift(hw, t, expiry, u);
        vol[i] = forward_zc_vol(hw, t, expiry, u);
    }
}

void FwdZcSnapshot::advance(double dt, double z) {
    const double sq = std::sqrt(dt);
    for (std::size_t i = 0; i < size(); ++i) log_p[i] += (drift[i] - 0.5 * vol[i] * vol[i]) * dt + vol[i] * sq * z;
}

void survival_weighted(const FwdZcSnapshot& snap, double lambda, std::vector<double>& out) {
    out.resize(snap.size());
    for (std::size_t i = 0; i < snap.size(); ++i) out[i] = std::exp(snap.log_p[i] - snap.offsets[i] * lambda);
}

HazardTerms hazard_terms(const HazardState& state, const FwdZcSnapshot& snap, std::span<const double> sp,
                         const BondSpec& spec, double y_proxy, double dt) {
    const double c = period_coupon(spec, y_proxy);
    const double lp = state.lambda_prev;
    const double lc = state.lambda_curr;
    const std::size_t m = snap.maturity_node;

    HazardTerms terms;
    terms.lambda_prev = lp;

    double coupon_weight = 0.0, coupon_drift = 0.0;
    for (std::size_t i : snap.coupon_nodes) {
        coupon_weight += 0.5 * snap.offsets[i] * sp[i];
        coupon_drift += snap.drift[i] * sp[i];
    }
    terms.weight = 0.5 * spec.theta * sp[m] + c * coupon_weight;
    terms.rest = dt * (snap.drift[m] * sp[m] + c * coupon_drift);
    terms.psi = terms.weight;

    if (spec.recovery != 0.0) {
        const double phi_rec = quad_integral(snap, [&](std::size_t i) {
            return (lc * (0.5 * snap.offsets[i] * lp + dt * snap.drift[i]) - 0.5 * lp) * sp[i];
        });
        const double psi_rec = quad_integral(snap, [&](std::size_t i) { return (1.0 + snap.offsets[i] * lc) * sp[i]; });
        terms.rest += spec.recovery * phi_rec;
        terms.psi += 0.5 * spec.recovery * psi_rec;
    }
    return terms;
}

HazardTerms hazard_terms(const HazardState& state, const FwdZcSnapshot& snap, const BondSpec& spec, double y_proxy,
                         double dt) {
    std::vector<double> sp;
    survival_weighted(snap, state.lambda_curr, sp);
    return hazard_terms(state, snap, sp, spec, y_proxy, dt);
}

double phi(const HazardState& state, const FwdZcSnapshot& snap, const BondSpec& spec, double y_proxy, double dt) {
    return hazard_terms(state, snap, spec, y_proxy, dt).phi();
}

double psi(const HazardState& state, const FwdZcSnapshot& snap, const BondSpec& spec, double y_proxy) {
    return hazard_terms(state, snap, spec, y_proxy, 0.0).psi;
}

HazardStep step_hazard(const HazardTerms& terms, const HazardState& state) {
    CMT_REQUIRE(std::abs(terms.psi) >= 1e-300, ErrorCode::DegenerateDenominator, "hazard recursion denominator vanished");
    // Written as lambda_prev*(weight/psi) + rest/psi so that a zero recovery
    // group gives weight/psi == 1 exactly.
    const double ratio = terms.lambda_prev * (terms.weight / terms.psi) + terms.rest / terms.psi;
    HazardStep step;
    double next = ratio;
    if (!(ratio >= 0.0)) {
        next = 0.0;
        step.clamped = true;
    } else if (ratio > kHazardCap) {
        next = kHazardCap;
        step.clamped = true;
    }
    step.next = {state.lambda_curr, next, state.init_mode};
    return step;
}

HazardStep step_hazard(const HazardState& state, const FwdZcSnapshot& snap, const BondSpec& spec, double y_proxy,
                       double dt) {
    CMT_REQUIRE(dt > 0.0, ErrorCode::InvalidArgument, "time step must be positive");
    return step_hazard(hazard_terms(state, snap, spec, y_proxy, dt), state);
}

double survival_from_lambda(double lambda, double T, double U) {
    CMT_REQUIRE(U >= T, ErrorCode::InvalidInterval, "survival requires U >= T");
    return std::exp(-(U - T) * lambda);
}

}  // namespace cmt
