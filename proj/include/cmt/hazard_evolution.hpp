#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cmt/bondmath.hpp"

namespace cmt {

class DiscountCurve;
struct HullWhiteParams;

/// How the two-level hazard recursion is started.
/// PaperExact: lambda(t_{-1}) = 0. Stabilized: lambda(t_{-1}) = lambda(t_0).
enum class HazardInit { Stabilized, PaperExact };

struct HazardState {
    double lambda_prev = 0.0;  // lambda(t_{j-1}, T)
    double lambda_curr = 0.0;  // lambda(t_j, T)
    HazardInit init_mode = HazardInit::Stabilized;

    static HazardState initial(double lambda0, HazardInit mode);
};

/// Forward zero-coupon bonds P_{t,T,u} on the union of the coupon grid
/// {T + i/kappa} and the quadrature grid {T + k h} over [T, T+theta], together
/// with the Hull-White coefficients xi(t,T,u) and sigma_P(t,T,u) at the snapshot
/// time. Prices are stored as logarithms.
struct FwdZcSnapshot {
    double expiry = 0.0;
    std::vector<double> offsets;  // u - T, ascending, offsets.front() == 0
    std::vector<double> log_p;
    std::vector<double> drift;
    std::vector<double> vol;
    std::vector<std::size_t> coupon_nodes;
    std::vector<std::size_t> quad_nodes;
    std::size_t maturity_node = 0;

    /// Grid for `spec` at `expiry` with all P = 1 and zero coefficients.
    static FwdZcSnapshot make(const BondSpec& spec, double expiry, double quad_step);

    std::size_t size() const { return offsets.size(); }
    double price(std::size_t i) const;

    /// P_{0,T,u} = DF(0,u)/DF(0,T).
    void set_initial(const DiscountCurve& dc);
    void set_coefficients(const HullWhiteParams& hw, double t);
    /// Log-Euler step of every node with the same normal draw.
    void advance(double dt, double z);
};

/// e^{-(u-T) lambda} P_{t,T,u} at every node.
void survival_weighted(const FwdZcSnapshot& snap, double lambda, std::vector<double>& out);

/// Composite trapezoid over the snapshot's quadrature nodes of values given per node.
template <class NodeFn>
double quad_integral(const FwdZcSnapshot& snap, NodeFn&& value_at) {
    double sum = 0.0;
    for (std::size_t k = 1; k < snap.quad_nodes.size(); ++k) {
        const std::size_t a = snap.quad_nodes[k - 1], b = snap.quad_nodes[k];
        sum += 0.5 * (snap.offsets[b] - snap.offsets[a]) * (value_at(a) + value_at(b));
    }
    return sum;
}

/// Phi = lambda_{j-1} * weight + rest, Psi = weight + recovery group, where
/// `weight` is the principal-plus-coupon part shared by Phi and Psi.
struct HazardTerms {
    double weight = 0.0;
    double rest = 0.0;
    double psi = 0.0;
    double lambda_prev = 0.0;

    double phi() const { return lambda_prev * weight + rest; }
};

HazardTerms hazard_terms(const HazardState& state, const FwdZcSnapshot& snap, std::span<const double> sp,
                         const BondSpec& spec, double y_proxy, double dt);
HazardTerms hazard_terms(const HazardState& state, const FwdZcSnapshot& snap, const BondSpec& spec, double y_proxy,
                         double dt);

double phi(const HazardState& state, const FwdZcSnapshot& snap, const BondSpec& spec, double y_proxy, double dt);
double psi(const HazardState& state, const FwdZcSnapshot& snap, const BondSpec& spec, double y_proxy);

inline constexpr double kHazardCap = 10.0;

struct HazardStep {
    HazardState next;
    bool clamped = false;
};

/// lambda(t_{j+1}) = clamp(Phi/Psi, 0, 10); the state shifts one level.
HazardStep step_hazard(const HazardTerms& terms, const HazardState& state);
HazardStep step_hazard(const HazardState& state, const FwdZcSnapshot& snap, const BondSpec& spec, double y_proxy,
                       double dt);

/// e^{-(U-T) lambda}.
double survival_from_lambda(double lambda, double T, double U);

}  // namespace cmt
