#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cmt/blackvol.hpp"
#include "cmt/bondmath.hpp"
#include "cmt/hazard_evolution.hpp"
#include "cmt/hullwhite.hpp"

namespace cmt {

class DiscountCurve;
class HazardCurve;

enum class PayoffKind { TerminalYield, TerminalCMT, Caplet, Floorlet, Cap, Floor };

/// Caplets fix the CMT at their expiry and pay accrual * max(CMT - K, 0) one
/// accrual period later (accrual = 1/pay_frequency). Cap/Floor strips start at
/// the simulation expiry and run until `cap_maturity` (last payment date).
/// An empty strike on Caplet/Floorlet means at-the-money-forward: K = E[CMT]
/// estimated on the same paths.
struct PayoffSpec {
    PayoffKind kind = PayoffKind::TerminalYield;
    std::optional<double> strike;
    int pay_frequency = 4;
    double cap_maturity = 0.0;

    double accrual() const { return 1.0 / pay_frequency; }
    bool is_option() const { return kind != PayoffKind::TerminalYield && kind != PayoffKind::TerminalCMT; }
};

/// What a path does once log-stepping drives the yield into the y = 0
/// singularity of sigma_y (|y| < kAbsorbYield). Absorb freezes the path at
/// y = 0 and excludes it from the yield-volatility statistics; Fail raises
/// DegenerateYield tagged with the path index.
enum class ZeroYieldPolicy { Absorb, Fail };

inline constexpr double kAbsorbYield = 1e-12;

struct SimulationConfig {
    double expiry = 1.0;
    BondSpec spec;
    HullWhiteParams hw;
    std::size_t n_paths = 1024;
    std::uint64_t seed = 20120328;
    double step = 1.0 / 365.0;
    double quad_step = 1.0 / 12.0;
    HazardInit init_mode = HazardInit::Stabilized;
    PayoffSpec payoff;
    ZeroYieldPolicy zero_yield = ZeroYieldPolicy::Absorb;
    unsigned workers = 0;  // 0: one per hardware thread

    void validate() const;
};

/// Terminal state of one simulated path.
struct PathRecord {
    double terminal_yield = 0.0;
    double cmt = 0.0;
    double bond_value = 0.0;  // f(y_T)
    double yield_vol = 0.0;   // |sigma_y| at expiry, 0 when absorbed
    double payoff = 0.0;
    int clamp_events = 0;
    bool absorbed = false;
};

struct DistributionStats {
    std::size_t count = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double std_dev = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;

    double std_error() const;
};

/// Population moments (divisor n). Skewness and kurtosis are 0 for a constant sample.
DistributionStats distribution_stats(std::span<const double> samples);

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
};

struct PricingResult {
    double mean = 0.0;  // payoff mean
    double std_error = 0.0;
    std::size_t n_paths = 0;
    DistributionStats stats;  // payoff distribution

    double initial_yield = 0.0;
    double initial_hazard = 0.0;
    double initial_bond_value = 0.0;  // f(y0)
    Estimate terminal_yield;
    Estimate cmt;
    Estimate bond_value;
    DistributionStats yield_stats;
    DistributionStats yield_vol_stats;  // paths that were not absorbed
    std::optional<double> strike;
    std::size_t clamp_events = 0;
    std::size_t absorbed_paths = 0;  // first fixing
    std::vector<PathRecord> paths;  // first (or only) fixing

    double convexity_adjustment() const { return terminal_yield.mean - initial_yield; }
};

/// sigma_B = (S P sigma_P at T+theta + c sum S P sigma_P at T_i + R int S P sigma_P lambda du) / f,
/// with S = e^{-(u-T) lambda}. `sp` holds S*P per snapshot node.
double bond_vol(const FwdZcSnapshot& snap, std::span<const double> sp, double lambda, const BondSpec& spec,
                double y_proxy, double f_value);
double bond_vol(const FwdZcSnapshot& snap, double lambda, const BondSpec& spec, double y_proxy, double f_value);

/// sigma_y = f / (y f') sigma_B. Negative when f' < 0; the sign multiplies dW.
double yield_vol(double y, double f_value, double f_prime, double bond_vol);

/// Log-Euler step of dy/y = -1/2 (y f''/f') sigma_y^2 dt + sigma_y dW.
double step_yield(double y, double yield_vol, double f_prime, double f_second, double dt, double z);

/// Precomputed grid and Hull-White coefficients for one expiry; simulates
/// individual paths deterministically from (seed, path index).
class PathSimulator {
public:
    PathSimulator(const SimulationConfig& cfg, const DiscountCurve& dc, const HazardCurve& hz, double expiry,
                  std::uint64_t seed);

    PathRecord simulate(std::uint64_t path_index) const;

    double expiry() const { return expiry_; }
    double initial_yield() const { return y0_; }
    double initial_hazard() const { return lambda0_; }
    std::size_t steps() const { return times_.size() - 1; }

private:
    BondSpec spec_;
    HazardInit init_mode_;
    ZeroYieldPolicy zero_yield_;
    double expiry_;
    std::uint64_t seed_;
    double y0_;
    double lambda0_;
    std::vector<double> times_;
    FwdZcSnapshot initial_;
    std::vector<double> drift_table_;  // (steps+1) x nodes
    std::vector<double> vol_table_;
};

/// Convenience wrapper: one path of `cfg` at its own expiry.
PathRecord simulate_path(const SimulationConfig& cfg, const DiscountCurve& dc, const HazardCurve& hz,
                         std::uint64_t path_index);

/// All paths of one expiry, in path-index order, independent of worker count.
std::vector<PathRecord> simulate_paths(const PathSimulator& sim, std::size_t n_paths, unsigned workers);

PricingResult price(const SimulationConfig& cfg, const DiscountCurve& dc, const HazardCurve& hz);

/// Monte Carlo caplet/floorlet price at one (expiry, strike), with the inputs
/// Black inversion needs. Calls for K >= F, puts for K < F.
struct CapletQuote {
    OptionQuote option;
    double std_error = 0.0;
};

/// One simulation per expiry, shared by every strike at that expiry. With
/// `relative_strikes` each strike is a multiple of that expiry's forward.
std::vector<CapletQuote> price_caplet_grid(const SimulationConfig& cfg, const DiscountCurve& dc,
                                           const HazardCurve& hz, std::span<const double> expiries,
                                           std::span<const double> strikes, bool relative_strikes = false);

}  // namespace cmt
