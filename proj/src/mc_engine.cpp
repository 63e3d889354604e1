#include "cmt/mc_engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <string>
#include <thread>

#include "cmt/curves.hpp"
#include "cmt/error.hpp"
#include "rng.hpp"

namespace cmt {

void SimulationConfig::validate() const {
    spec.validate();
    hw.validate();
    CMT_REQUIRE(std::isfinite(expiry) && expiry > 0.0, ErrorCode::InvalidArgument, "expiry must be positive");
    CMT_REQUIRE(n_paths >= 1, ErrorCode::InvalidArgument, "need at least one path");
    CMT_REQUIRE(step > 0.0 && step <= expiry, ErrorCode::InvalidArgument, "time step must be in (0, expiry]");
    CMT_REQUIRE(quad_step > 0.0, ErrorCode::InvalidArgument, "quadrature step must be positive");
    CMT_REQUIRE(payoff.pay_frequency >= 1, ErrorCode::InvalidArgument, "pay frequency must be >= 1");
    if (payoff.strike)
        CMT_REQUIRE(std::isfinite(*payoff.strike) && *payoff.strike >= 0.0, ErrorCode::InvalidArgument,
                    "strike must be non-negative");
    if (payoff.kind == PayoffKind::Cap || payoff.kind == PayoffKind::Floor) {
        CMT_REQUIRE(payoff.strike.has_value(), ErrorCode::InvalidArgument, "caps and floors need an explicit strike");
        CMT_REQUIRE(payoff.cap_maturity >= expiry + payoff.accrual() - 1e-9, ErrorCode::InvalidArgument,
                    "cap maturity must cover at least one accrual period after expiry");
    }
}

// ---------------------------------------------------------------------------

namespace {

DistributionStats moments(std::span<const double> x) {
    DistributionStats s;
    s.count = x.size();
    if (x.empty()) return s;
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    s.min = *mn;
    s.max = *mx;
    double sum = 0.0;
    for (double v : x) sum += v;
    const double n = static_cast<double>(x.size());
    s.mean = sum / n;
    if (s.min == s.max) {
        s.mean = s.min;
        return s;
    }
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - s.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    s.std_dev = std::sqrt(m2);
    s.skewness = m3 / std::pow(m2, 1.5);
    s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    return s;
}

Estimate estimate(std::span<const double> x) {
    const DistributionStats s = moments(x);
    return {s.mean, s.std_error()};
}

unsigned resolve_workers(unsigned requested, std::size_t n_paths) {
    unsigned w = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(w, n_paths));
}

std::uint64_t fixing_seed(std::uint64_t seed, std::size_t fixing) {
    return fixing == 0 ? seed : detail::splitmix64(seed ^ (0xa0761d6478bd642fULL * fixing));
}

}  // namespace

double DistributionStats::std_error() const {
    return count == 0 ? 0.0 : std_dev / std::sqrt(static_cast<double>(count));
}

DistributionStats distribution_stats(std::span<const double> samples) {
    CMT_REQUIRE(samples.size() >= 2, ErrorCode::InsufficientSamples, "distribution statistics need n >= 2");
    return moments(samples);
}

// ---------------------------------------------------------------------------

double bond_vol(const FwdZcSnapshot& snap, std::span<const double> sp, double lambda, const BondSpec& spec,
                double y_proxy, double f_value) {
    CMT_REQUIRE(f_value > 0.0, ErrorCode::DegenerateBond, "bond value must be positive");
    const double c = period_coupon(spec, y_proxy);
    const std::size_t m = snap.maturity_node;
    double coupons = 0.0;
    for (std::size_t i : snap.coupon_nodes) coupons += sp[i] * snap.vol[i];
    double total = sp[m] * snap.vol[m] + c * coupons;
    if (spec.recovery != 0.0)
        total += spec.recovery * lambda * quad_integral(snap, [&](std::size_t i) { return sp[i] * snap.vol[i]; });
    return total / f_value;
}

double bond_vol(const FwdZcSnapshot& snap, double lambda, const BondSpec& spec, double y_proxy, double f_value) {
    std::vector<double> sp;
    survival_weighted(snap, lambda, sp);
    return bond_vol(snap, sp, lambda, spec, y_proxy, f_value);
}

double yield_vol(double y, double f_value, double f_prime, double bond_vol) {
    CMT_REQUIRE(std::abs(y) >= 1e-12 && std::abs(f_prime) >= 1e-300, ErrorCode::DegenerateYield,
                "yield volatility undefined at y = " + std::to_string(y));
    return f_value / (y * f_prime) * bond_vol;
}

double step_yield(double y, double yield_vol, double f_prime, double f_second, double dt, double z) {
    CMT_REQUIRE(y > -1.0 + kYieldFloorEps, ErrorCode::DomainError, "yield fell below -1 + 1e-8");
    CMT_REQUIRE(dt > 0.0, ErrorCode::InvalidArgument, "time step must be positive");
    if (yield_vol == 0.0) return y;
    const double var = yield_vol * yield_vol;
    const double mu = -0.5 * (y * f_second / f_prime) * var;
    return y * std::exp((mu - 0.5 * var) * dt + yield_vol * std::sqrt(dt) * z);
}

// ---------------------------------------------------------------------------

PathSimulator::PathSimulator(const SimulationConfig& cfg, const DiscountCurve& dc, const HazardCurve& hz,
                             double expiry, std::uint64_t seed)
    : spec_(cfg.spec), init_mode_(cfg.init_mode), zero_yield_(cfg.zero_yield), expiry_(expiry), seed_(seed) {
    cfg.validate();
    CMT_REQUIRE(expiry >= cfg.step, ErrorCode::InvalidArgument, "expiry shorter than one time step");
    y0_ = initial_forward_yield(dc, hz, spec_, expiry, cfg.quad_step);
    lambda0_ = initial_forward_hazard(hz, expiry, spec_.theta);

    const auto n = static_cast<std::size_t>(std::ceil(expiry / cfg.step - 1e-9));
    times_.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) times_[k] = k == n ? expiry : static_cast<double>(k) * cfg.step;

    initial_ = FwdZcSnapshot::make(spec_, expiry, cfg.quad_step);
    initial_.set_initial(dc);
    const std::size_t nodes = initial_.size();
    drift_table_.resize((n + 1) * nodes);
    vol_table_.resize((n + 1) * nodes);
    FwdZcSnapshot scratch = initial_;
    for (std::size_t k = 0; k <= n; ++k) {
        scratch.set_coefficients(cfg.hw, times_[k]);
        std::copy(scratch.drift.begin(), scratch.drift.end(), drift_table_.begin() + k * nodes);
        std::copy(scratch.vol.begin(), scratch.vol.end(), vol_table_.begin() + k * nodes);
    }
}

PathRecord PathSimulator::simulate(std::uint64_t path_index) const {
    detail::CounterRng rng(seed_, path_index);
    std::normal_distribution<double> normal;
    FwdZcSnapshot snap = initial_;
    const std::size_t nodes = snap.size();
    auto load_row = [&](std::size_t k) {
        std::copy_n(drift_table_.begin() + k * nodes, nodes, snap.drift.begin());
        std::copy_n(vol_table_.begin() + k * nodes, nodes, snap.vol.begin());
    };

    PathRecord rec;
    HazardState hazard = HazardState::initial(lambda0_, init_mode_);
    double y = y0_;
    std::vector<double> sp;
    const std::size_t n = steps();
    for (std::size_t j = 1; j <= n; ++j) {
        load_row(j - 1);
        survival_weighted(snap, hazard.lambda_curr, sp);
        const YieldFunction::Value v = YieldFunction::for_spec(spec_, y).evaluate(y);
        const double sigma_b = bond_vol(snap, sp, hazard.lambda_curr, spec_, y, v.f);
        const double sigma_y = yield_vol(y, v.f, v.df, sigma_b);

        const double dt = times_[j] - times_[j - 1];
        const double dt_hazard = j == 1 ? dt : times_[j - 1] - times_[j - 2];
        const HazardStep hs = step_hazard(hazard_terms(hazard, snap, sp, spec_, y, dt_hazard), hazard);
        hazard = hs.next;
        rec.clamp_events += hs.clamped ? 1 : 0;

        const double z = normal(rng);
        y = step_yield(y, sigma_y, v.df, v.d2f, dt, z);
        snap.advance(dt, z);
        if (std::abs(y) < kAbsorbYield && zero_yield_ == ZeroYieldPolicy::Absorb) {
            rec.absorbed = true;
            rec.terminal_yield = 0.0;
            rec.cmt = 0.0;
            rec.bond_value = YieldFunction::for_spec(spec_, 0.0)(0.0);
            return rec;
        }
    }

    load_row(n);
    survival_weighted(snap, hazard.lambda_curr, sp);
    const YieldFunction::Value v = YieldFunction::for_spec(spec_, y).evaluate(y);
    rec.terminal_yield = y;
    rec.cmt = cmt_from_yield(spec_.kappa, y);
    rec.bond_value = v.f;
    rec.yield_vol = std::abs(yield_vol(y, v.f, v.df, bond_vol(snap, sp, hazard.lambda_curr, spec_, y, v.f)));
    return rec;
}

PathRecord simulate_path(const SimulationConfig& cfg, const DiscountCurve& dc, const HazardCurve& hz,
                         std::uint64_t path_index) {
    return PathSimulator(cfg, dc, hz, cfg.expiry, cfg.seed).simulate(path_index);
}

std::vector<PathRecord> simulate_paths(const PathSimulator& sim, std::size_t n_paths, unsigned workers) {
    std::vector<PathRecord> out(n_paths);
    const unsigned w = resolve_workers(workers, n_paths);
    std::vector<std::size_t> fail_index(w, n_paths);
    std::vector<std::exception_ptr> errors(w);

    auto run = [&](unsigned worker) {
        for (std::size_t p = worker; p < n_paths; p += w) {
            try {
                out[p] = sim.simulate(p);
            } catch (...) {
                fail_index[worker] = p;
                errors[worker] = std::current_exception();
                return;
            }
        }
    };
    if (w == 1) {
        run(0);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(w);
        for (unsigned k = 0; k < w; ++k) threads.emplace_back(run, k);
        for (auto& t : threads) t.join();
    }

    // Report the lowest failing path so the error is scheduling-independent.
    const auto first = std::min_element(fail_index.begin(), fail_index.end());
    if (*first < n_paths) {
        const std::size_t p = *first;
        try {
            std::rethrow_exception(errors[static_cast<std::size_t>(first - fail_index.begin())]);
        } catch (const Error& e) {
            throw Error(e.code(), "path " + std::to_string(p) + ": " + e.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

double option_payoff(PayoffKind kind, double cmt, double strike) {
    const bool call = kind == PayoffKind::Caplet || kind == PayoffKind::Cap;
    return call ? std::max(cmt - strike, 0.0) : std::max(strike - cmt, 0.0);
}

std::vector<double> fixing_times(const SimulationConfig& cfg) {
    if (cfg.payoff.kind != PayoffKind::Cap && cfg.payoff.kind != PayoffKind::Floor) return {cfg.expiry};
    std::vector<double> out;
    const double acc = cfg.payoff.accrual();
    for (int k = 0;; ++k) {
        const double t = cfg.expiry + k * acc;
        if (t + acc > cfg.payoff.cap_maturity + 1e-9) break;
        out.push_back(t);
    }
    return out;
}

}  // namespace

PricingResult price(const SimulationConfig& cfg, const DiscountCurve& dc, const HazardCurve& hz) {
    cfg.validate();
    const std::vector<double> fixings = fixing_times(cfg);
    const std::size_t n = cfg.n_paths;
    PricingResult result;
    result.n_paths = n;
    std::vector<double> total(n, 0.0);

    for (std::size_t k = 0; k < fixings.size(); ++k) {
        const PathSimulator sim(cfg, dc, hz, fixings[k], fixing_seed(cfg.seed, k));
        std::vector<PathRecord> paths = simulate_paths(sim, n, cfg.workers);

        std::vector<double> cmts(n);
        for (std::size_t p = 0; p < n; ++p) cmts[p] = paths[p].cmt;

        double strike = 0.0;
        double weight = 1.0;
        if (cfg.payoff.is_option()) {
            strike = cfg.payoff.strike ? *cfg.payoff.strike : estimate(cmts).mean;
            result.strike = strike;
            weight = dc.discount_factor(fixings[k] + cfg.payoff.accrual()) * cfg.payoff.accrual();
        }
        for (std::size_t p = 0; p < n; ++p) {
            PathRecord& r = paths[p];
            switch (cfg.payoff.kind) {
                case PayoffKind::TerminalYield: r.payoff = r.terminal_yield; break;
                case PayoffKind::TerminalCMT: r.payoff = r.cmt; break;
                default: r.payoff = weight * option_payoff(cfg.payoff.kind, r.cmt, strike); break;
            }
            total[p] += r.payoff;
            result.clamp_events += static_cast<std::size_t>(r.clamp_events);
        }

        if (k == 0) {
            std::vector<double> ys(n), fs(n), vols;
            vols.reserve(n);
            for (std::size_t p = 0; p < n; ++p) {
                ys[p] = paths[p].terminal_yield;
                fs[p] = paths[p].bond_value;
                if (paths[p].absorbed)
                    ++result.absorbed_paths;
                else
                    vols.push_back(paths[p].yield_vol);
            }
            result.initial_yield = sim.initial_yield();
            result.initial_hazard = sim.initial_hazard();
            result.initial_bond_value = YieldFunction::for_spec(cfg.spec, sim.initial_yield())(sim.initial_yield());
            result.terminal_yield = estimate(ys);
            result.cmt = estimate(cmts);
            result.bond_value = estimate(fs);
            result.yield_stats = moments(ys);
            result.yield_vol_stats = moments(vols);
            result.paths = std::move(paths);
        }
    }

    result.stats = moments(total);
    result.mean = result.stats.mean;
    result.std_error = result.stats.std_error();
    return result;
}

std::vector<CapletQuote> price_caplet_grid(const SimulationConfig& cfg, const DiscountCurve& dc,
                                           const HazardCurve& hz, std::span<const double> expiries,
                                           std::span<const double> strikes, bool relative_strikes) {
    cfg.validate();
    CMT_REQUIRE(!expiries.empty() && !strikes.empty(), ErrorCode::InvalidArgument, "empty expiry or strike grid");
    std::vector<CapletQuote> out;
    const double acc = cfg.payoff.accrual();
    for (double expiry : expiries) {
        CMT_REQUIRE(expiry >= cfg.step, ErrorCode::InvalidArgument, "surface expiry shorter than one time step");
        const PathSimulator sim(cfg, dc, hz, expiry, cfg.seed);
        const std::vector<PathRecord> paths = simulate_paths(sim, cfg.n_paths, cfg.workers);
        std::vector<double> cmts(paths.size());
        for (std::size_t p = 0; p < paths.size(); ++p) cmts[p] = paths[p].cmt;
        const double forward = estimate(cmts).mean;
        const double df = dc.discount_factor(expiry + acc);

        std::vector<double> pay(paths.size());
        for (double k : strikes) {
            const double strike = relative_strikes ? k * forward : k;
            CMT_REQUIRE(strike >= 0.0, ErrorCode::InvalidArgument, "strike must be non-negative");
            const bool call = strike >= forward;
            const PayoffKind kind = call ? PayoffKind::Caplet : PayoffKind::Floorlet;
            for (std::size_t p = 0; p < paths.size(); ++p) pay[p] = df * acc * option_payoff(kind, cmts[p], strike);
            const Estimate e = estimate(pay);
            out.push_back({{expiry, strike, e.mean, forward, df, acc, call}, e.std_error});
        }
    }
    return out;
}

}  // namespace cmt
