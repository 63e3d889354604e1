#include "cmt/cmt.h"

#include <algorithm>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "cmt/blackvol.hpp"
#include "cmt/csv_io.hpp"
#include "cmt/curves.hpp"
#include "cmt/error.hpp"
#include "cmt/mc_engine.hpp"

struct cmt_discount_curve {
    cmt::DiscountCurve curve;
};

struct cmt_hazard_curve {
    cmt::HazardCurve curve;
};

struct cmt_quote_set {
    std::vector<cmt::BondQuote> quotes;
};

struct cmt_result {
    cmt::PricingResult result;
};

namespace {

thread_local std::string g_last_error;

cmt_status fail(cmt_status status, const char* message) {
    g_last_error = message;
    return status;
}

template <class Fn>
cmt_status guarded(Fn&& fn) {
    try {
        fn();
        return CMT_OK;
    } catch (const cmt::Error& e) {
        return fail(static_cast<cmt_status>(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(CMT_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(CMT_E_INTERNAL, e.what());
    } catch (...) {
        return fail(CMT_E_INTERNAL, "unknown exception");
    }
}

void require_ptr(const void* p, const char* name) {
    CMT_REQUIRE(p != nullptr, cmt::ErrorCode::InvalidArgument, std::string(name) + " is null");
}

std::vector<cmt::CurvePillar> make_pillars(const double* t, const double* v, size_t n) {
    CMT_REQUIRE(n == 0 || (t != nullptr && v != nullptr), cmt::ErrorCode::InvalidArgument, "pillar arrays are null");
    std::vector<cmt::CurvePillar> out(n);
    for (size_t i = 0; i < n; ++i) out[i] = {t[i], v[i]};
    return out;
}

cmt::SimulationConfig to_config(const cmt_sim_config* c) {
    require_ptr(c, "config");
    cmt::SimulationConfig cfg;
    cfg.expiry = c->expiry;
    cfg.spec.theta = c->theta;
    cfg.spec.kappa = c->kappa;
    cfg.spec.recovery = c->recovery;
    CMT_REQUIRE(c->coupon_mode == CMT_COUPON_FIXED || c->coupon_mode == CMT_COUPON_CMT_PAR,
                cmt::ErrorCode::InvalidArgument, "unknown coupon mode");
    cfg.spec.coupon_mode = c->coupon_mode == CMT_COUPON_FIXED ? cmt::CouponMode::FixedCoupon : cmt::CouponMode::CmtPar;
    cfg.spec.fixed_coupon = c->fixed_coupon;
    cfg.hw.alpha = c->alpha;
    cfg.hw.sigma = c->sigma;
    cfg.n_paths = static_cast<std::size_t>(c->n_paths);
    cfg.seed = c->seed;
    cfg.step = c->step;
    cfg.quad_step = c->quad_step;
    CMT_REQUIRE(c->hazard_init == CMT_HAZARD_STABILIZED || c->hazard_init == CMT_HAZARD_PAPER_EXACT,
                cmt::ErrorCode::InvalidArgument, "unknown hazard init mode");
    cfg.init_mode = c->hazard_init == CMT_HAZARD_STABILIZED ? cmt::HazardInit::Stabilized : cmt::HazardInit::PaperExact;
    CMT_REQUIRE(c->payoff >= CMT_PAYOFF_TERMINAL_YIELD && c->payoff <= CMT_PAYOFF_FLOOR,
                cmt::ErrorCode::InvalidArgument, "unknown payoff kind");
    cfg.payoff.kind = static_cast<cmt::PayoffKind>(c->payoff);
    if (c->has_strike) cfg.payoff.strike = c->strike;
    cfg.payoff.pay_frequency = c->pay_frequency;
    cfg.payoff.cap_maturity = c->cap_maturity;
    CMT_REQUIRE(c->zero_yield == CMT_ZERO_YIELD_ABSORB || c->zero_yield == CMT_ZERO_YIELD_FAIL,
                cmt::ErrorCode::InvalidArgument, "unknown zero-yield policy");
    cfg.zero_yield = c->zero_yield == CMT_ZERO_YIELD_ABSORB ? cmt::ZeroYieldPolicy::Absorb : cmt::ZeroYieldPolicy::Fail;
    cfg.workers = c->workers;
    cfg.validate();
    return cfg;
}

cmt_stats to_c(const cmt::DistributionStats& s) {
    return {s.count, s.min, s.max, s.mean, s.std_dev, s.skewness, s.excess_kurtosis};
}

}  // namespace

extern "C" {

const char* cmt_version(void) { return "1.0.0"; }

const char* cmt_status_name(cmt_status status) {
    if (status == CMT_OK) return "Ok";
    if (status == CMT_E_INTERNAL) return "InternalError";
    return cmt::to_string(static_cast<cmt::ErrorCode>(status));
}

int cmt_status_is_validation(cmt_status status) { return status > CMT_OK && status < CMT_E_NEGATIVE_HAZARD; }

const char* cmt_last_error(void) { return g_last_error.c_str(); }

// ---- discount curves

cmt_status cmt_discount_curve_create(const double* t, const double* df, size_t n, int allow_extrapolation,
                                     cmt_discount_curve** out) {
    return guarded([&] {
        require_ptr(out, "out");
        *out = new cmt_discount_curve{cmt::DiscountCurve(make_pillars(t, df, n), allow_extrapolation != 0)};
    });
}

cmt_status cmt_discount_curve_flat(double rate, double horizon, int allow_extrapolation, cmt_discount_curve** out) {
    return guarded([&] {
        require_ptr(out, "out");
        *out = new cmt_discount_curve{cmt::DiscountCurve::flat(rate, horizon, allow_extrapolation != 0)};
    });
}

cmt_status cmt_discount_curve_load_csv(const char* path, int allow_extrapolation, cmt_discount_curve** out) {
    return guarded([&] {
        require_ptr(path, "path");
        require_ptr(out, "out");
        *out = new cmt_discount_curve{cmt::load_discount_csv(path, allow_extrapolation != 0)};
    });
}

void cmt_discount_curve_destroy(cmt_discount_curve* curve) { delete curve; }

cmt_status cmt_discount_curve_df(const cmt_discount_curve* curve, double t, double* out) {
    return guarded([&] {
        require_ptr(curve, "curve");
        require_ptr(out, "out");
        *out = curve->curve.discount_factor(t);
    });
}

// ---- hazard curves

cmt_status cmt_hazard_curve_create(const double* t, const double* lambda, size_t n, int allow_extrapolation,
                                   cmt_hazard_curve** out) {
    return guarded([&] {
        require_ptr(out, "out");
        *out = new cmt_hazard_curve{cmt::HazardCurve(make_pillars(t, lambda, n), allow_extrapolation != 0)};
    });
}

cmt_status cmt_hazard_curve_flat(double lambda, double horizon, int allow_extrapolation, cmt_hazard_curve** out) {
    return guarded([&] {
        require_ptr(out, "out");
        *out = new cmt_hazard_curve{cmt::HazardCurve::flat(lambda, horizon, allow_extrapolation != 0)};
    });
}

cmt_status cmt_hazard_curve_load_csv(const char* path, int allow_extrapolation, cmt_hazard_curve** out) {
    return guarded([&] {
        require_ptr(path, "path");
        require_ptr(out, "out");
        *out = new cmt_hazard_curve{cmt::load_hazard_csv(path, allow_extrapolation != 0)};
    });
}

void cmt_hazard_curve_destroy(cmt_hazard_curve* curve) { delete curve; }

cmt_status cmt_hazard_curve_survival(const cmt_hazard_curve* curve, double t, double* out) {
    return guarded([&] {
        require_ptr(curve, "curve");
        require_ptr(out, "out");
        *out = curve->curve.survival(t);
    });
}

cmt_status cmt_hazard_curve_rate(const cmt_hazard_curve* curve, double t, double* out) {
    return guarded([&] {
        require_ptr(curve, "curve");
        require_ptr(out, "out");
        *out = curve->curve.hazard_rate(t);
    });
}

size_t cmt_hazard_curve_size(const cmt_hazard_curve* curve) { return curve ? curve->curve.pillars().size() : 0; }

cmt_status cmt_hazard_curve_pillars(const cmt_hazard_curve* curve, double* t, double* lambda, size_t capacity) {
    return guarded([&] {
        require_ptr(curve, "curve");
        const auto pillars = curve->curve.pillars();
        const size_t n = std::min(capacity, pillars.size());
        for (size_t i = 0; i < n; ++i) {
            if (t) t[i] = pillars[i].t;
            if (lambda) lambda[i] = pillars[i].value;
        }
    });
}

// ---- quotes and stripping

cmt_status cmt_quote_set_create(const cmt_bond_quote* quotes, size_t n, cmt_quote_set** out) {
    return guarded([&] {
        require_ptr(out, "out");
        CMT_REQUIRE(n == 0 || quotes != nullptr, cmt::ErrorCode::InvalidArgument, "quotes is null");
        auto set = new cmt_quote_set;
        for (size_t i = 0; i < n; ++i) {
            const cmt_bond_quote& q = quotes[i];
            set->quotes.push_back({q.maturity, q.coupon_rate, q.frequency,
                                   q.is_clean ? cmt::PriceType::Clean : cmt::PriceType::Dirty, q.price});
        }
        *out = set;
    });
}

cmt_status cmt_quote_set_load_csv(const char* path, cmt_quote_set** out) {
    return guarded([&] {
        require_ptr(path, "path");
        require_ptr(out, "out");
        *out = new cmt_quote_set{cmt::load_bond_quotes_csv(path)};
    });
}

void cmt_quote_set_destroy(cmt_quote_set* set) { delete set; }

size_t cmt_quote_set_size(const cmt_quote_set* set) { return set ? set->quotes.size() : 0; }

cmt_status cmt_quote_set_get(const cmt_quote_set* set, size_t index, cmt_bond_quote* out) {
    return guarded([&] {
        require_ptr(set, "set");
        require_ptr(out, "out");
        CMT_REQUIRE(index < set->quotes.size(), cmt::ErrorCode::InvalidArgument, "quote index out of range");
        const cmt::BondQuote& q = set->quotes[index];
        *out = {q.maturity, q.coupon_rate, q.frequency, q.price_type == cmt::PriceType::Clean, q.price};
    });
}

cmt_status cmt_strip_hazard(const cmt_quote_set* quotes, const cmt_discount_curve* dc, double recovery,
                            double quad_step, cmt_hazard_curve** out) {
    return guarded([&] {
        require_ptr(quotes, "quotes");
        require_ptr(dc, "discount curve");
        require_ptr(out, "out");
        *out = new cmt_hazard_curve{cmt::strip_hazard(quotes->quotes, dc->curve, recovery, quad_step)};
    });
}

cmt_status cmt_bond_price(const cmt_quote_set* quotes, size_t index, const cmt_discount_curve* dc,
                          const cmt_hazard_curve* hz, double recovery, double quad_step, double* model,
                          double* target) {
    return guarded([&] {
        require_ptr(quotes, "quotes");
        require_ptr(dc, "discount curve");
        require_ptr(hz, "hazard curve");
        CMT_REQUIRE(index < quotes->quotes.size(), cmt::ErrorCode::InvalidArgument, "quote index out of range");
        const cmt::BondQuote& q = quotes->quotes[index];
        const double m = cmt::spot_bond_price(q, dc->curve, hz->curve, recovery, quad_step);
        const double d = cmt::dirty_price(q);
        if (model) *model = m;
        if (target) *target = d;
    });
}

// ---- simulation

void cmt_sim_config_default(cmt_sim_config* cfg) {
    if (!cfg) return;
    const cmt::SimulationConfig d;
    *cfg = {};
    cfg->expiry = d.expiry;
    cfg->theta = d.spec.theta;
    cfg->kappa = d.spec.kappa;
    cfg->recovery = 0.20;
    cfg->coupon_mode = CMT_COUPON_CMT_PAR;
    cfg->fixed_coupon = 0.0;
    cfg->alpha = d.hw.alpha;
    cfg->sigma = d.hw.sigma;
    cfg->n_paths = d.n_paths;
    cfg->seed = d.seed;
    cfg->step = d.step;
    cfg->quad_step = d.quad_step;
    cfg->hazard_init = CMT_HAZARD_STABILIZED;
    cfg->payoff = CMT_PAYOFF_TERMINAL_YIELD;
    cfg->has_strike = 0;
    cfg->strike = 0.0;
    cfg->pay_frequency = d.payoff.pay_frequency;
    cfg->cap_maturity = 0.0;
    cfg->zero_yield = CMT_ZERO_YIELD_ABSORB;
    cfg->workers = 0;
}

cmt_status cmt_initial_forward_yield(const cmt_sim_config* cfg, const cmt_discount_curve* dc,
                                     const cmt_hazard_curve* hz, double* out) {
    return guarded([&] {
        require_ptr(dc, "discount curve");
        require_ptr(hz, "hazard curve");
        require_ptr(out, "out");
        const cmt::SimulationConfig c = to_config(cfg);
        *out = cmt::initial_forward_yield(dc->curve, hz->curve, c.spec, c.expiry, c.quad_step);
    });
}

cmt_status cmt_price(const cmt_sim_config* cfg, const cmt_discount_curve* dc, const cmt_hazard_curve* hz,
                     cmt_result** out) {
    return guarded([&] {
        require_ptr(dc, "discount curve");
        require_ptr(hz, "hazard curve");
        require_ptr(out, "out");
        *out = new cmt_result{cmt::price(to_config(cfg), dc->curve, hz->curve)};
    });
}

void cmt_result_destroy(cmt_result* result) { delete result; }

cmt_status cmt_result_summary(const cmt_result* result, cmt_summary* out) {
    return guarded([&] {
        require_ptr(result, "result");
        require_ptr(out, "out");
        const cmt::PricingResult& r = result->result;
        *out = {};
        out->payoff = {r.mean, r.std_error};
        out->n_paths = r.n_paths;
        out->initial_yield = r.initial_yield;
        out->initial_hazard = r.initial_hazard;
        out->initial_bond_value = r.initial_bond_value;
        out->terminal_yield = {r.terminal_yield.mean, r.terminal_yield.std_error};
        out->cmt = {r.cmt.mean, r.cmt.std_error};
        out->bond_value = {r.bond_value.mean, r.bond_value.std_error};
        out->convexity_adjustment = r.convexity_adjustment();
        out->has_strike = r.strike.has_value();
        out->strike = r.strike.value_or(0.0);
        out->clamp_events = r.clamp_events;
        out->absorbed_paths = r.absorbed_paths;
    });
}

cmt_status cmt_result_stats(const cmt_result* result, cmt_stats_kind kind, cmt_stats* out) {
    return guarded([&] {
        require_ptr(result, "result");
        require_ptr(out, "out");
        const cmt::PricingResult& r = result->result;
        switch (kind) {
            case CMT_STATS_PAYOFF: *out = to_c(r.stats); break;
            case CMT_STATS_TERMINAL_YIELD: *out = to_c(r.yield_stats); break;
            case CMT_STATS_YIELD_VOL: *out = to_c(r.yield_vol_stats); break;
            default: CMT_REQUIRE(false, cmt::ErrorCode::InvalidArgument, "unknown statistics kind");
        }
    });
}

size_t cmt_result_path_count(const cmt_result* result) { return result ? result->result.paths.size() : 0; }

cmt_status cmt_result_paths(const cmt_result* result, cmt_path* out, size_t capacity) {
    return guarded([&] {
        require_ptr(result, "result");
        require_ptr(out, "out");
        const auto& paths = result->result.paths;
        const size_t n = std::min(capacity, paths.size());
        for (size_t i = 0; i < n; ++i) {
            const cmt::PathRecord& p = paths[i];
            out[i] = {p.terminal_yield, p.cmt, p.bond_value, p.yield_vol, p.payoff, p.clamp_events, p.absorbed};
        }
    });
}

cmt_status cmt_distribution_stats(const double* samples, size_t n, cmt_stats* out) {
    return guarded([&] {
        require_ptr(out, "out");
        CMT_REQUIRE(n == 0 || samples != nullptr, cmt::ErrorCode::InvalidArgument, "samples is null");
        *out = to_c(cmt::distribution_stats({samples, n}));
    });
}

// ---- Black-76

cmt_status cmt_black_price(double forward, double strike, double vol, double expiry, double df, double accrual,
                           int is_call, double* out) {
    return guarded([&] {
        require_ptr(out, "out");
        *out = cmt::black_price(forward, strike, vol, expiry, df, accrual, is_call != 0);
    });
}

cmt_status cmt_implied_vol(double price, double forward, double strike, double expiry, double df, double accrual,
                           int is_call, double* out) {
    return guarded([&] {
        require_ptr(out, "out");
        *out = cmt::implied_vol(price, forward, strike, expiry, df, accrual, is_call != 0);
    });
}

cmt_status cmt_caplet_surface(const cmt_sim_config* cfg, const cmt_discount_curve* dc, const cmt_hazard_curve* hz,
                              const double* expiries, size_t n_expiries, const double* strikes, size_t n_strikes,
                              int relative_strikes, cmt_surface_point* out) {
    return guarded([&] {
        require_ptr(dc, "discount curve");
        require_ptr(hz, "hazard curve");
        require_ptr(expiries, "expiries");
        require_ptr(strikes, "strikes");
        require_ptr(out, "out");
        const auto quotes = cmt::price_caplet_grid(to_config(cfg), dc->curve, hz->curve, {expiries, n_expiries},
                                                   {strikes, n_strikes}, relative_strikes != 0);
        std::vector<cmt::OptionQuote> options;
        options.reserve(quotes.size());
        for (const auto& q : quotes) options.push_back(q.option);
        const auto surface = cmt::build_surface(options);
        for (size_t i = 0; i < quotes.size(); ++i) {
            const cmt::OptionQuote& o = quotes[i].option;
            out[i] = {o.expiry,     o.strike, o.forward, o.price, quotes[i].std_error, surface[i].implied_vol,
                      o.is_call, surface[i].converged};
        }
    });
}

}  // extern "C"
