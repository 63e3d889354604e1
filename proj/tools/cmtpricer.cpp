// cmtpricer: batch front end for the CMT convexity engine.
//
// Every subcommand resolves one flat parameter set (built-in defaults, then an
// optional JSON config file, then command-line flags) and writes its results
// under --out. Exit status: 0 success, 2 invalid input, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cmt/cmt.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct ExitError {
    int code;
    std::string message;
};

[[noreturn]] void invalid(const std::string& message) { throw ExitError{kExitValidation, message}; }

void check(cmt_status status) {
    if (status == CMT_OK) return;
    throw ExitError{cmt_status_is_validation(status) ? kExitValidation : kExitNumerical, cmt_last_error()};
}

// ---------------------------------------------------------------------------
// Parameters

enum class Kind { Number, Integer, Text, Flag, List };

struct Key {
    const char* name;
    Kind kind;
    const char* help;
};

// Order here is the order of the parameter echo.
const Key kKeys[] = {
    {"discount", Kind::Text, "discount curve CSV (t,df)"},
    {"hazard", Kind::Text, "hazard curve CSV (t,lambda); empty means zero intensity"},
    {"quotes", Kind::Text, "bond quote CSV; stripped for the hazard curve when --hazard is empty"},
    {"extrapolate", Kind::Flag, "extrapolate curves beyond their last pillar"},
    {"out", Kind::Text, "output directory"},
    {"expiry", Kind::Number, "expiry of the forward yield, years"},
    {"theta", Kind::Number, "bond tenor, years"},
    {"kappa", Kind::Integer, "coupons per year"},
    {"recovery", Kind::Number, "recovery rate"},
    {"coupon_mode", Kind::Text, "cmt_par or fixed"},
    {"fixed_coupon", Kind::Number, "annual coupon rate in fixed mode"},
    {"alpha", Kind::Number, "Hull-White mean reversion"},
    {"sigma", Kind::Number, "Hull-White short-rate volatility"},
    {"paths", Kind::Integer, "Monte Carlo paths"},
    {"seed", Kind::Integer, "random seed"},
    {"step_days", Kind::Number, "time step in days of 1/365 year"},
    {"quad_step", Kind::Number, "quadrature step, years"},
    {"lambda_init_mode", Kind::Text, "stabilized or paper_exact"},
    {"zero_yield", Kind::Text, "absorb or fail when a path's yield collapses to zero"},
    {"payoff", Kind::Text, "terminal_yield, terminal_cmt, caplet, floorlet, cap or floor"},
    {"strike", Kind::Number, "option strike; caplets and floorlets default to ATMF"},
    {"pay_frequency", Kind::Integer, "caplet payments per year"},
    {"cap_maturity", Kind::Number, "last payment date of a cap or floor, years"},
    {"dump_paths", Kind::Flag, "price: also write paths.csv"},
    {"path_counts", Kind::List, "convergence: path counts"},
    {"sweep", Kind::Text, "sensitivity: sigma, alpha or recovery"},
    {"values", Kind::List, "sensitivity: parameter values"},
    {"expiries", Kind::List, "surface: expiries, years"},
    {"strikes", Kind::List, "surface: strikes"},
    {"relative_strikes", Kind::Flag, "surface: strikes are multiples of the forward CMT"},
    {"workers", Kind::Integer, "worker threads, 0 for all cores (never affects results)"},
};

const Key* find_key(const std::string& name) {
    for (const Key& k : kKeys)
        if (name == k.name) return &k;
    return nullptr;
}

Json defaults() {
    Json j;
    j["discount"] = "";
    j["hazard"] = "";
    j["quotes"] = "";
    j["extrapolate"] = false;
    j["out"] = ".";
    j["expiry"] = 1.0;
    j["theta"] = 10.0;
    j["kappa"] = 2;
    j["recovery"] = 0.2;
    j["coupon_mode"] = "cmt_par";
    j["fixed_coupon"] = 0.0;
    j["alpha"] = 0.1;
    j["sigma"] = 0.01;
    j["paths"] = 1024;
    j["seed"] = 20120328;
    j["step_days"] = 1.0;
    j["quad_step"] = 1.0 / 12.0;
    j["lambda_init_mode"] = "stabilized";
    j["zero_yield"] = "absorb";
    j["payoff"] = "terminal_yield";
    j["strike"] = nullptr;
    j["pay_frequency"] = 4;
    j["cap_maturity"] = 0.0;
    j["dump_paths"] = false;
    j["path_counts"] = {128, 256, 512, 1024, 2048, 4096};
    j["sweep"] = "sigma";
    j["values"] = {0.005, 0.01, 0.02};
    j["expiries"] = {0.25, 0.5, 1.0, 2.0, 5.0, 10.0};
    j["strikes"] = {0.5, 0.75, 0.9, 1.0, 1.1, 1.25, 1.5, 2.0};
    j["relative_strikes"] = true;
    j["workers"] = 0;
    return j;
}

double parse_number(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) invalid(key + ": expected a number, got '" + text + "'");
    return v;
}

Json parse_value(const Key& key, const std::string& text) {
    switch (key.kind) {
        case Kind::Number:
            return parse_number(key.name, text);
        case Kind::Integer: {
            long long v = 0;
            const char* end = text.data() + text.size();
            auto [ptr, ec] = std::from_chars(text.data(), end, v);
            if (ec != std::errc{} || ptr != end) invalid(std::string(key.name) + ": expected an integer, got '" + text + "'");
            return v;
        }
        case Kind::Flag:
            if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
            if (text == "false" || text == "0" || text == "no" || text == "off") return false;
            invalid(std::string(key.name) + ": expected true or false, got '" + text + "'");
        case Kind::List: {
            Json arr = Json::array();
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ',')) arr.push_back(parse_number(key.name, item));
            return arr;
        }
        case Kind::Text:
            break;
    }
    return text;
}

void check_type(const Key& key, const Json& v) {
    bool ok = false;
    switch (key.kind) {
        case Kind::Number: ok = v.is_number() || (v.is_null() && std::string(key.name) == "strike"); break;
        case Kind::Integer: ok = v.is_number_integer(); break;
        case Kind::Text: ok = v.is_string(); break;
        case Kind::Flag: ok = v.is_boolean(); break;
        case Kind::List:
            ok = v.is_array();
            for (const auto& e : v) ok = ok && e.is_number();
            break;
    }
    if (!ok) invalid(std::string("config key '") + key.name + "' has the wrong type");
}

Json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) invalid("cannot open config file '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        invalid("config file '" + path + "': " + e.what());
    }
    if (!j.is_object()) invalid("config file '" + path + "' must hold a JSON object");
    for (const auto& [name, value] : j.items()) {
        const Key* key = find_key(name);
        if (!key) invalid("unknown config key '" + name + "'");
        check_type(*key, value);
    }
    return j;
}

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string num(std::size_t v) { return std::to_string(v); }

class Params {
public:
    explicit Params(Json j) : j_(std::move(j)) {}

    double number(const char* k) const { return j_.at(k).get<double>(); }
    long long integer(const char* k) const { return j_.at(k).get<long long>(); }
    std::string text(const char* k) const { return j_.at(k).get<std::string>(); }
    bool flag(const char* k) const { return j_.at(k).get<bool>(); }
    std::vector<double> list(const char* k) const { return j_.at(k).get<std::vector<double>>(); }
    std::optional<double> optional_number(const char* k) const {
        return j_.at(k).is_null() ? std::nullopt : std::optional<double>(number(k));
    }
    void set(const char* k, Json v) { j_[k] = std::move(v); }

    // Parameters that shape results. Worker count and output directory are
    // left out so files are identical across thread counts and locations.
    Json echo_object() const {
        Json e = j_;
        e.erase("workers");
        e.erase("out");
        return e;
    }

    std::string echo_line(const std::string& command) const {
        std::string line = "# cmtpricer " + command;
        const Json echo = echo_object();
        for (const auto& [k, v] : echo.items()) {
            line += " " + k + "=";
            if (v.is_string())
                line += v.get<std::string>();
            else if (v.is_array()) {
                for (std::size_t i = 0; i < v.size(); ++i) line += (i ? ";" : "") + num(v[i].get<double>());
            } else if (v.is_number_float())
                line += num(v.get<double>());
            else
                line += v.dump();
        }
        return line;
    }

private:
    Json j_;
};

// ---------------------------------------------------------------------------
// C API handles

struct DcDeleter {
    void operator()(cmt_discount_curve* p) const { cmt_discount_curve_destroy(p); }
};
struct HzDeleter {
    void operator()(cmt_hazard_curve* p) const { cmt_hazard_curve_destroy(p); }
};
struct QsDeleter {
    void operator()(cmt_quote_set* p) const { cmt_quote_set_destroy(p); }
};
struct ResDeleter {
    void operator()(cmt_result* p) const { cmt_result_destroy(p); }
};
using DcPtr = std::unique_ptr<cmt_discount_curve, DcDeleter>;
using HzPtr = std::unique_ptr<cmt_hazard_curve, HzDeleter>;
using QsPtr = std::unique_ptr<cmt_quote_set, QsDeleter>;
using ResPtr = std::unique_ptr<cmt_result, ResDeleter>;

DcPtr load_discount(const Params& p) {
    const std::string path = p.text("discount");
    if (path.empty()) invalid("a discount curve is required (--discount)");
    cmt_discount_curve* dc = nullptr;
    check(cmt_discount_curve_load_csv(path.c_str(), p.flag("extrapolate"), &dc));
    return DcPtr(dc);
}

QsPtr load_quotes(const Params& p) {
    cmt_quote_set* qs = nullptr;
    check(cmt_quote_set_load_csv(p.text("quotes").c_str(), &qs));
    return QsPtr(qs);
}

HzPtr strip(const cmt_quote_set* qs, const cmt_discount_curve* dc, const Params& p) {
    cmt_hazard_curve* hz = nullptr;
    check(cmt_strip_hazard(qs, dc, p.number("recovery"), p.number("quad_step"), &hz));
    return HzPtr(hz);
}

// Hazard from --hazard, else stripped from --quotes at the run's recovery,
// else zero intensity.
HzPtr resolve_hazard(const Params& p, const cmt_discount_curve* dc) {
    cmt_hazard_curve* hz = nullptr;
    if (!p.text("hazard").empty()) {
        check(cmt_hazard_curve_load_csv(p.text("hazard").c_str(), p.flag("extrapolate"), &hz));
        return HzPtr(hz);
    }
    if (!p.text("quotes").empty()) return strip(load_quotes(p).get(), dc, p);
    check(cmt_hazard_curve_flat(0.0, 1.0, 1, &hz));
    return HzPtr(hz);
}

int payoff_code(const std::string& name) {
    static const std::map<std::string, int> m{{"terminal_yield", CMT_PAYOFF_TERMINAL_YIELD},
                                              {"terminal_cmt", CMT_PAYOFF_TERMINAL_CMT},
                                              {"caplet", CMT_PAYOFF_CAPLET},
                                              {"floorlet", CMT_PAYOFF_FLOORLET},
                                              {"cap", CMT_PAYOFF_CAP},
                                              {"floor", CMT_PAYOFF_FLOOR}};
    const auto it = m.find(name);
    if (it == m.end()) invalid("unknown payoff '" + name + "'");
    return it->second;
}

cmt_sim_config sim_config(const Params& p) {
    cmt_sim_config c;
    cmt_sim_config_default(&c);
    c.expiry = p.number("expiry");
    c.theta = p.number("theta");
    c.kappa = static_cast<int>(p.integer("kappa"));
    c.recovery = p.number("recovery");
    const std::string mode = p.text("coupon_mode");
    if (mode != "cmt_par" && mode != "fixed") invalid("coupon_mode must be cmt_par or fixed");
    c.coupon_mode = mode == "fixed" ? CMT_COUPON_FIXED : CMT_COUPON_CMT_PAR;
    c.fixed_coupon = p.number("fixed_coupon");
    c.alpha = p.number("alpha");
    c.sigma = p.number("sigma");
    if (p.integer("paths") < 1) invalid("paths must be positive");
    c.n_paths = static_cast<uint64_t>(p.integer("paths"));
    if (p.integer("seed") < 0) invalid("seed must be non-negative");
    c.seed = static_cast<uint64_t>(p.integer("seed"));
    c.step = p.number("step_days") / 365.0;
    c.quad_step = p.number("quad_step");
    const std::string init = p.text("lambda_init_mode");
    if (init != "stabilized" && init != "paper_exact") invalid("lambda_init_mode must be stabilized or paper_exact");
    c.hazard_init = init == "paper_exact" ? CMT_HAZARD_PAPER_EXACT : CMT_HAZARD_STABILIZED;
    const std::string zy = p.text("zero_yield");
    if (zy != "absorb" && zy != "fail") invalid("zero_yield must be absorb or fail");
    c.zero_yield = zy == "fail" ? CMT_ZERO_YIELD_FAIL : CMT_ZERO_YIELD_ABSORB;
    c.payoff = payoff_code(p.text("payoff"));
    if (const auto k = p.optional_number("strike")) {
        c.has_strike = 1;
        c.strike = *k;
    }
    c.pay_frequency = static_cast<int>(p.integer("pay_frequency"));
    c.cap_maturity = p.number("cap_maturity");
    if (p.integer("workers") < 0) invalid("workers must be non-negative");
    c.workers = static_cast<unsigned>(p.integer("workers"));
    return c;
}

ResPtr run(const cmt_sim_config& c, const cmt_discount_curve* dc, const cmt_hazard_curve* hz) {
    cmt_result* r = nullptr;
    check(cmt_price(&c, dc, hz, &r));
    return ResPtr(r);
}

// ---------------------------------------------------------------------------
// Output

std::filesystem::path out_dir(const Params& p) {
    const std::filesystem::path dir = p.text("out");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) invalid("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) invalid("cannot write '" + path.string() + "'");
    out << content;
    if (!out) invalid("failed writing '" + path.string() + "'");
}

class CsvWriter {
public:
    CsvWriter(const std::string& echo, const std::string& header) : text_(echo + "\n" + header + "\n") {}

    void row(std::initializer_list<std::string> cells) {
        bool first = true;
        for (const auto& c : cells) {
            if (!first) text_ += ',';
            text_ += c;
            first = false;
        }
        text_ += '\n';
    }

    void save(const std::filesystem::path& path) const { write_file(path, text_); }

private:
    std::string text_;
};

Json stats_json(const cmt_stats& s) {
    Json j;
    j["count"] = s.count;
    j["min"] = s.min;
    j["max"] = s.max;
    j["average"] = s.mean;
    j["std_dev"] = s.std_dev;
    j["skewness"] = s.skewness;
    j["excess_kurtosis"] = s.excess_kurtosis;
    return j;
}

Json estimate_json(const cmt_estimate& e) { return Json{{"mean", e.mean}, {"std_error", e.std_error}}; }

// ---------------------------------------------------------------------------
// Commands

void cmd_price(Params& p) {
    const auto dir = out_dir(p);
    const DcPtr dc = load_discount(p);
    const HzPtr hz = resolve_hazard(p, dc.get());
    const cmt_sim_config c = sim_config(p);
    const ResPtr r = run(c, dc.get(), hz.get());

    cmt_summary s;
    check(cmt_result_summary(r.get(), &s));
    cmt_stats payoff_stats, yield_stats, vol_stats;
    check(cmt_result_stats(r.get(), CMT_STATS_PAYOFF, &payoff_stats));
    check(cmt_result_stats(r.get(), CMT_STATS_TERMINAL_YIELD, &yield_stats));
    check(cmt_result_stats(r.get(), CMT_STATS_YIELD_VOL, &vol_stats));

    Json res;
    res["n_paths"] = s.n_paths;
    res["initial_yield"] = s.initial_yield;
    res["initial_hazard"] = s.initial_hazard;
    res["initial_bond_value"] = s.initial_bond_value;
    res["expected_terminal_yield"] = estimate_json(s.terminal_yield);
    res["expected_cmt"] = estimate_json(s.cmt);
    res["expected_bond_value"] = estimate_json(s.bond_value);
    res["convexity_adjustment"] = s.convexity_adjustment;
    res["payoff"] = p.text("payoff");
    res["price"] = s.payoff.mean;
    res["std_error"] = s.payoff.std_error;
    res["strike"] = s.has_strike ? Json(s.strike) : Json(nullptr);
    res["absorbed_paths"] = s.absorbed_paths;
    res["hazard_clamp_events"] = s.clamp_events;
    res["payoff_stats"] = stats_json(payoff_stats);
    res["terminal_yield_stats"] = stats_json(yield_stats);
    res["yield_vol_stats"] = stats_json(vol_stats);

    Json doc;
    doc["command"] = "price";
    doc["parameters"] = p.echo_object();
    doc["results"] = res;
    write_file(dir / "result.json", doc.dump(2) + "\n");

    if (p.flag("dump_paths")) {
        std::vector<cmt_path> paths(cmt_result_path_count(r.get()));
        check(cmt_result_paths(r.get(), paths.data(), paths.size()));
        CsvWriter csv(p.echo_line("price"), "path,y_T,cmt,payoff");
        for (std::size_t i = 0; i < paths.size(); ++i)
            csv.row({num(i), num(paths[i].terminal_yield), num(paths[i].cmt), num(paths[i].payoff)});
        csv.save(dir / "paths.csv");
    }

    std::printf("y0 %.8f  E[y_T] %.8f (se %.2e)  convexity %.3e  price %.8g (se %.2e)\n", s.initial_yield,
                s.terminal_yield.mean, s.terminal_yield.std_error, s.convexity_adjustment, s.payoff.mean,
                s.payoff.std_error);
}

std::vector<double> nonempty(const Params& p, const char* key) {
    auto v = p.list(key);
    if (v.empty()) invalid(std::string(key) + " must not be empty");
    return v;
}

void cmd_convergence(Params& p) {
    const auto dir = out_dir(p);
    const std::vector<double> counts = nonempty(p, "path_counts");
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] < 1 || counts[i] != std::floor(counts[i])) invalid("path_counts must be positive integers");
        if (i > 0 && counts[i] <= counts[i - 1]) invalid("path_counts must be ascending");
    }
    const DcPtr dc = load_discount(p);
    const HzPtr hz = resolve_hazard(p, dc.get());
    cmt_sim_config c = sim_config(p);
    c.payoff = CMT_PAYOFF_CAPLET;
    c.has_strike = 0;

    const std::string echo = p.echo_line("convergence");
    CsvWriter yield_csv(echo, "n_paths,estimate,std_error");
    CsvWriter caplet_csv(echo, "n_paths,estimate,std_error");
    for (double n : counts) {
        c.n_paths = static_cast<uint64_t>(n);
        const ResPtr r = run(c, dc.get(), hz.get());
        cmt_summary s;
        check(cmt_result_summary(r.get(), &s));
        yield_csv.row({num(s.n_paths), num(s.terminal_yield.mean), num(s.terminal_yield.std_error)});
        caplet_csv.row({num(s.n_paths), num(s.payoff.mean), num(s.payoff.std_error)});
        std::printf("n=%zu  E[y_T] %.8f (se %.2e)  ATMF caplet %.6e (se %.2e)\n", s.n_paths, s.terminal_yield.mean,
                    s.terminal_yield.std_error, s.payoff.mean, s.payoff.std_error);
    }
    yield_csv.save(dir / "convergence_yield.csv");
    caplet_csv.save(dir / "convergence_caplet.csv");
}

void cmd_sensitivity(Params& p) {
    const auto dir = out_dir(p);
    const std::string sweep = p.text("sweep");
    if (sweep != "sigma" && sweep != "alpha" && sweep != "recovery") invalid("sweep must be sigma, alpha or recovery");
    const std::vector<double> values = nonempty(p, "values");
    const DcPtr dc = load_discount(p);

    CsvWriter csv(p.echo_line("sensitivity"), "param_value,E_yield,atmf_caplet,std_error_yield,std_error_caplet");
    for (double v : values) {
        Params q = p;
        q.set(sweep.c_str(), v);
        const HzPtr hz = resolve_hazard(q, dc.get());
        cmt_sim_config c = sim_config(q);
        c.payoff = CMT_PAYOFF_CAPLET;
        c.has_strike = 0;
        const ResPtr r = run(c, dc.get(), hz.get());
        cmt_summary s;
        check(cmt_result_summary(r.get(), &s));
        csv.row({num(v), num(s.terminal_yield.mean), num(s.payoff.mean), num(s.terminal_yield.std_error),
                 num(s.payoff.std_error)});
        std::printf("%s=%g  E[y_T] %.8f  ATMF caplet %.6e\n", sweep.c_str(), v, s.terminal_yield.mean, s.payoff.mean);
    }
    csv.save(dir / ("sensitivity_" + sweep + ".csv"));
}

void cmd_surface(Params& p) {
    const auto dir = out_dir(p);
    const std::vector<double> expiries = nonempty(p, "expiries");
    const std::vector<double> strikes = nonempty(p, "strikes");
    const DcPtr dc = load_discount(p);
    const HzPtr hz = resolve_hazard(p, dc.get());
    cmt_sim_config c = sim_config(p);
    c.payoff = CMT_PAYOFF_CAPLET;

    std::vector<cmt_surface_point> pts(expiries.size() * strikes.size());
    check(cmt_caplet_surface(&c, dc.get(), hz.get(), expiries.data(), expiries.size(), strikes.data(), strikes.size(),
                             p.flag("relative_strikes"), pts.data()));
    CsvWriter csv(p.echo_line("surface"), "expiry,strike,implied_vol,converged");
    std::size_t converged = 0;
    for (const auto& pt : pts) {
        csv.row({num(pt.expiry), num(pt.strike), pt.converged ? num(pt.implied_vol) : "nan", pt.converged ? "1" : "0"});
        converged += pt.converged ? 1 : 0;
    }
    csv.save(dir / "surface.csv");
    std::printf("surface: %zu of %zu points inverted\n", converged, pts.size());
}

void cmd_strip(Params& p) {
    const auto dir = out_dir(p);
    if (p.text("quotes").empty()) invalid("strip-hazard needs --quotes");
    const DcPtr dc = load_discount(p);
    const QsPtr qs = load_quotes(p);
    const HzPtr hz = strip(qs.get(), dc.get(), p);

    const std::string echo = p.echo_line("strip-hazard");
    const std::size_t n = cmt_hazard_curve_size(hz.get());
    std::vector<double> t(n), lambda(n);
    check(cmt_hazard_curve_pillars(hz.get(), t.data(), lambda.data(), n));
    CsvWriter curve(echo, "t,lambda");
    for (std::size_t i = 0; i < n; ++i) curve.row({num(t[i]), num(lambda[i])});
    curve.save(dir / "hazard.csv");

    CsvWriter report(echo, "maturity,target,model,residual");
    double worst = 0.0;
    for (std::size_t i = 0; i < cmt_quote_set_size(qs.get()); ++i) {
        cmt_bond_quote q;
        check(cmt_quote_set_get(qs.get(), i, &q));
        double model = 0.0, target = 0.0;
        check(cmt_bond_price(qs.get(), i, dc.get(), hz.get(), p.number("recovery"), p.number("quad_step"), &model,
                             &target));
        report.row({num(q.maturity), num(target), num(model), num(model - target)});
        worst = std::max(worst, std::abs(model - target));
    }
    report.save(dir / "strip_report.csv");
    std::printf("stripped %zu pillars, max repricing residual %.3e\n", n, worst);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CMT convexity adjustment and option pricing under stochastic rates and hazard"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cmt_version()));

    struct Command {
        const char* name;
        const char* help;
        void (*fn)(Params&);
    };
    const Command commands[] = {
        {"price", "price one payoff and write result.json", cmd_price},
        {"convergence", "terminal yield and ATMF caplet against path count", cmd_convergence},
        {"sensitivity", "sweep sigma, alpha or recovery", cmd_sensitivity},
        {"surface", "Black implied volatility surface of CMT caplets and floorlets", cmd_surface},
        {"strip-hazard", "bootstrap a hazard curve from bond quotes", cmd_strip},
    };

    std::string config_path;
    std::map<std::string, std::string> raw;  // flag values as typed
    std::vector<std::pair<CLI::App*, const Command*>> subs;
    for (const Command& cmd : commands) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->add_option("--config", config_path, "flat JSON file with any of the keys below");
        for (const Key& k : kKeys) sub->add_option(std::string("--") + k.name, raw[k.name], k.help);
        subs.emplace_back(sub, &cmd);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    try {
        for (auto& [sub, cmd] : subs) {
            if (!sub->parsed()) continue;
            Json j = defaults();
            if (!config_path.empty()) j.update(load_config_file(config_path));
            for (const Key& k : kKeys)
                if (sub->count(std::string("--") + k.name) > 0) j[k.name] = parse_value(k, raw[k.name]);
            Params params(std::move(j));
            cmd->fn(params);
        }
    } catch (const ExitError& e) {
        std::cerr << "cmtpricer: error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "cmtpricer: error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
