#include "regopt/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

namespace regopt {

namespace {

using nlohmann::json;

double require_number(const json& j, const char* section, const char* key) {
    if (!j.contains(key))
        throw ConfigError(std::string(section) + "." + key + ": missing");
    const json& v = j.at(key);
    if (!v.is_number())
        throw ConfigError(std::string(section) + "." + key + ": must be a number");
    return v.get<double>();
}

json encode_bound(double v) {
    if (std::isinf(v)) return json("inf");
    return json(v);
}

double decode_bound(const json& v) {
    if (v.is_string()) {
        if (v.get<std::string>() == "inf") return kInfinity;
        throw ConfigError("region bound: unknown sentinel");
    }
    return v.get<double>();
}

} // namespace

RunConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    if (!j.contains("market")) throw ConfigError("market: missing");
    if (!j.contains("institution")) throw ConfigError("institution: missing");
    if (!j.contains("utility")) throw ConfigError("utility: missing");

    const json& jm = j.at("market");
    MarketParams mkt(require_number(jm, "market", "mu"),
                     require_number(jm, "market", "r"),
                     require_number(jm, "market", "sigma"),
                     require_number(jm, "market", "T"));

    const json& ji = j.at("institution");
    const double x0 = require_number(ji, "institution", "x0");
    Institution inst = ji.contains("DT")
                           ? Institution(x0, require_number(ji, "institution", "DT"))
                           : Institution::from_growth(
                                 x0, require_number(ji, "institution", "D0"),
                                 require_number(ji, "institution", "g"), mkt);

    CrraUtility u(require_number(j.at("utility"), "utility", "gamma"));

    RiskConstraint constraint = NoConstraint{};
    if (j.contains("constraint")) {
        const json& jc = j.at("constraint");
        const std::string type = jc.value("type", "none");
        if (type == "var") {
            constraint = VarConstraint{require_number(jc, "constraint", "L"),
                                       require_number(jc, "constraint", "alpha")};
        } else if (type == "es") {
            const double L = require_number(jc, "constraint", "L");
            double eps;
            if (jc.contains("epsilon_pct"))
                eps = require_number(jc, "constraint", "epsilon_pct") / 100.0 * x0;
            else
                eps = require_number(jc, "constraint", "epsilon");
            constraint = EsConstraint{L, eps};
        } else if (type != "none") {
            throw ConfigError("constraint.type: must be none, var or es");
        }
    }

    RunConfig cfg{mkt, inst, u, constraint};
    if (j.contains("outputs")) {
        const json& jo = j.at("outputs");
        cfg.out_format = jo.value("format", "json");
        if (cfg.out_format != "json" && cfg.out_format != "csv")
            throw ConfigError("outputs.format: must be json or csv");
        cfg.out_path = jo.value("path", "");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not readable: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

nlohmann::json solution_to_json(const Solution& sol) {
    json regions = json::array();
    for (const Region& rg : sol.profile.regions()) {
        json r;
        r["lo"] = encode_bound(rg.lo);
        r["hi"] = encode_bound(rg.hi);
        if (const auto* p = std::get_if<PowerBranch>(&rg.branch)) {
            r["branch"] = "power";
            r["lambda_eff"] = p->lambda_eff;
            r["shift"] = p->shift;
        } else if (const auto* c = std::get_if<ConstantBranch>(&rg.branch)) {
            r["branch"] = "constant";
            r["level"] = c->level;
        } else {
            r["branch"] = "zero";
        }
        regions.push_back(std::move(r));
    }
    json bounds = json::array();
    for (double b : sol.profile.boundaries()) bounds.push_back(encode_bound(b));

    json diag;
    const Diagnostics& d = sol.diagnostics;
    diag["budget"] = d.budget;
    diag["default_prob"] = d.default_prob;
    if (!std::isnan(d.prob_below_threshold))
        diag["prob_below_threshold"] = d.prob_below_threshold;
    if (!std::isnan(d.expected_shortfall))
        diag["expected_shortfall"] = d.expected_shortfall;
    diag["expected_utility"] = d.expected_utility;
    diag["x0_min"] = d.x0_min;
    diag["x0_slack"] = encode_bound(d.x0_slack);

    json out;
    out["regime"] = sol.regime;
    out["gamma"] = sol.profile.gamma();
    out["lambda_budget"] = sol.lambda_budget;
    out["lambda_risk"] = sol.lambda_risk ? json(*sol.lambda_risk) : json(nullptr);
    out["regions"] = std::move(regions);
    out["boundaries"] = std::move(bounds);
    out["diagnostics"] = std::move(diag);
    return out;
}

WealthProfile profile_from_json(const nlohmann::json& j) {
    std::vector<Region> regions;
    for (const json& r : j.at("regions")) {
        Region rg;
        rg.lo = decode_bound(r.at("lo"));
        rg.hi = decode_bound(r.at("hi"));
        const std::string branch = r.at("branch").get<std::string>();
        if (branch == "power")
            rg.branch = PowerBranch{r.at("lambda_eff").get<double>(),
                                    r.at("shift").get<double>()};
        else if (branch == "constant")
            rg.branch = ConstantBranch{r.at("level").get<double>()};
        else if (branch == "zero")
            rg.branch = ZeroBranch{};
        else
            throw ConfigError("region.branch: unknown kind " + branch);
        regions.push_back(std::move(rg));
    }
    return WealthProfile(j.at("gamma").get<double>(), std::move(regions));
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace regopt
