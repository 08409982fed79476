#include "chemoblow/scenario.hpp"

#include <cmath>
#include <utility>

namespace chemoblow {

namespace {

const char* const kSections[] = {"scenario", "model", "profile", "grid", "time", "moment", "energy", "gn", "sweep"};

double* model_field(ModelParams& p, const std::string& name)
{
    if (name == "lambda") return &p.lambda;
    if (name == "mu") return &p.mu;
    if (name == "k") return &p.k;
    if (name == "chi") return &p.chi;
    if (name == "xi") return &p.xi;
    if (name == "alpha") return &p.alpha;
    if (name == "beta") return &p.beta;
    if (name == "gamma") return &p.gamma;
    if (name == "delta") return &p.delta;
    if (name == "R") return &p.R;
    return nullptr;
}

const char* const kModelKeys[] = {"lambda", "mu", "k", "chi", "xi", "alpha", "beta", "gamma", "delta", "R"};

void read_double(const ConfigDocument& doc, const char* section, const char* key, double& target)
{
    if (auto v = doc.get_double(section, key)) target = *v;
}

[[noreturn]] void rethrow_located(const ConfigDocument& doc, const ValidationError& e, const char* section)
{
    const FieldViolation& first = e.violations().front();
    std::string what = first.constraint;
    for (std::size_t i = 1; i < e.violations().size(); ++i)
        what += "; " + e.violations()[i].field + ": " + e.violations()[i].constraint;
    throw doc.error(section, first.field, "violates " + what);
}

}  // namespace

bool is_sweep_key(const std::string& key)
{
    if (key == "dominance") return true;
    if (key.rfind("model.", 0) == 0) {
        ModelParams p;
        return model_field(p, key.substr(6)) != nullptr;
    }
    return key == "profile.L" || key == "profile.cap" || key == "profile.scale";
}

Scenario apply_axis(Scenario sc, const std::string& key, double value)
{
    if (key == "dominance") {
        sc.params.chi = (value + sc.params.xi * sc.params.gamma) / sc.params.alpha;
    } else if (key.rfind("model.", 0) == 0 && model_field(sc.params, key.substr(6))) {
        *model_field(sc.params, key.substr(6)) = value;
    } else if (key == "profile.L") {
        sc.profile.L = value;
    } else if (key == "profile.cap") {
        sc.profile.cap = value;
    } else if (key == "profile.scale") {
        sc.profile.scale = value;
    } else {
        throw ParameterError("unsupported sweep axis '" + key + "'");
    }
    return sc;
}

void validate(const Scenario& sc)
{
    (void)validate_params(sc.params);
    (void)make_profile(sc.profile.kind, sc.profile.L, sc.profile.cap, sc.profile.scale, sc.params);
    validate(sc.control);
    validate(sc.moment, sc.params.n, sc.params.R);
    validate(sc.gn, sc.params.n);
    if (sc.gn.sigma != sc.sigma) throw ParameterError("gn sigma differs from energy sigma");
}

Scenario parse_scenario(const ConfigDocument& doc)
{
    Scenario sc;
    if (auto v = doc.get_string("scenario", "name")) {
        if (v->empty() || v->find_first_of("/\\ ") != std::string::npos)
            throw doc.error("scenario", "name", "must be non-empty without spaces or slashes");
        sc.name = *v;
    }
    if (auto v = doc.get_string("scenario", "output_dir")) sc.output_dir = *v;
    if (auto v = doc.get_bool("scenario", "cross_check")) sc.cross_check = *v;

    for (const char* key : kModelKeys) read_double(doc, "model", key, *model_field(sc.params, key));
    if (auto v = doc.get_int("model", "n")) sc.params.n = static_cast<int>(*v);
    try {
        (void)validate_params(sc.params);
    } catch (const ValidationError& e) {
        rethrow_located(doc, e, "model");
    }

    if (auto v = doc.get_string("profile", "kind")) {
        try {
            sc.profile.kind = parse_profile_kind(*v);
        } catch (const std::exception&) {
            throw doc.error("profile", "kind", "expected singular_capped, gaussian_bump or constant");
        }
    }
    read_double(doc, "profile", "L", sc.profile.L);
    read_double(doc, "profile", "cap", sc.profile.cap);
    read_double(doc, "profile", "scale", sc.profile.scale);
    const std::pair<const char*, double> profile_values[] = {
        {"L", sc.profile.L}, {"cap", sc.profile.cap}, {"scale", sc.profile.scale}};
    for (const auto& [key, value] : profile_values)
        if (!(value > 0.0) || !std::isfinite(value))
            throw doc.error("profile", key, std::string("violates ") + key + " > 0");

    if (auto v = doc.get_int("grid", "cells")) {
        if (*v < kMinCells) throw doc.error("grid", "cells", "violates cells >= " + std::to_string(kMinCells));
        sc.grid.cells = static_cast<int>(*v);
    }
    if (auto v = doc.get_string("grid", "stretching")) {
        if (*v == "uniform")
            sc.grid.stretching = Stretching::uniform();
        else if (*v == "geometric")
            sc.grid.stretching = Stretching::geometric(1.0);
        else
            throw doc.error("grid", "stretching", "expected uniform or geometric");
    }
    if (auto v = doc.get_double("grid", "ratio")) {
        if (!(*v > 0.0 && *v <= 1.0)) throw doc.error("grid", "ratio", "violates 0 < ratio <= 1");
        sc.grid.stretching.ratio = *v;
    }

    StepControl& c = sc.control;
    read_double(doc, "time", "t_end", c.t_end);
    read_double(doc, "time", "sample_interval", c.sample_interval);
    read_double(doc, "time", "dt_init", c.dt_init);
    read_double(doc, "time", "dt_min", c.dt_min);
    read_double(doc, "time", "dt_max", c.dt_max);
    read_double(doc, "time", "cfl_safety", c.cfl_safety);
    read_double(doc, "time", "linf_blowup_threshold", c.linf_blowup_threshold);
    if (auto v = doc.get_int("time", "max_steps")) c.max_steps = *v;
    try {
        validate(c);
    } catch (const ValidationError& e) {
        rethrow_located(doc, e, "time");
    }

    sc.moment = default_moment_config(sc.params.n, sc.params.R);
    read_double(doc, "moment", "p", sc.moment.p);
    read_double(doc, "moment", "s0", sc.moment.s0);
    try {
        validate(sc.moment, sc.params.n, sc.params.R);
    } catch (const ValidationError& e) {
        rethrow_located(doc, e, "moment");
    }

    read_double(doc, "energy", "sigma", sc.sigma);
    sc.gn.sigma = sc.sigma;
    read_double(doc, "gn", "C_GN", sc.gn.C_GN);
    try {
        validate(sc.gn, sc.params.n);
    } catch (const ValidationError& e) {
        rethrow_located(doc, e, e.violations().front().field == "sigma" ? "energy" : "gn");
    }

    for (const std::string& key : doc.keys("sweep")) {
        if (!is_sweep_key(key)) throw doc.error("sweep", key, "unsupported sweep axis");
        SweepAxis axis{key, doc.get_list("sweep", key)};
        if (axis.values.empty()) throw doc.error("sweep", key, "axis needs at least one value");
        sc.axes.push_back(std::move(axis));
    }

    doc.finish({std::begin(kSections), std::end(kSections)});
    return sc;
}

Scenario load_scenario(const std::string& path) { return parse_scenario(ConfigDocument::load(path)); }

}  // namespace chemoblow
