#include "flatmaj/config.hpp"

#include <set>

#include "flatmaj/errors.hpp"

namespace flatmaj {

namespace {

template <typename T>
void read_key(const nlohmann::json& j, const char* key, T& field) {
    if (!j.contains(key)) return;
    const nlohmann::json& v = j[key];
    if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw MalformedInput(std::string("config: \"") + key + "\" must be a string");
        field = v.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw MalformedInput(std::string("config: \"") + key + "\" must be a number");
        field = v.get<double>();
    } else {
        if (!v.is_number_integer())
            throw MalformedInput(std::string("config: \"") + key + "\" must be an integer");
        field = v.get<T>();
    }
}

}  // namespace

void RunConfig::validate() const {
    if (grid_size < 2) throw MalformedInput("config: grid_size must be at least 2");
    if (keep_cells < 1) throw MalformedInput("config: keep_cells must be positive");
    if (max_refine_iters < 0) throw MalformedInput("config: max_refine_iters must be nonnegative");
    if (!(simplex_tol > 0.0)) throw MalformedInput("config: simplex_tol must be positive");
    if (!(tau_strict > 0.0) || !(tau_zero > 0.0))
        throw MalformedInput("config: verdict tolerances must be positive");
    if (!(boundary_collar > 0.0) || boundary_collar >= 0.5)
        throw MalformedInput("config: boundary_collar must lie in (0, 0.5)");
    if (!(feas_tolerance > 0.0)) throw MalformedInput("config: feas_tolerance must be positive");
    if (feas_max_iters < 1) throw MalformedInput("config: feas_max_iters must be positive");
    if (dimension_cap < 1) throw MalformedInput("config: dimension_cap must be positive");
    if (n_max < 1) throw MalformedInput("config: n_max must be positive");
    if (!(rate_band > 0.0)) throw MalformedInput("config: rate_band must be positive");
}

MinimizeOptions RunConfig::minimize_options() const {
    MinimizeOptions m;
    m.grid_size = grid_size;
    m.keep_cells = keep_cells;
    m.max_refine_iters = max_refine_iters;
    m.simplex_tol = simplex_tol;
    return m;
}

CheckOptions RunConfig::check_options() const {
    CheckOptions c;
    c.minimize = minimize_options();
    c.tau_strict = tau_strict;
    c.tau_zero = tau_zero;
    c.boundary_collar = boundary_collar;
    return c;
}

CertifyOptions RunConfig::certify_options() const {
    CertifyOptions c;
    c.n_max = n_max;
    c.rate_band = rate_band;
    c.feas_tolerance = feas_tolerance;
    c.feas_max_iters = feas_max_iters;
    c.dimension_cap = dimension_cap;
    c.minimize = minimize_options();
    return c;
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["grid_size"] = grid_size;
    j["keep_cells"] = keep_cells;
    j["max_refine_iters"] = max_refine_iters;
    j["simplex_tol"] = simplex_tol;
    j["tau_strict"] = tau_strict;
    j["tau_zero"] = tau_zero;
    j["boundary_collar"] = boundary_collar;
    j["feas_tolerance"] = feas_tolerance;
    j["feas_max_iters"] = feas_max_iters;
    j["dimension_cap"] = dimension_cap;
    j["n_max"] = n_max;
    j["rate_band"] = rate_band;
    j["seed"] = seed;
    j["output_path"] = output_path;
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw MalformedInput("config: expected a JSON object");
    static const std::set<std::string> known = {
        "grid_size",      "keep_cells",     "max_refine_iters", "simplex_tol",
        "tau_strict",     "tau_zero",       "boundary_collar",  "feas_tolerance",
        "feas_max_iters", "dimension_cap",  "n_max",            "rate_band",
        "seed",           "output_path"};
    for (const auto& [key, value] : j.items())
        if (known.find(key) == known.end())
            throw MalformedInput("config: unknown key \"" + key + "\"");
    RunConfig c;
    read_key(j, "grid_size", c.grid_size);
    read_key(j, "keep_cells", c.keep_cells);
    read_key(j, "max_refine_iters", c.max_refine_iters);
    read_key(j, "simplex_tol", c.simplex_tol);
    read_key(j, "tau_strict", c.tau_strict);
    read_key(j, "tau_zero", c.tau_zero);
    read_key(j, "boundary_collar", c.boundary_collar);
    read_key(j, "feas_tolerance", c.feas_tolerance);
    read_key(j, "feas_max_iters", c.feas_max_iters);
    read_key(j, "dimension_cap", c.dimension_cap);
    read_key(j, "n_max", c.n_max);
    read_key(j, "rate_band", c.rate_band);
    read_key(j, "seed", c.seed);
    read_key(j, "output_path", c.output_path);
    c.validate();
    return c;
}

}  // namespace flatmaj
