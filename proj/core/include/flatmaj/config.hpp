#pragma once

#include <string>

#include "json.hpp"

#include "flatmaj/conditions.hpp"
#include "flatmaj/rates.hpp"

namespace flatmaj {

// Runtime knobs shared by the CLI commands. JSON round-trips keep unset keys
// at their defaults; unknown keys are rejected.
struct RunConfig {
    int grid_size = 64;
    int keep_cells = 8;
    int max_refine_iters = 200;
    double simplex_tol = 1e-10;
    double tau_strict = 1e-9;
    double tau_zero = 1e-9;
    double boundary_collar = 1e-6;
    double feas_tolerance = 1e-7;
    int feas_max_iters = 20000;
    int dimension_cap = 4096;
    int n_max = 8;
    double rate_band = 1e-6;
    unsigned long long seed = 0;
    std::string output_path;  // empty writes to stdout

    void validate() const;

    MinimizeOptions minimize_options() const;
    CheckOptions check_options() const;
    CertifyOptions certify_options() const;

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
};

}  // namespace flatmaj
