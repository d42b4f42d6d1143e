#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpw/solvable1d/model.hpp"
#include "dpw/waveguide/geometry.hpp"
#include "dpw/waveguide/mesh.hpp"

namespace dpw::cli {

/// Every setting the subcommands read, with defaults. Keys are
/// "section.name" as in the TOML file.
struct Config {
    // [domain]
    double L_minus = -1.0;
    double L_plus = 1.0;
    // [potential]
    std::vector<double> breakpoints;
    std::vector<double> values{0.0};
    // [interaction]: delta_prime, delta, free or decoupled
    std::string interaction = "delta_prime";
    double strength = 0.0;
    // [cross_section]
    double s_a = -0.5;
    double s_b = 0.5;
    double r = 0.4;
    // [window]: d, or gamma from which d is derived
    double eps = 0.2;
    double d = 0.0;
    std::optional<double> gamma;
    // [mesh]
    double ratio = 1.15;
    double min_frac = 0.125;
    double far_cell = 0.0;
    double far_cell_z = 0.0;
    int refine = 0;
    // [solver]
    int m = 5;
    double tol = 1e-9;
    std::uint64_t seed = 0;
    // [capacity]
    std::vector<double> half_widths{0.1, 0.05, 0.02};
    double cap_r = 1.0;
    int n_phi = 64;
    std::vector<int> levels{0, 1, 2};
    // [study]
    double study_gamma = 8.0;  // inf selects the d = eps design
    std::vector<double> study_eps{0.4, 0.3, 0.25, 0.2};
    bool richardson = true;
    double cutoff = 0.0;
    // [bands]
    double period = 2.0;
    std::optional<double> bands_gamma;
    double lambda_max = 100.0;
    int thetas = 9;

    solvable1d::PiecewisePotential potential() const;
    solvable1d::PointInteraction point_interaction() const;
    /// Geometry of [domain], [cross_section] and [window]; d from gamma when set.
    waveguide::WaveguideGeometry geometry() const;
    waveguide::Grading grading() const;
};

/// Reads a TOML file (empty path: defaults only) and applies "key=value"
/// overrides, the value parsed as a TOML value. ConfigError names the key on
/// unknown keys, wrong types or unreadable files.
Config load_config(const std::string& path, const std::vector<std::string>& overrides);

/// Every key with its resolved value; loading it back gives the same Config.
std::string to_toml(const Config& cfg);

/// Checks the settings `command` uses, including the modelling conditions
/// (d_eps <= eps, [-r, r] inside S, at least 3 feasible eps). ConfigError
/// with the offending key.
void validate(const Config& cfg, const std::string& command);

}  // namespace dpw::cli
