#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anideg/anisotropy.hpp"
#include "anideg/stepper.hpp"

namespace anideg {

struct GridConfig {
    int dim = 1;
    std::vector<int> n{128};
    std::vector<double> a{0.0};
    std::vector<double> b{1.0};
};

struct AnisoConfig {
    AnisotropyFamily family = AnisotropyFamily::Isotropic;
    std::vector<double> matrix;                    // quadratic, row-major
    std::vector<std::vector<double>> matrices;     // ellipsoid_sum
};

struct MaterialConfig {
    std::string potential = "log_quench";  // log_quench | double_well
    double theta = 1.0;
    double theta_c = 2.0;
    double m = 1.0;
    double delta = 0.1;
};

enum class InitialKind { Constant, SeededNoise, TanhProfile, FromSnapshot };

struct InitialConfig {
    InitialKind kind = InitialKind::Constant;
    double value = 0.0;                 // constant
    double mean = 0.0;                  // seeded_noise
    double amplitude = 0.1;             // seeded_noise
    std::uint64_t seed = 1234;          // seeded_noise
    std::vector<double> centers;        // tanh_profile: axis-0 interface positions (even count)
    double width = 0.1;                 // tanh_profile
    std::string path;                   // from_snapshot
};

struct OutputConfig {
    std::string directory = "out";
};

struct RunConfig {
    GridConfig grid;
    AnisoConfig anisotropy;
    MaterialConfig material;
    InitialConfig initial;
    SolverConfig solver;
    bool kappa_auto = true;  // kappa = 2 * A1_certified * B^* unless set in the config
    OutputConfig output;
};

/// Strict sectioned key=value grammar:
///   - '#' starts a comment; blank lines are ignored;
///   - sections: [grid] [anisotropy] [material] [initial] [solver] [output];
///   - unknown sections/keys and duplicate keys are ParseError (with lines);
///   - every key has a documented default, so the empty text is valid;
///   - value-range violations are ValidationError naming the key and bound.
RunConfig parse_config(const std::string& text);

/// Convenience: read file, parse. Throws ParseError if unreadable.
RunConfig parse_config_file(const std::string& path);

} // namespace anideg
