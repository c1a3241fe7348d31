#pragma once

#include <string>
#include <vector>

#include "anideg/estimates.hpp"

namespace anideg {

/// Built-in property suites behind `verify --suite <name>`.
/// Names: anisotropy, material, grid, estimates, all.
/// `inject_indefinite` adds a deliberately inadmissible quadratic fixture to
/// the anisotropy suite; its rejection path is reported as a failing row.
CheckReport verify_suite(const std::string& name, bool inject_indefinite = false);

const std::vector<std::string>& verify_suite_names();

} // namespace anideg
