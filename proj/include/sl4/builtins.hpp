#pragma once

#include <string>
#include <vector>

#include "sl4/problem.hpp"

namespace sl4 {

/// y'''' = lambda y on (0,1), y = y'' = 0 at both ends.
ProblemSpec hinged_beam(double length = 1.0);
/// y'''' = lambda y on (0,1), y = y' = 0 at both ends.
ProblemSpec clamped_beam();
/// y'''' = lambda y on (0, inf), free at 0.
ProblemSpec free_beam();
/// y'''' + x^4 y = lambda y on (0, inf), y = y' = 0 at 0.
ProblemSpec quartic_well();
/// y'''' + C x^-4 y = lambda y on (0,1], y = y' = 0 at 1.
ProblemSpec euler_family(double C);
/// ((1-x)^3 y'')'' = lambda y on [0,1), Dirichlet at 0. The right end is lim-3;
/// its condition is [y, psi] = 0 with psi = cos(theta) + sin(theta) ln(1-x).
/// theta = 0 gives the Friedrichs extension.
ProblemSpec lim3_beam(double theta);
/// ((1-x) y'')'' = lambda y on [0,1), Dirichlet at 0, free-type lim-4 conditions
/// [y,1] = [y,x] = 0 at 1 from solutions anchored at x = 1/2.
ProblemSpec lim4_beam();
/// ((1-x) y'')'' + 100 x^-4 y = lambda y on (0,1): lim-2 at 0, lim-4 at 1.
ProblemSpec lim2_lim4();

/// Registry lookup: hinged, clamped, free-beam, quartic-well, euler-family:C=<val>,
/// lim3-beam[:theta=<val>], lim4-beam, lim2-lim4. Throws Config.
ProblemSpec builtin_problem(const std::string& name);

std::vector<std::string> builtin_names();

}  // namespace sl4
