#include "sl4/builtins.hpp"

#include <cmath>

#include "sl4/error.hpp"

namespace sl4 {

namespace {

EndpointClass regular() { return {EndpointKind::Regular, 1.0}; }

double parse_param(const std::string& name, const std::string& prefix) {
    const std::string text = name.substr(prefix.size());
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::Config, "bad parameter in builtin name '" + name + "'");
}

LagrangeCondition unit_anchored_pair(double x0) {
    LagrangeCondition lc;
    lc.functions.push_back(ConditionFunction::anchored(x0, QuasiVector::from_derivatives(1, 0, 0, 0), 0.0, "1"));
    lc.functions.push_back(ConditionFunction::anchored(x0, QuasiVector::from_derivatives(x0, 1, 0, 0), 0.0, "x"));
    return lc;
}

}  // namespace

ProblemSpec hinged_beam(double length) {
    ProblemSpec p;
    p.name = "hinged";
    p.interval = {0.0, length};
    p.left_class = p.right_class = regular();
    p.left_bc = hinged_pair();
    p.right_bc = hinged_pair();
    return p;
}

ProblemSpec clamped_beam() {
    ProblemSpec p;
    p.name = "clamped";
    p.interval = {0.0, 1.0};
    p.left_class = p.right_class = regular();
    p.left_bc = dirichlet_pair();
    p.right_bc = dirichlet_pair();
    return p;
}

ProblemSpec free_beam() {
    ProblemSpec p;
    p.name = "free-beam";
    p.interval = {0.0, INFINITY};
    p.left_bc = natural_pair();
    return p;
}

ProblemSpec quartic_well() {
    ProblemSpec p;
    p.name = "quartic-well";
    p.interval = {0.0, INFINITY};
    p.coefficients.q = Coefficient::parse("x^4");
    p.left_class = regular();
    p.left_bc = dirichlet_pair();
    return p;
}

ProblemSpec euler_family(double C) {
    ProblemSpec p;
    p.name = "euler-family:C=" + std::to_string(C);
    p.interval = {0.0, 1.0};
    p.coefficients.q = Coefficient([C](double x) { return C / (x * x * x * x); }, "C/x^4");
    p.right_class = regular();
    p.right_bc = dirichlet_pair();
    return p;
}

ProblemSpec lim3_beam(double theta) {
    ProblemSpec p;
    p.name = "lim3-beam:theta=" + std::to_string(theta);
    p.interval = {0.0, 1.0};
    p.coefficients.p = Coefficient::parse("(1-x)^3");
    p.left_class = regular();
    p.left_bc = dirichlet_pair();
    p.right_class = EndpointClass{EndpointKind::Lim3, 1.0};
    const double c = std::cos(theta), s = std::sin(theta);
    LagrangeCondition lc;
    lc.functions.push_back(ConditionFunction::closed(
        [c, s](double x) {
            const double t = 1.0 - x;
            return QuasiVector::from_derivatives(c + s * std::log(t), -s / t, -t * s, -s);
        },
        "cos(theta) + sin(theta) ln(1-x)"));
    p.right_bc = lc;
    return p;
}

ProblemSpec lim4_beam() {
    ProblemSpec p;
    p.name = "lim4-beam";
    p.interval = {0.0, 1.0};
    p.coefficients.p = Coefficient::parse("1-x");
    p.left_class = regular();
    p.left_bc = dirichlet_pair();
    p.right_class = EndpointClass{EndpointKind::Lim4, 1.0};
    p.right_bc = unit_anchored_pair(0.5);
    return p;
}

ProblemSpec lim2_lim4() {
    ProblemSpec p;
    p.name = "lim2-lim4";
    p.interval = {0.0, 1.0};
    p.coefficients.p = Coefficient::parse("1-x");
    p.coefficients.q = Coefficient::parse("100/x^4");
    p.left_class = EndpointClass{EndpointKind::Lim2, 1.0};
    p.right_class = EndpointClass{EndpointKind::Lim4, 1.0};
    p.right_bc = unit_anchored_pair(0.5);
    return p;
}

ProblemSpec builtin_problem(const std::string& name) {
    if (name == "hinged") return hinged_beam();
    if (name == "clamped") return clamped_beam();
    if (name == "free-beam") return free_beam();
    if (name == "quartic-well") return quartic_well();
    if (name == "lim4-beam") return lim4_beam();
    if (name == "lim2-lim4") return lim2_lim4();
    if (name == "lim3-beam") return lim3_beam(0.0);
    if (name.rfind("lim3-beam:theta=", 0) == 0) return lim3_beam(parse_param(name, "lim3-beam:theta="));
    if (name.rfind("euler-family:C=", 0) == 0) return euler_family(parse_param(name, "euler-family:C="));
    fail(ErrorKind::Config, "unknown builtin '" + name + "'");
}

std::vector<std::string> builtin_names() {
    return {"hinged", "clamped", "free-beam", "quartic-well", "euler-family:C=<val>", "lim3-beam[:theta=<val>]",
            "lim4-beam", "lim2-lim4"};
}

}  // namespace sl4
