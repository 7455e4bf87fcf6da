#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sl4/boundary.hpp"
#include "sl4/expression.hpp"
#include "sl4/hamiltonian.hpp"

namespace sl4 {

/// Piecewise polynomial in the local variable (x - breaks[i]) on [breaks[i], breaks[i+1]].
struct PiecewisePolynomial {
    std::vector<double> breaks;
    std::vector<std::vector<double>> coeffs;  // coeffs[i][k] multiplies (x - breaks[i])^k

    double operator()(double x) const;
};

/// Real coefficient function of x.
class Coefficient {
public:
    Coefficient() : Coefficient(0.0) {}
    Coefficient(double value);  // NOLINT(google-explicit-constructor)
    explicit Coefficient(Expression e);
    explicit Coefficient(PiecewisePolynomial pp, std::string label = "piecewise");
    Coefficient(std::function<double(double)> f, std::string label);

    static Coefficient parse(const std::string& text) { return Coefficient(Expression::parse(text)); }

    double operator()(double x) const;
    const std::string& label() const { return label_; }

private:
    std::variant<double, Expression, PiecewisePolynomial, std::function<double(double)>> impl_;
    std::string label_;
};

struct CoefficientSet {
    Coefficient p = 1.0;
    Coefficient s = 0.0;
    Coefficient q = 0.0;
    Coefficient w = 1.0;
};

struct Interval {
    double a = 0.0;
    double b = 1.0;

    double end(Side side) const { return side == Side::Left ? a : b; }
    bool finite(Side side) const { return std::isfinite(end(side)); }
    bool contains_interior(double x) const { return x > a && x < b; }
};

enum class EndpointKind { Regular, Lim2, Lim3, Lim4 };

const char* kind_name(EndpointKind kind);

struct EndpointClass {
    EndpointKind kind = EndpointKind::Regular;
    double confidence = 1.0;
};

struct ProblemSpec {
    std::string name;
    CoefficientSet coefficients;
    Interval interval;
    /// Empty means "classify automatically".
    std::optional<EndpointClass> left_class, right_class;
    std::optional<BoundaryForm> left_bc, right_bc;
    std::optional<double> essential_spectrum_floor;

    const std::optional<EndpointClass>& endpoint_class(Side side) const {
        return side == Side::Left ? left_class : right_class;
    }
    const std::optional<BoundaryForm>& bc(Side side) const { return side == Side::Left ? left_bc : right_bc; }

    /// Checks interval ordering and that condition counts fit the declared classes.
    void validate() const;
};

/// Throws EvaluationDomain outside the open interval, NonPositiveCoefficient for p <= 0 or w <= 0.
CoefficientValues evaluate_coefficients(const ProblemSpec& problem, double x);

/// Same checks, without the interval test (used on truncated subintervals).
CoefficientValues evaluate_coefficients_unchecked(const CoefficientSet& c, double x);

/// Integrability of |1/p|, |s|, |q|, |w| near a finite endpoint.
bool check_regular(const ProblemSpec& problem, Side side, double tol = 1e-6);

/// Geometric probes halving the distance to a finite endpoint, or 2^j toward infinity.
std::vector<double> default_probe_schedule(const ProblemSpec& problem, Side side);

struct ClassificationReport {
    EndpointClass result;
    std::vector<double> probes;
    /// Sorted relative Gram increments per probe interval.
    std::vector<std::array<double, 4>> increments;
    /// Per-direction verdict after the last probe.
    std::array<bool, 4> stable{};
    bool inconclusive = false;
    std::string note;
};

/// Counts square-integrable solutions of l y = i y near the endpoint.
ClassificationReport classify_endpoint_report(const ProblemSpec& problem, Side side,
                                              std::span<const double> probe_schedule, double tol = 1e-6);

/// Throws Inconclusive when the stable and divergent directions are not separated.
EndpointClass classify_endpoint(const ProblemSpec& problem, Side side, std::span<const double> probe_schedule,
                                double tol = 1e-6);

}  // namespace sl4
