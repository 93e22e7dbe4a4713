#pragma once

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "rotolab/map_core.hpp"

namespace rotolab {

/// Value with partial derivatives in x and y.
struct Dual {
    double v = 0.0, dx = 0.0, dy = 0.0;
};

/// Parsed arithmetic expression over x, y, pi and named parameters.
/// Grammar: sums, differences, products, quotients, unary minus, sin, cos, numbers.
class Expression {
public:
    struct Node;

    static Expression parse(const std::string& text, const std::vector<std::string>& param_names);
    Dual eval(double x, double y, const std::vector<double>& params) const;

    Expression();
    ~Expression();
    Expression(const Expression&);
    Expression& operator=(const Expression&);
    Expression(Expression&&) noexcept;
    Expression& operator=(Expression&&) noexcept;

private:
    std::shared_ptr<const Node> root_;
};

/// Family from a JSON descriptor:
///   {"name": "...", "params": {"k": 0.8}, "equivariant": true,
///    "steps": [{"x": "x", "y": "y + k*sin(2*pi*x)"}, {"x": "x + k*sin(2*pi*y)", "y": "y"}]}
/// Steps are applied in order; each one maps the current (x, y).
LiftFamily family_from_json(const nlohmann::json& descriptor);

} // namespace rotolab
