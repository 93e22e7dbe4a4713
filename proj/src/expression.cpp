#include "rotolab/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "rotolab/error.hpp"

namespace rotolab {

struct Expression::Node {
    enum class Op { Const, X, Y, Param, Add, Sub, Mul, Div, Neg, Sin, Cos } op = Op::Const;
    double value = 0.0;
    std::size_t param = 0;
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr leaf(Op op, double value = 0.0, std::size_t param = 0)
{
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->value = value;
    n->param = param;
    return n;
}

NodePtr branch(Op op, NodePtr lhs, NodePtr rhs = nullptr)
{
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

class Parser {
public:
    Parser(const std::string& text, const std::vector<std::string>& names) : s_(text), names_(names) {}

    NodePtr parse()
    {
        NodePtr e = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return e;
    }

private:
    const std::string& s_;
    const std::vector<std::string>& names_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const
    {
        throw Error(ErrorKind::Config, "expression '" + s_ + "': " + what + " at offset " + std::to_string(pos_));
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr sum()
    {
        NodePtr e = product();
        for (;;) {
            if (accept('+')) e = branch(Op::Add, e, product());
            else if (accept('-')) e = branch(Op::Sub, e, product());
            else return e;
        }
    }

    NodePtr product()
    {
        NodePtr e = unary();
        for (;;) {
            if (accept('*')) e = branch(Op::Mul, e, unary());
            else if (accept('/')) e = branch(Op::Div, e, unary());
            else return e;
        }
    }

    NodePtr unary()
    {
        if (accept('-')) return branch(Op::Neg, unary());
        if (accept('+')) return unary();
        return primary();
    }

    NodePtr primary()
    {
        skip();
        if (accept('(')) {
            NodePtr e = sum();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (pos_ >= s_.size()) fail("unexpected end");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(s_.substr(pos_), &used);
            } catch (const std::exception&) {
                fail("bad number");
            }
            pos_ += used;
            return leaf(Op::Const, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string id = s_.substr(start, pos_ - start);
            if (id == "sin" || id == "cos") {
                if (!accept('(')) fail("expected '(' after " + id);
                NodePtr arg = sum();
                if (!accept(')')) fail("expected ')'");
                return branch(id == "sin" ? Op::Sin : Op::Cos, arg);
            }
            if (id == "x") return leaf(Op::X);
            if (id == "y") return leaf(Op::Y);
            if (id == "pi") return leaf(Op::Const, std::numbers::pi);
            for (std::size_t i = 0; i < names_.size(); ++i)
                if (names_[i] == id) return leaf(Op::Param, 0.0, i);
            fail("unknown identifier '" + id + "'");
        }
        fail("unexpected character");
    }
};

Dual eval_node(const Expression::Node& n, double x, double y, const std::vector<double>& params)
{
    switch (n.op) {
    case Op::Const: return {n.value, 0.0, 0.0};
    case Op::X: return {x, 1.0, 0.0};
    case Op::Y: return {y, 0.0, 1.0};
    case Op::Param: return {params.at(n.param), 0.0, 0.0};
    case Op::Neg: {
        const Dual a = eval_node(*n.lhs, x, y, params);
        return {-a.v, -a.dx, -a.dy};
    }
    case Op::Sin: {
        const Dual a = eval_node(*n.lhs, x, y, params);
        const double c = std::cos(a.v);
        return {std::sin(a.v), c * a.dx, c * a.dy};
    }
    case Op::Cos: {
        const Dual a = eval_node(*n.lhs, x, y, params);
        const double s = -std::sin(a.v);
        return {std::cos(a.v), s * a.dx, s * a.dy};
    }
    default: break;
    }
    const Dual a = eval_node(*n.lhs, x, y, params);
    const Dual b = eval_node(*n.rhs, x, y, params);
    switch (n.op) {
    case Op::Add: return {a.v + b.v, a.dx + b.dx, a.dy + b.dy};
    case Op::Sub: return {a.v - b.v, a.dx - b.dx, a.dy - b.dy};
    case Op::Mul: return {a.v * b.v, a.dx * b.v + a.v * b.dx, a.dy * b.v + a.v * b.dy};
    default: {
        const double inv = 1.0 / b.v;
        const double q = a.v * inv;
        return {q, (a.dx - q * b.dx) * inv, (a.dy - q * b.dy) * inv};
    }
    }
}

} // namespace

Expression::Expression() = default;
Expression::~Expression() = default;
Expression::Expression(const Expression&) = default;
Expression& Expression::operator=(const Expression&) = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;

Expression Expression::parse(const std::string& text, const std::vector<std::string>& param_names)
{
    Expression e;
    e.root_ = Parser(text, param_names).parse();
    return e;
}

Dual Expression::eval(double x, double y, const std::vector<double>& params) const
{
    if (!root_) throw Error(ErrorKind::Config, "empty expression");
    return eval_node(*root_, x, y, params);
}

LiftFamily family_from_json(const nlohmann::json& descriptor)
{
    if (!descriptor.is_object() || !descriptor.contains("steps") || !descriptor["steps"].is_array())
        throw Error(ErrorKind::Config, "family descriptor needs a 'steps' array");
    LiftFamily fam;
    fam.name = descriptor.value("name", std::string("custom"));
    fam.equivariant = descriptor.value("equivariant", true);
    if (descriptor.contains("params")) {
        for (const auto& [key, value] : descriptor["params"].items()) {
            if (!value.is_number()) throw Error(ErrorKind::Config, "parameter '" + key + "' must be a number");
            fam.param_names.push_back(key);
            fam.defaults.push_back(value.get<double>());
        }
    }
    struct Step {
        Expression fx, fy;
    };
    std::vector<Step> steps;
    for (const auto& st : descriptor["steps"]) {
        if (!st.contains("x") || !st.contains("y") || !st["x"].is_string() || !st["y"].is_string())
            throw Error(ErrorKind::Config, "each step needs string fields 'x' and 'y'");
        steps.push_back({Expression::parse(st["x"].get<std::string>(), fam.param_names),
                         Expression::parse(st["y"].get<std::string>(), fam.param_names)});
    }
    if (steps.empty()) throw Error(ErrorKind::Config, "family descriptor has no steps");

    fam.binder = [steps](const std::vector<double>& v) {
        auto f = [steps, v](PlanePoint z) {
            for (const auto& st : steps) z = {st.fx.eval(z.x, z.y, v).v, st.fy.eval(z.x, z.y, v).v};
            return z;
        };
        auto jac = [steps, v](PlanePoint z) {
            Mat2 J = Mat2::identity();
            for (const auto& st : steps) {
                const Dual a = st.fx.eval(z.x, z.y, v), b = st.fy.eval(z.x, z.y, v);
                J = Mat2{a.dx, a.dy, b.dx, b.dy} * J;
                z = {a.v, b.v};
            }
            return J;
        };
        std::vector<BoundLift> parts;
        for (const auto& st : steps) {
            auto sf = [st, v](PlanePoint z) { return PlanePoint{st.fx.eval(z.x, z.y, v).v, st.fy.eval(z.x, z.y, v).v}; };
            auto sj = [st, v](PlanePoint z) {
                const Dual a = st.fx.eval(z.x, z.y, v), b = st.fy.eval(z.x, z.y, v);
                return Mat2{a.dx, a.dy, b.dx, b.dy};
            };
            parts.push_back(BoundLift{sf, {}, sj});
        }
        BoundLift lift{f, {}, jac};
        lift.inverse = [parts](PlanePoint z) {
            for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
                const PlanePoint guess = z - ((*it)(z) - z);
                z = newton_inverse(*it, z, guess);
            }
            return z;
        };
        return lift;
    };
    return fam;
}

} // namespace rotolab
