#include "conflab/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <vector>

#include "conflab/errors.hpp"

namespace conflab {

struct Expression::Node {
    enum class Op { Number, Coord, Add, Sub, Mul, Div, Neg, Sin, Cos, Exp, Pow };
    Op op = Op::Number;
    double value = 0.0;  // Number: the literal; Pow: the exponent
    int coord = 0;       // Coord: 1-based axis
    std::unique_ptr<Node> left;
    std::unique_ptr<Node> right;
};

namespace {

using Node = Expression::Node;
using Op = Node::Op;

/// Recursive-descent parser over the raw text.  Grammar:
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          exponent must be constant
///   primary := number | name | name '(' expr ')' | '(' expr ')'
class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    std::unique_ptr<Node> run() {
        auto node = parseExpr();
        skipSpace();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return node;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream msg;
        msg << "expression error at position " << pos_ << " in \"" << text_ << "\": " << what;
        fail_config(msg.str());
    }

    void skipSpace() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skipSpace();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skipSpace();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    std::unique_ptr<Node> parseExpr() {
        auto node = parseTerm();
        while (true) {
            if (consume('+'))
                node = binary(Op::Add, std::move(node), parseTerm());
            else if (consume('-'))
                node = binary(Op::Sub, std::move(node), parseTerm());
            else
                return node;
        }
    }

    std::unique_ptr<Node> parseTerm() {
        auto node = parseUnary();
        while (true) {
            if (consume('*'))
                node = binary(Op::Mul, std::move(node), parseUnary());
            else if (consume('/'))
                node = binary(Op::Div, std::move(node), parseUnary());
            else
                return node;
        }
    }

    std::unique_ptr<Node> parseUnary() {
        if (consume('-')) {
            auto node = std::make_unique<Node>();
            node->op = Op::Neg;
            node->left = parseUnary();
            return node;
        }
        return parsePower();
    }

    std::unique_ptr<Node> parsePower() {
        auto base = parsePrimary();
        if (!consume('^')) return base;
        auto exponent = parseUnary();
        if (usesCoordinate(*exponent)) fail("the exponent of ^ must be a constant");
        auto node = std::make_unique<Node>();
        node->op = Op::Pow;
        node->value = evalConstant(*exponent);
        node->left = std::move(base);
        return node;
    }

    std::unique_ptr<Node> parsePrimary() {
        const char c = peek();
        if (c == '(') {
            ++pos_;
            auto node = parseExpr();
            if (!consume(')')) fail("expected ')'");
            return node;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parseNumber();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parseName();
        fail("expected a number, name, or '('");
    }

    std::unique_ptr<Node> parseNumber() {
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        auto node = std::make_unique<Node>();
        node->op = Op::Number;
        node->value = v;
        return node;
    }

    std::unique_ptr<Node> parseName() {
        std::string name;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            name += text_[pos_++];

        if (name == "pi") return number(std::numbers::pi);
        if (int axis = coordinateAxis(name); axis > 0) {
            auto node = std::make_unique<Node>();
            node->op = Op::Coord;
            node->coord = axis;
            return node;
        }
        Op fn;
        if (name == "sin")
            fn = Op::Sin;
        else if (name == "cos")
            fn = Op::Cos;
        else if (name == "exp")
            fn = Op::Exp;
        else
            fail("unknown name \"" + name +
                 "\" (allowed: pi, x, y, z, w, x1..x5, sin, cos, exp)");
        if (!consume('(')) fail("\"" + name + "\" needs a parenthesized argument");
        auto node = std::make_unique<Node>();
        node->op = fn;
        node->left = parseExpr();
        if (!consume(')')) fail("expected ')'");
        return node;
    }

    static int coordinateAxis(const std::string& name) {
        if (name == "x") return 1;
        if (name == "y") return 2;
        if (name == "z") return 3;
        if (name == "w") return 4;
        if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '5')
            return name[1] - '0';
        return 0;
    }

    static std::unique_ptr<Node> number(double v) {
        auto node = std::make_unique<Node>();
        node->op = Op::Number;
        node->value = v;
        return node;
    }

    static std::unique_ptr<Node> binary(Op op, std::unique_ptr<Node> l, std::unique_ptr<Node> r) {
        auto node = std::make_unique<Node>();
        node->op = op;
        node->left = std::move(l);
        node->right = std::move(r);
        return node;
    }

    static bool usesCoordinate(const Node& n) {
        if (n.op == Op::Coord) return true;
        return (n.left && usesCoordinate(*n.left)) || (n.right && usesCoordinate(*n.right));
    }

    static double evalConstant(const Node& n);

    const std::string& text_;
    std::size_t pos_ = 0;
};

double eval_node(const Node& n, const std::array<double, kMaxDim>& x) {
    switch (n.op) {
    case Op::Number: return n.value;
    case Op::Coord: return x[static_cast<std::size_t>(n.coord - 1)];
    case Op::Add: return eval_node(*n.left, x) + eval_node(*n.right, x);
    case Op::Sub: return eval_node(*n.left, x) - eval_node(*n.right, x);
    case Op::Mul: return eval_node(*n.left, x) * eval_node(*n.right, x);
    case Op::Div: return eval_node(*n.left, x) / eval_node(*n.right, x);
    case Op::Neg: return -eval_node(*n.left, x);
    case Op::Sin: return std::sin(eval_node(*n.left, x));
    case Op::Cos: return std::cos(eval_node(*n.left, x));
    case Op::Exp: return std::exp(eval_node(*n.left, x));
    case Op::Pow: return std::pow(eval_node(*n.left, x), n.value);
    }
    return 0.0;
}

double Parser::evalConstant(const Node& n) {
    return eval_node(n, std::array<double, kMaxDim>{});
}

int max_coordinate(const Node& n) {
    int m = n.op == Op::Coord ? n.coord : 0;
    if (n.left) m = std::max(m, max_coordinate(*n.left));
    if (n.right) m = std::max(m, max_coordinate(*n.right));
    return m;
}

void check_dimension(const ChartGrid& grid, const Expression& e) {
    if (e.maxCoordinate() > grid.dim()) {
        std::ostringstream msg;
        msg << "expression \"" << e.text() << "\" uses coordinate x" << e.maxCoordinate()
            << " on an n = " << grid.dim() << " grid";
        fail_config(msg.str());
    }
}

[[noreturn]] void fail_non_finite(const Expression& e, std::int64_t node) {
    std::ostringstream msg;
    msg << "expression \"" << e.text() << "\" is not finite at node " << node;
    fail_config(msg.str());
}

}  // namespace

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.root_ = Parser(text).run();
    e.text_ = text;
    e.maxCoord_ = max_coordinate(*e.root_);
    return e;
}

double Expression::eval(const std::array<double, kMaxDim>& x) const {
    return eval_node(*root_, x);
}

ScalarField sample_expression(const ChartGrid& grid, const Expression& e) {
    check_dimension(grid, e);
    ScalarField out(grid);
    for (std::int64_t i = 0; i < grid.nodeCount(); ++i) {
        out[i] = e.eval(grid.position(i));
        if (!std::isfinite(out[i])) fail_non_finite(e, i);
    }
    return out;
}

BoundaryField sample_boundary_expression(const ChartGrid& grid, const Expression& e) {
    check_dimension(grid, e);
    BoundaryField out(grid);
    for (std::int64_t b = 0; b < out.size(); ++b) {
        out[b] = e.eval(grid.position(grid.boundaryToGrid(b)));
        if (!std::isfinite(out[b])) fail_non_finite(e, grid.boundaryToGrid(b));
    }
    return out;
}

}  // namespace conflab
