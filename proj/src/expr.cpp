#include "pencilrange/expr.hpp"

#include <cctype>
#include <cmath>
#include <memory>

namespace pencilrange {

namespace {

struct Node {
    enum class Op {
        Const,
        Var,
        Add,
        Sub,
        Mul,
        Div,
        Pow,
        Neg,
        Exp,
        Sin,
        Cos,
        Abs,
        Sign,
        Step,
    };
    Op op;
    cplx value{0, 0};
    std::shared_ptr<Node> lhs, rhs;

    cplx eval(double x) const {
        switch (op) {
            case Op::Const: return value;
            case Op::Var: return {x, 0.0};
            case Op::Add: return lhs->eval(x) + rhs->eval(x);
            case Op::Sub: return lhs->eval(x) - rhs->eval(x);
            case Op::Mul: return lhs->eval(x) * rhs->eval(x);
            case Op::Div: return lhs->eval(x) / rhs->eval(x);
            case Op::Pow: {
                const cplx base = lhs->eval(x);
                const cplx e = rhs->eval(x);
                // integer powers stay exact for real bases
                if (e.imag() == 0.0 && e.real() == std::floor(e.real()) &&
                    std::abs(e.real()) <= 64.0) {
                    cplx acc(1, 0);
                    const long n = std::lround(std::abs(e.real()));
                    for (long k = 0; k < n; ++k) acc *= base;
                    return e.real() >= 0.0 ? acc : 1.0 / acc;
                }
                return std::pow(base, e);
            }
            case Op::Neg: return -lhs->eval(x);
            case Op::Exp: return std::exp(lhs->eval(x));
            case Op::Sin: return std::sin(lhs->eval(x));
            case Op::Cos: return std::cos(lhs->eval(x));
            case Op::Abs: return {std::abs(lhs->eval(x)), 0.0};
            case Op::Sign: {
                const cplx v = lhs->eval(x);
                const double m = std::abs(v);
                return m == 0.0 ? cplx(0, 0) : v / m;
            }
            case Op::Step: {
                const double a = lhs->eval(x).real();
                const double b = rhs->eval(x).real();
                return (x >= a && x <= b) ? cplx(1, 0) : cplx(0, 0);
            }
        }
        return {0, 0};
    }
};

using NodePtr = std::shared_ptr<Node>;

NodePtr make(Node::Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

NodePtr constant(cplx v) {
    auto n = make(Node::Op::Const);
    n->value = v;
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("expression error at position " + std::to_string(pos_) + ": " + what +
                          " in \"" + s_ + "\"");
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (consume('+'))
                lhs = make(Node::Op::Add, lhs, term());
            else if (consume('-'))
                lhs = make(Node::Op::Sub, lhs, term());
            else
                return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (consume('*'))
                lhs = make(Node::Op::Mul, lhs, factor());
            else if (consume('/'))
                lhs = make(Node::Op::Div, lhs, factor());
            else
                return lhs;
        }
    }

    NodePtr factor() {
        // unary minus binds looser than ^: -x^2 is -(x^2)
        if (consume('-')) return make(Node::Op::Neg, factor());
        if (consume('+')) return factor();
        NodePtr base = primary();
        if (consume('^')) return make(Node::Op::Pow, base, factor());  // right assoc
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!consume(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        fail("unexpected character");
    }

    NodePtr number() {
        std::size_t end = pos_;
        while (end < s_.size() &&
               (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
                s_[end] == 'e' || s_[end] == 'E' ||
                ((s_[end] == '+' || s_[end] == '-') && end > pos_ &&
                 (s_[end - 1] == 'e' || s_[end - 1] == 'E'))))
            ++end;
        const std::string lit = s_.substr(pos_, end - pos_);
        try {
            const double v = std::stod(lit);
            pos_ = end;
            return constant({v, 0.0});
        } catch (...) {
            fail("bad numeric literal '" + lit + "'");
        }
    }

    NodePtr identifier() {
        std::size_t end = pos_;
        while (end < s_.size() && std::isalpha(static_cast<unsigned char>(s_[end]))) ++end;
        const std::string name = s_.substr(pos_, end - pos_);
        pos_ = end;
        if (name == "x") return make(Node::Op::Var);
        if (name == "i") return constant({0.0, 1.0});
        auto unary_fn = [&](Node::Op op) {
            if (!consume('(')) fail("expected '(' after " + name);
            NodePtr arg = expr();
            if (!consume(')')) fail("expected ')'");
            return make(op, arg);
        };
        if (name == "exp") return unary_fn(Node::Op::Exp);
        if (name == "sin") return unary_fn(Node::Op::Sin);
        if (name == "cos") return unary_fn(Node::Op::Cos);
        if (name == "abs") return unary_fn(Node::Op::Abs);
        if (name == "sign") return unary_fn(Node::Op::Sign);
        if (name == "step") {
            if (!consume('(')) fail("expected '(' after step");
            NodePtr a = expr();
            if (!consume(',')) fail("expected ',' in step(a,b)");
            NodePtr b = expr();
            if (!consume(')')) fail("expected ')'");
            return make(Node::Op::Step, a, b);
        }
        fail("unknown identifier '" + name + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace

ScalarFn parse_expression(const std::string& text) {
    Parser parser(text);
    NodePtr root = parser.parse();
    return [root](double x) { return root->eval(x); };
}

}  // namespace pencilrange
