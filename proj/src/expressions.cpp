#include "pdegreedy/expressions.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pdegreedy {

enum class Op { Const, VarX, VarY, Add, Sub, Mul, Neg, Sin, Cos, Exp };

struct Expr::Node {
    Op op;
    double value = 0.0;  // Const only
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_const(double v) {
    auto n = std::make_shared<Expr::Node>();
    n->op = Op::Const;
    n->value = v;
    return n;
}

bool is_const(const NodePtr& n, double v) {
    return n && n->op == Op::Const && n->value == v;
}

// Constant-folding constructors keep derivative trees from ballooning.
NodePtr add(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value + b->value);
    return make(Op::Add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
    if (is_const(b, 0.0)) return a;
    if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value - b->value);
    if (is_const(a, 0.0)) return make(Op::Neg, std::move(b));
    return make(Op::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value * b->value);
    return make(Op::Mul, std::move(a), std::move(b));
}

NodePtr neg(NodePtr a) {
    if (a->op == Op::Const) return make_const(-a->value);
    if (a->op == Op::Neg) return a->a;
    return make(Op::Neg, std::move(a));
}

double eval_node(const Expr::Node* n, double x, double y) {
    switch (n->op) {
        case Op::Const: return n->value;
        case Op::VarX: return x;
        case Op::VarY: return y;
        case Op::Add: return eval_node(n->a.get(), x, y) + eval_node(n->b.get(), x, y);
        case Op::Sub: return eval_node(n->a.get(), x, y) - eval_node(n->b.get(), x, y);
        case Op::Mul: return eval_node(n->a.get(), x, y) * eval_node(n->b.get(), x, y);
        case Op::Neg: return -eval_node(n->a.get(), x, y);
        case Op::Sin: return std::sin(eval_node(n->a.get(), x, y));
        case Op::Cos: return std::cos(eval_node(n->a.get(), x, y));
        case Op::Exp: return std::exp(eval_node(n->a.get(), x, y));
    }
    return 0.0;
}

NodePtr diff(const NodePtr& n, int axis) {
    switch (n->op) {
        case Op::Const: return make_const(0.0);
        case Op::VarX: return make_const(axis == 0 ? 1.0 : 0.0);
        case Op::VarY: return make_const(axis == 1 ? 1.0 : 0.0);
        case Op::Add: return add(diff(n->a, axis), diff(n->b, axis));
        case Op::Sub: return sub(diff(n->a, axis), diff(n->b, axis));
        case Op::Mul: return add(mul(diff(n->a, axis), n->b), mul(n->a, diff(n->b, axis)));
        case Op::Neg: return neg(diff(n->a, axis));
        case Op::Sin: return mul(make(Op::Cos, n->a), diff(n->a, axis));
        case Op::Cos: return neg(mul(make(Op::Sin, n->a), diff(n->a, axis)));
        case Op::Exp: return mul(make(Op::Exp, n->a), diff(n->a, axis));
    }
    return make_const(0.0);
}

void print_node(const Expr::Node* n, std::ostringstream& out) {
    switch (n->op) {
        case Op::Const: out << n->value; break;
        case Op::VarX: out << 'x'; break;
        case Op::VarY: out << 'y'; break;
        case Op::Add:
            out << '(';
            print_node(n->a.get(), out);
            out << " + ";
            print_node(n->b.get(), out);
            out << ')';
            break;
        case Op::Sub:
            out << '(';
            print_node(n->a.get(), out);
            out << " - ";
            print_node(n->b.get(), out);
            out << ')';
            break;
        case Op::Mul:
            out << '(';
            print_node(n->a.get(), out);
            out << " * ";
            print_node(n->b.get(), out);
            out << ')';
            break;
        case Op::Neg:
            out << "(-";
            print_node(n->a.get(), out);
            out << ')';
            break;
        case Op::Sin: out << "sin("; print_node(n->a.get(), out); out << ')'; break;
        case Op::Cos: out << "cos("; print_node(n->a.get(), out); out << ')'; break;
        case Op::Exp: out << "exp("; print_node(n->a.get(), out); out << ')'; break;
    }
}

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    NodePtr run() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing characters");
        return e;
    }

private:
    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            skip_ws();
            if (consume('+')) lhs = add(lhs, term());
            else if (consume('-')) lhs = sub(lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            skip_ws();
            if (consume('*')) lhs = mul(lhs, factor());
            else return lhs;
        }
    }

    NodePtr factor() {
        skip_ws();
        if (consume('-')) return neg(factor());
        return primary();
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return word();
        fail(std::string("unexpected character '") + c + "'");
        return nullptr;
    }

    NodePtr number() {
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return make_const(v);
    }

    NodePtr word() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        std::string w = text_.substr(start, pos_ - start);
        if (w == "x") return make(Op::VarX);
        if (w == "y") return make(Op::VarY);
        if (w == "pi") return make_const(std::numbers::pi);
        Op op;
        if (w == "sin") op = Op::Sin;
        else if (w == "cos") op = Op::Cos;
        else if (w == "exp") op = Op::Exp;
        else { fail("unknown identifier '" + w + "'"); return nullptr; }
        expect('(');
        NodePtr arg = expr();
        expect(')');
        return make(op, std::move(arg));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    void expect(char c) {
        skip_ws();
        if (!consume(c)) fail(std::string("expected '") + c + "'");
    }

    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("expression parse error at offset " + std::to_string(pos_) +
                                    ": " + what + " in \"" + text_ + "\"");
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr Expr::parse(const std::string& text) { return Expr(Parser(text).run()); }

Expr Expr::constant(double v) { return Expr(make_const(v)); }

double Expr::eval(double x, double y) const {
    if (!node_) return 0.0;
    return eval_node(node_.get(), x, y);
}

Expr Expr::derivative(int axis) const {
    if (axis != 0 && axis != 1) throw std::invalid_argument("derivative axis must be 0 or 1");
    if (!node_) return Expr();
    return Expr(diff(node_, axis));
}

Expr Expr::laplacian(int dim) const {
    if (dim < 1 || dim > 2) throw std::invalid_argument("laplacian dim must be 1 or 2");
    Expr out = derivative(0).derivative(0);
    if (dim == 2) out = out + derivative(1).derivative(1);
    return out;
}

Expr Expr::operator+(const Expr& rhs) const {
    if (!node_) return rhs;
    if (!rhs.node_) return *this;
    return Expr(add(node_, rhs.node_));
}

Expr Expr::operator*(const Expr& rhs) const {
    if (!node_ || !rhs.node_) return Expr();
    return Expr(mul(node_, rhs.node_));
}

Expr Expr::operator-() const {
    if (!node_) return Expr();
    return Expr(neg(node_));
}

bool Expr::is_zero() const { return !node_ || (node_->op == Op::Const && node_->value == 0.0); }

std::string Expr::to_string() const {
    if (!node_) return "0";
    std::ostringstream out;
    print_node(node_.get(), out);
    return out.str();
}

}  // namespace pdegreedy
