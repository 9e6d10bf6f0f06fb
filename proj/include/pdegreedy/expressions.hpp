#pragma once

#include <memory>
#include <string>

namespace pdegreedy {

// Closed-form scalar fields on R^1/R^2, built from the grammar
//   expr   := term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := '-' factor | primary
//   primary:= number | 'pi' | 'x' | 'y' | ('sin'|'cos'|'exp') '(' expr ')'
//           | '(' expr ')'
// The node set is closed under differentiation, so exact derivatives of
// parsed fields are available for operator application and consistency
// checks.
class Expr {
public:
    Expr() = default;  // the zero field

    static Expr parse(const std::string& text);
    static Expr constant(double v);

    double eval(double x, double y = 0.0) const;

    // Partial derivative, axis 0 -> d/dx, axis 1 -> d/dy.
    Expr derivative(int axis) const;
    // Sum of second derivatives over the first `dim` axes.
    Expr laplacian(int dim) const;

    Expr operator+(const Expr& rhs) const;
    Expr operator*(const Expr& rhs) const;
    Expr operator-() const;

    bool is_zero() const;
    std::string to_string() const;

    struct Node;  // AST node, defined in the implementation

private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

}  // namespace pdegreedy
