#pragma once

#include "fiocalc/common.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fiocalc {

/// A parsed scalar expression over named variables.
///
/// Grammar: numeric literals, variables, + - * /, integer powers via ^
/// (negative exponents allowed), parentheses, and the calls
/// sin, cos, tan, exp, sqrt.  This is the grammar used by the JSON
/// catalog entries ("y+y^3", "(1+0.3*sin(x1))^(-2)", ...).
class Expr {
public:
    Expr() = default;

    /// Parse `text` over the given variable names.  Throws ValidationError
    /// on syntax errors or unknown identifiers.
    static Expr parse(const std::string& text, std::vector<std::string> variables);

    double eval(std::span<const double> values) const;

    /// Symbolic derivative with respect to the named variable.
    Expr derivative(const std::string& variable) const;

    const std::vector<std::string>& variables() const { return vars_; }
    std::string text() const;
    bool empty() const { return !root_; }

    struct Node;

private:
    using NodePtr = std::shared_ptr<const Node>;
    Expr(NodePtr root, std::vector<std::string> vars)
        : root_(std::move(root)), vars_(std::move(vars)) {}

    NodePtr root_;
    std::vector<std::string> vars_;
};

}  // namespace fiocalc
