#include "fiocalc/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace fiocalc {

namespace {
enum class Op { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Tan, Exp, Sqrt };
}

struct Expr::Node {
    Op op = Op::Num;
    double value = 0.0;   // Num
    int var = -1;         // Var
    int exponent = 0;     // Pow (integer, may be negative)
    NodePtr a, b;

    static NodePtr num(double v) {
        auto n = std::make_shared<Node>();
        n->op = Op::Num;
        n->value = v;
        return n;
    }
    static NodePtr variable(int idx) {
        auto n = std::make_shared<Node>();
        n->op = Op::Var;
        n->var = idx;
        return n;
    }
    static NodePtr make(Op op, NodePtr a, NodePtr b = nullptr) {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }
    static NodePtr pow(NodePtr base, int k) {
        auto n = std::make_shared<Node>();
        n->op = Op::Pow;
        n->a = std::move(base);
        n->exponent = k;
        return n;
    }
};

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;

class Parser {
public:
    Parser(const std::string& text, const std::vector<std::string>& vars)
        : text_(text), vars_(vars) {}

    NodePtr parse() {
        NodePtr e = sum();
        skip_ws();
        if (pos_ != text_.size())
            throw ValidationError("expression: trailing input at '" + text_.substr(pos_) + "'");
        return e;
    }

private:
    NodePtr sum() {
        NodePtr lhs = product();
        for (;;) {
            skip_ws();
            if (consume('+'))
                lhs = Node::make(Op::Add, lhs, product());
            else if (consume('-'))
                lhs = Node::make(Op::Sub, lhs, product());
            else
                return lhs;
        }
    }

    NodePtr product() {
        NodePtr lhs = unary();
        for (;;) {
            skip_ws();
            if (consume('*'))
                lhs = Node::make(Op::Mul, lhs, unary());
            else if (consume('/'))
                lhs = Node::make(Op::Div, lhs, unary());
            else
                return lhs;
        }
    }

    NodePtr unary() {
        skip_ws();
        if (consume('-')) return Node::make(Op::Neg, unary());
        if (consume('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        skip_ws();
        if (!consume('^')) return base;
        skip_ws();
        const bool paren = consume('(');
        skip_ws();
        int sign = 1;
        if (consume('-')) sign = -1;
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == start) throw ValidationError("expression: expected integer exponent after '^'");
        const int k = sign * std::stoi(text_.substr(start, pos_ - start));
        skip_ws();
        if (paren && !consume(')'))
            throw ValidationError("expression: missing ')' after exponent");
        return Node::pow(base, k);
    }

    NodePtr atom() {
        skip_ws();
        if (consume('(')) {
            NodePtr e = sum();
            skip_ws();
            if (!consume(')')) throw ValidationError("expression: missing ')'");
            return e;
        }
        if (pos_ < text_.size() &&
            (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
            std::size_t used = 0;
            const double v = std::stod(text_.substr(pos_), &used);
            pos_ += used;
            return Node::num(v);
        }
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        if (pos_ == start) throw ValidationError("expression: unexpected character in '" + text_ + "'");
        const std::string word = text_.substr(start, pos_ - start);
        if (word == "pi") return Node::num(M_PI);
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            Op op;
            if (word == "sin") op = Op::Sin;
            else if (word == "cos") op = Op::Cos;
            else if (word == "tan") op = Op::Tan;
            else if (word == "exp") op = Op::Exp;
            else if (word == "sqrt") op = Op::Sqrt;
            else throw ValidationError("expression: unknown function '" + word + "'");
            consume('(');
            NodePtr arg = sum();
            skip_ws();
            if (!consume(')')) throw ValidationError("expression: missing ')' after " + word);
            return Node::make(op, arg);
        }
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i] == word) return Node::variable(static_cast<int>(i));
        throw ValidationError("expression: unknown variable '" + word + "'");
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool consume(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    const std::string& text_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
};

double eval_node(const Node& n, std::span<const double> x) {
    switch (n.op) {
        case Op::Num: return n.value;
        case Op::Var: return x[static_cast<std::size_t>(n.var)];
        case Op::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
        case Op::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
        case Op::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
        case Op::Div: return eval_node(*n.a, x) / eval_node(*n.b, x);
        case Op::Pow: return std::pow(eval_node(*n.a, x), n.exponent);
        case Op::Neg: return -eval_node(*n.a, x);
        case Op::Sin: return std::sin(eval_node(*n.a, x));
        case Op::Cos: return std::cos(eval_node(*n.a, x));
        case Op::Tan: return std::tan(eval_node(*n.a, x));
        case Op::Exp: return std::exp(eval_node(*n.a, x));
        case Op::Sqrt: return std::sqrt(eval_node(*n.a, x));
    }
    throw NumericsError("expression: corrupt node");
}

NodePtr diff_node(const NodePtr& n, int var) {
    switch (n->op) {
        case Op::Num: return Node::num(0.0);
        case Op::Var: return Node::num(n->var == var ? 1.0 : 0.0);
        case Op::Add: return Node::make(Op::Add, diff_node(n->a, var), diff_node(n->b, var));
        case Op::Sub: return Node::make(Op::Sub, diff_node(n->a, var), diff_node(n->b, var));
        case Op::Mul:
            return Node::make(Op::Add, Node::make(Op::Mul, diff_node(n->a, var), n->b),
                              Node::make(Op::Mul, n->a, diff_node(n->b, var)));
        case Op::Div:
            // (a/b)' = a'/b - a b'/b^2
            return Node::make(
                Op::Sub, Node::make(Op::Div, diff_node(n->a, var), n->b),
                Node::make(Op::Div, Node::make(Op::Mul, n->a, diff_node(n->b, var)),
                           Node::pow(n->b, 2)));
        case Op::Pow:
            if (n->exponent == 0) return Node::num(0.0);
            return Node::make(Op::Mul,
                              Node::make(Op::Mul, Node::num(n->exponent),
                                         Node::pow(n->a, n->exponent - 1)),
                              diff_node(n->a, var));
        case Op::Neg: return Node::make(Op::Neg, diff_node(n->a, var));
        case Op::Sin:
            return Node::make(Op::Mul, Node::make(Op::Cos, n->a), diff_node(n->a, var));
        case Op::Cos:
            return Node::make(Op::Neg,
                              Node::make(Op::Mul, Node::make(Op::Sin, n->a), diff_node(n->a, var)));
        case Op::Tan: {
            NodePtr sec2 = Node::make(Op::Add, Node::num(1.0), Node::pow(Node::make(Op::Tan, n->a), 2));
            return Node::make(Op::Mul, sec2, diff_node(n->a, var));
        }
        case Op::Exp:
            return Node::make(Op::Mul, Node::make(Op::Exp, n->a), diff_node(n->a, var));
        case Op::Sqrt:
            // (sqrt a)' = a' / (2 sqrt a)
            return Node::make(Op::Div, diff_node(n->a, var),
                              Node::make(Op::Mul, Node::num(2.0), Node::make(Op::Sqrt, n->a)));
    }
    throw NumericsError("expression: corrupt node");
}

void print_node(const Node& n, const std::vector<std::string>& vars, std::ostream& os) {
    switch (n.op) {
        case Op::Num: os << n.value; return;
        case Op::Var: os << vars[static_cast<std::size_t>(n.var)]; return;
        case Op::Add: os << '('; print_node(*n.a, vars, os); os << '+'; print_node(*n.b, vars, os); os << ')'; return;
        case Op::Sub: os << '('; print_node(*n.a, vars, os); os << '-'; print_node(*n.b, vars, os); os << ')'; return;
        case Op::Mul: os << '('; print_node(*n.a, vars, os); os << '*'; print_node(*n.b, vars, os); os << ')'; return;
        case Op::Div: os << '('; print_node(*n.a, vars, os); os << '/'; print_node(*n.b, vars, os); os << ')'; return;
        case Op::Pow: print_node(*n.a, vars, os); os << "^(" << n.exponent << ')'; return;
        case Op::Neg: os << "(-"; print_node(*n.a, vars, os); os << ')'; return;
        case Op::Sin: os << "sin("; print_node(*n.a, vars, os); os << ')'; return;
        case Op::Cos: os << "cos("; print_node(*n.a, vars, os); os << ')'; return;
        case Op::Tan: os << "tan("; print_node(*n.a, vars, os); os << ')'; return;
        case Op::Exp: os << "exp("; print_node(*n.a, vars, os); os << ')'; return;
        case Op::Sqrt: os << "sqrt("; print_node(*n.a, vars, os); os << ')'; return;
    }
}

}  // namespace

Expr Expr::parse(const std::string& text, std::vector<std::string> variables) {
    Parser parser(text, variables);
    NodePtr root = parser.parse();
    return Expr(std::move(root), std::move(variables));
}

double Expr::eval(std::span<const double> values) const {
    if (!root_) throw ValidationError("expression: empty");
    if (values.size() < vars_.size()) throw ValidationError("expression: missing variable values");
    return eval_node(*root_, values);
}

Expr Expr::derivative(const std::string& variable) const {
    if (!root_) throw ValidationError("expression: empty");
    int idx = -1;
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i] == variable) idx = static_cast<int>(i);
    if (idx < 0) throw ValidationError("expression: unknown variable '" + variable + "'");
    return Expr(diff_node(root_, idx), vars_);
}

std::string Expr::text() const {
    if (!root_) return "";
    std::ostringstream os;
    print_node(*root_, vars_, os);
    return os.str();
}

}  // namespace fiocalc
