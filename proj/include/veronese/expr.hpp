#pragma once

// A small expression language for user-supplied functions of x1, x2, x3.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | power
//   power  := atom ('^' int_literal)*        (right associative)
//   atom   := number | x1 | x2 | x3 | exp(expr) | ln(expr) | sqrt(expr)
//           | '(' expr ')'
//
// Precedence: ^  >  unary -  >  * /  >  + -.  Exponents are integer literals
// only; general powers are written through exp/ln.  There is no implicit
// multiplication: "2x1" is a syntax error.

#include <veronese/error.hpp>
#include <veronese/field.hpp>

#include <cctype>
#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace veronese {

class Expression {
  public:
    enum class Kind { Number, Variable, Add, Sub, Mul, Div, Neg, IntPow, Exp, Ln, Sqrt };

    struct Node {
        Kind kind;
        double number = 0.0; // Number
        int axis = 0;        // Variable, 1..3
        int exponent = 0;    // IntPow
        std::shared_ptr<const Node> lhs, rhs;
    };

    Expression() = default;
    explicit Expression(std::shared_ptr<const Node> r) : root_(std::move(r)) {}

    const Node& node() const { return *root_; }
    bool valid() const { return static_cast<bool>(root_); }

    static Expression number(double v)
    {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Number;
        n->number = v;
        return Expression(n);
    }

    static Expression variable(int axis)
    {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Variable;
        n->axis = axis;
        return Expression(n);
    }

    static Expression unary(Kind k, Expression a)
    {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->lhs = a.root_;
        return Expression(n);
    }

    static Expression binary(Kind k, Expression a, Expression b)
    {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->lhs = a.root_;
        n->rhs = b.root_;
        return Expression(n);
    }

    static Expression int_pow(Expression a, int e)
    {
        auto n = std::make_shared<Node>();
        n->kind = Kind::IntPow;
        n->exponent = e;
        n->lhs = a.root_;
        return Expression(n);
    }

  private:
    std::shared_ptr<const Node> root_;
};

namespace detail {

struct Token {
    enum class Type { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

    Token() = default;
    Token(Type t, std::size_t at) : type(t), offset(at) {}

    Type type = Type::End;
    std::size_t offset = 0;
    double number = 0.0;
    bool integral = false; // Number tokens: no fraction, no exponent part
    std::string text;
};

class Lexer {
  public:
    explicit Lexer(std::string_view s) : src_(s) {}

    Token next()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::size_t at = pos_;
        if (pos_ >= src_.size()) return {Token::Type::End, at};
        const char c = src_[pos_];
        switch (c) {
            case '+': ++pos_; return {Token::Type::Plus, at};
            case '-': ++pos_; return {Token::Type::Minus, at};
            case '*': ++pos_; return {Token::Type::Star, at};
            case '/': ++pos_; return {Token::Type::Slash, at};
            case '^': ++pos_; return {Token::Type::Caret, at};
            case '(': ++pos_; return {Token::Type::LParen, at};
            case ')': ++pos_; return {Token::Type::RParen, at};
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number(at);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
                ++end;
            Token t{Token::Type::Ident, at};
            t.text = std::string(src_.substr(pos_, end - pos_));
            pos_ = end;
            return t;
        }
        throw parse_error("unexpected character '" + std::string(1, c) + "'", at,
                          "number, identifier, operator or parenthesis");
    }

  private:
    Token lex_number(std::size_t at)
    {
        std::size_t end = pos_;
        bool integral = true;
        while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
        if (end < src_.size() && src_[end] == '.') {
            integral = false;
            ++end;
            while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
        }
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t e = end + 1;
            if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
            if (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) {
                integral = false;
                while (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) ++e;
                end = e;
            }
        }
        Token t{Token::Type::Number, at};
        t.text = std::string(src_.substr(pos_, end - pos_));
        t.number = std::stod(t.text);
        t.integral = integral;
        pos_ = end;
        return t;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

class Parser {
  public:
    explicit Parser(std::string_view s) : lex_(s) { advance(); }

    Expression run()
    {
        Expression e = expr();
        expect_end();
        return e;
    }

  private:
    using T = Token::Type;

    void advance() { tok_ = lex_.next(); }

    void expect_end()
    {
        if (tok_.type != T::End)
            throw parse_error("trailing input", tok_.offset, "operator or end of input");
    }

    Expression expr()
    {
        Expression e = term();
        while (tok_.type == T::Plus || tok_.type == T::Minus) {
            const bool plus = tok_.type == T::Plus;
            advance();
            e = Expression::binary(plus ? Expression::Kind::Add : Expression::Kind::Sub, e, term());
        }
        return e;
    }

    Expression term()
    {
        Expression e = factor();
        while (tok_.type == T::Star || tok_.type == T::Slash) {
            const bool mul = tok_.type == T::Star;
            advance();
            e = Expression::binary(mul ? Expression::Kind::Mul : Expression::Kind::Div, e, factor());
        }
        return e;
    }

    Expression factor()
    {
        if (tok_.type == T::Minus) {
            advance();
            return Expression::unary(Expression::Kind::Neg, factor());
        }
        return power();
    }

    Expression power()
    {
        Expression base = atom();
        if (tok_.type != T::Caret) return base;
        advance();
        return Expression::int_pow(base, exponent_chain());
    }

    // int ('^' int ...)* folded right-associatively in integer arithmetic
    int exponent_chain()
    {
        const int e = int_literal();
        if (tok_.type != T::Caret) return e;
        advance();
        const int rest = exponent_chain();
        double v = 1.0;
        for (int i = 0; i < rest; ++i) v *= e;
        if (rest < 0 || std::fabs(v) > 1e9)
            throw parse_error("exponent tower out of range", tok_.offset, "small integer exponent");
        return static_cast<int>(v);
    }

    int int_literal()
    {
        bool neg = false;
        if (tok_.type == T::Minus) {
            neg = true;
            advance();
        }
        if (tok_.type != T::Number)
            throw parse_error("exponent must be an integer literal", tok_.offset, "integer literal");
        if (!tok_.integral || tok_.number != std::floor(tok_.number) || std::fabs(tok_.number) > 1e6)
            throw parse_error("exponent must be an integer literal", tok_.offset, "integer literal");
        const int v = static_cast<int>(tok_.number);
        advance();
        return neg ? -v : v;
    }

    Expression atom()
    {
        switch (tok_.type) {
            case T::Number: {
                Expression e = Expression::number(tok_.number);
                advance();
                return e;
            }
            case T::Ident: {
                const std::string name = tok_.text;
                const std::size_t at = tok_.offset;
                advance();
                if (name == "x1") return Expression::variable(1);
                if (name == "x2") return Expression::variable(2);
                if (name == "x3") return Expression::variable(3);
                Expression::Kind k;
                if (name == "exp") k = Expression::Kind::Exp;
                else if (name == "ln") k = Expression::Kind::Ln;
                else if (name == "sqrt") k = Expression::Kind::Sqrt;
                else throw parse_error("unknown identifier '" + name + "'", at,
                                       "x1, x2, x3, exp, ln or sqrt");
                if (tok_.type != T::LParen)
                    throw parse_error("function '" + name + "' needs an argument list",
                                      tok_.offset, "'('");
                advance();
                Expression arg = expr();
                if (tok_.type != T::RParen)
                    throw parse_error("unbalanced parenthesis", tok_.offset, "')'");
                advance();
                return Expression::unary(k, arg);
            }
            case T::LParen: {
                advance();
                Expression e = expr();
                if (tok_.type != T::RParen)
                    throw parse_error("unbalanced parenthesis", tok_.offset, "')'");
                advance();
                return e;
            }
            default:
                throw parse_error("expected an operand", tok_.offset,
                                  "number, variable, function or '('");
        }
    }

    Lexer lex_;
    Token tok_{};
};

inline Jet3 eval_node(const Expression::Node& n, const Vec3& p)
{
    using K = Expression::Kind;
    switch (n.kind) {
        case K::Number: return jet_constant(n.number);
        case K::Variable: return jet_coordinate(n.axis, p);
        case K::Add: return eval_node(*n.lhs, p) + eval_node(*n.rhs, p);
        case K::Sub: return eval_node(*n.lhs, p) - eval_node(*n.rhs, p);
        case K::Mul: return eval_node(*n.lhs, p) * eval_node(*n.rhs, p);
        case K::Div: return eval_node(*n.lhs, p) / eval_node(*n.rhs, p);
        case K::Neg: return -eval_node(*n.lhs, p);
        case K::IntPow: return jet_ipow(eval_node(*n.lhs, p), n.exponent);
        case K::Exp: return jet_exp(eval_node(*n.lhs, p));
        case K::Ln: return jet_ln(eval_node(*n.lhs, p));
        case K::Sqrt: return jet_sqrt(eval_node(*n.lhs, p));
    }
    throw evaluation_error("corrupt expression node");
}

inline int precedence(Expression::Kind k)
{
    using K = Expression::Kind;
    switch (k) {
        case K::Add:
        case K::Sub: return 1;
        case K::Mul:
        case K::Div: return 2;
        case K::Neg: return 3;
        case K::IntPow: return 4;
        default: return 5;
    }
}

inline void print_node(const Expression::Node& n, std::string& out, int parent_prec)
{
    using K = Expression::Kind;
    const int prec = precedence(n.kind);
    const bool parens = prec < parent_prec;
    if (parens) out += '(';
    switch (n.kind) {
        case K::Number: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", n.number);
            out += buf;
            break;
        }
        case K::Variable: out += "x" + std::to_string(n.axis); break;
        case K::Add:
        case K::Sub:
            print_node(*n.lhs, out, prec);
            out += n.kind == K::Add ? " + " : " - ";
            print_node(*n.rhs, out, prec + 1);
            break;
        case K::Mul:
        case K::Div:
            print_node(*n.lhs, out, prec);
            out += n.kind == K::Mul ? "*" : "/";
            print_node(*n.rhs, out, prec + 1);
            break;
        case K::Neg:
            out += '-';
            print_node(*n.lhs, out, prec);
            break;
        case K::IntPow:
            print_node(*n.lhs, out, prec + 1);
            out += '^';
            if (n.exponent < 0) {
                out += '-';
                out += std::to_string(-n.exponent);
            } else {
                out += std::to_string(n.exponent);
            }
            break;
        case K::Exp:
        case K::Ln:
        case K::Sqrt:
            out += n.kind == K::Exp ? "exp(" : (n.kind == K::Ln ? "ln(" : "sqrt(");
            print_node(*n.lhs, out, 0);
            out += ')';
            break;
    }
    if (parens) out += ')';
}

} // namespace detail

inline Expression parse(std::string_view text) { return detail::Parser(text).run(); }

inline std::string to_string(const Expression& e)
{
    std::string out;
    detail::print_node(e.node(), out, 0);
    return out;
}

// ScalarField whose jets are produced by jet arithmetic over the tree.
inline ScalarField to_field(const Expression& e)
{
    return ScalarField([e](const Vec3& p) { return detail::eval_node(e.node(), p); }, to_string(e));
}

inline ScalarField parse_field(std::string_view text) { return to_field(parse(text)); }

} // namespace veronese
