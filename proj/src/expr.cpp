#include "fvbs/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <vector>

#include "fvbs/errors.hpp"

namespace fvbs {

namespace {

struct Node {
    virtual ~Node() = default;
    virtual double eval(double x, double y) const = 0;
};
using NodePtr = std::shared_ptr<const Node>;

struct Num : Node {
    double v;
    explicit Num(double v) : v(v) {}
    double eval(double, double) const override { return v; }
};
struct VarX : Node {
    double eval(double x, double) const override { return x; }
};
struct VarY : Node {
    double eval(double, double y) const override { return y; }
};
struct Unary : Node {
    std::function<double(double)> fn;
    NodePtr a;
    double eval(double x, double y) const override { return fn(a->eval(x, y)); }
};
struct Binary : Node {
    std::function<double(double, double)> fn;
    NodePtr a, b;
    double eval(double x, double y) const override { return fn(a->eval(x, y), b->eval(x, y)); }
};

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip();
        if (pos_ != s_.size()) fail("trailing input");
        return e;
    }

private:
    const std::string& s_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("expression error at position " + std::to_string(pos_) + " in '" + s_ +
                          "': " + msg);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr a = term();
        for (;;) {
            if (eat('+')) {
                a = binary([](double u, double v) { return u + v; }, a, term());
            } else if (eat('-')) {
                a = binary([](double u, double v) { return u - v; }, a, term());
            } else {
                return a;
            }
        }
    }

    NodePtr term() {
        NodePtr a = factor();
        for (;;) {
            if (eat('*')) {
                a = binary([](double u, double v) { return u * v; }, a, factor());
            } else if (eat('/')) {
                a = binary([](double u, double v) { return u / v; }, a, factor());
            } else {
                return a;
            }
        }
    }

    NodePtr factor() {
        skip();
        if (eat('-')) {
            auto u = std::make_shared<Unary>();
            u->fn = [](double v) { return -v; };
            u->a = factor();
            return u;
        }
        NodePtr base = atom();
        if (eat('^')) return binary([](double u, double v) { return std::pow(u, v); }, base, factor());
        return base;
    }

    NodePtr binary(std::function<double(double, double)> fn, NodePtr a, NodePtr b) {
        auto n = std::make_shared<Binary>();
        n->fn = std::move(fn);
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    NodePtr atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t used = 0;
            double v = std::stod(s_.substr(pos_), &used);
            pos_ += used;
            return std::make_shared<Num>(v);
        }
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            std::string name = s_.substr(start, pos_ - start);
            if (name == "x") return std::make_shared<VarX>();
            if (name == "y") return std::make_shared<VarY>();
            if (name == "pi") return std::make_shared<Num>(M_PI);
            if (name == "min" || name == "max") {
                if (!eat('(')) fail("expected '(' after " + name);
                NodePtr a = expr();
                if (!eat(',')) fail("expected ',' in " + name);
                NodePtr b = expr();
                if (!eat(')')) fail("expected ')'");
                if (name == "min")
                    return binary([](double u, double v) { return std::min(u, v); }, a, b);
                return binary([](double u, double v) { return std::max(u, v); }, a, b);
            }
            std::function<double(double)> fn;
            if (name == "sin")
                fn = [](double v) { return std::sin(v); };
            else if (name == "cos")
                fn = [](double v) { return std::cos(v); };
            else if (name == "exp")
                fn = [](double v) { return std::exp(v); };
            else if (name == "abs")
                fn = [](double v) { return std::abs(v); };
            else
                fail("unknown identifier '" + name + "'");
            if (!eat('(')) fail("expected '(' after " + name);
            NodePtr a = expr();
            if (!eat(')')) fail("expected ')'");
            auto u = std::make_shared<Unary>();
            u->fn = std::move(fn);
            u->a = std::move(a);
            return u;
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

}  // namespace

ScalarField parse_field_expression(const std::string& text) {
    NodePtr root = Parser(text).parse();
    return [root](double x, double y) { return root->eval(x, y); };
}

}  // namespace fvbs
