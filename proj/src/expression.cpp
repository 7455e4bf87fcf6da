#include "sl4/expression.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "sl4/error.hpp"

namespace sl4 {

namespace {

using Op = Expression::Op;
using Instr = Expression::Instr;

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    std::vector<Instr> run() {
        sum();
        skip_ws();
        if (pos_ != s_.size()) error("unexpected character '" + std::string(1, s_[pos_]) + "'");
        return std::move(code_);
    }

private:
    void sum() {
        product();
        for (;;) {
            skip_ws();
            if (accept('+')) {
                product();
                emit(Op::Add);
            } else if (accept('-')) {
                product();
                emit(Op::Sub);
            } else {
                return;
            }
        }
    }

    void product() {
        unary();
        for (;;) {
            skip_ws();
            if (accept('*')) {
                unary();
                emit(Op::Mul);
            } else if (accept('/')) {
                unary();
                emit(Op::Div);
            } else {
                return;
            }
        }
    }

    void unary() {
        skip_ws();
        if (accept('-')) {
            unary();
            emit(Op::Neg);
        } else if (accept('+')) {
            unary();
        } else {
            power();
        }
    }

    void power() {
        primary();
        skip_ws();
        if (accept('^')) {
            unary();  // right associative, allows 2^-x
            emit(Op::Pow);
        }
    }

    void primary() {
        skip_ws();
        if (pos_ >= s_.size()) error("unexpected end of expression");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            sum();
            skip_ws();
            if (!accept(')')) error("expected ')'");
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin) error("bad number");
            pos_ += static_cast<std::size_t>(end - begin);
            code_.push_back({Op::Push, v});
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string name = s_.substr(start, pos_ - start);
            if (name == "x") {
                code_.push_back({Op::LoadX, 0.0});
                return;
            }
            if (name == "pi") {
                code_.push_back({Op::Push, std::numbers::pi});
                return;
            }
            static const std::array<std::pair<const char*, Op>, 6> funcs{{
                {"exp", Op::Exp}, {"log", Op::Log}, {"sin", Op::Sin},
                {"cos", Op::Cos}, {"sqrt", Op::Sqrt}, {"abs", Op::Abs},
            }};
            for (const auto& [fname, op] : funcs) {
                if (name == fname) {
                    skip_ws();
                    if (!accept('(')) error("expected '(' after " + name);
                    sum();
                    skip_ws();
                    if (!accept(')')) error("expected ')'");
                    emit(op);
                    return;
                }
            }
            error("unknown identifier '" + name + "'");
        }
        error("unexpected character '" + std::string(1, c) + "'");
    }

    void emit(Op op) { code_.push_back({op, 0.0}); }

    bool accept(char c) {
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    [[noreturn]] void error(const std::string& what) const {
        fail(ErrorKind::Parse, "expression '" + s_ + "' at offset " + std::to_string(pos_) + ": " + what);
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    std::vector<Instr> code_;
};

int stack_effect(Op op) {
    switch (op) {
        case Op::Push:
        case Op::LoadX: return 1;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div:
        case Op::Pow: return -1;
        default: return 0;
    }
}

}  // namespace

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.text_ = text;
    e.code_ = Parser(text).run();
    int depth = 0;
    bool uses_x = false;
    for (const auto& ins : e.code_) {
        depth += stack_effect(ins.op);
        e.max_depth_ = std::max<std::size_t>(e.max_depth_, static_cast<std::size_t>(depth));
        uses_x = uses_x || ins.op == Op::LoadX;
    }
    if (!uses_x) {
        e.constant_value_ = e(0.0);
        e.constant_ = true;
    }
    return e;
}

Expression Expression::constant(double value) {
    Expression e;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    e.text_ = buf;
    e.code_ = {{Op::Push, value}};
    e.max_depth_ = 1;
    e.constant_ = true;
    e.constant_value_ = value;
    return e;
}

double Expression::operator()(double x) const {
    if (constant_) return constant_value_;
    double small[32] = {};
    std::vector<double> big;
    double* st = small;
    if (max_depth_ > 32) {
        big.resize(max_depth_);
        st = big.data();
    }
    std::size_t top = 0;
    for (const auto& ins : code_) {
        switch (ins.op) {
            case Op::Push: st[top++] = ins.value; break;
            case Op::LoadX: st[top++] = x; break;
            case Op::Add: --top; st[top - 1] += st[top]; break;
            case Op::Sub: --top; st[top - 1] -= st[top]; break;
            case Op::Mul: --top; st[top - 1] *= st[top]; break;
            case Op::Div: --top; st[top - 1] /= st[top]; break;
            case Op::Pow: {
                --top;
                double e = st[top];
                double& b = st[top - 1];
                if (e == std::round(e) && std::abs(e) <= 16) {
                    int n = static_cast<int>(e);
                    double r = 1.0, base = n < 0 ? 1.0 / b : b;
                    for (int k = std::abs(n); k > 0; --k) r *= base;
                    b = r;
                } else {
                    b = std::pow(b, e);
                }
                break;
            }
            case Op::Neg: st[top - 1] = -st[top - 1]; break;
            case Op::Exp: st[top - 1] = std::exp(st[top - 1]); break;
            case Op::Log: st[top - 1] = std::log(st[top - 1]); break;
            case Op::Sin: st[top - 1] = std::sin(st[top - 1]); break;
            case Op::Cos: st[top - 1] = std::cos(st[top - 1]); break;
            case Op::Sqrt: st[top - 1] = std::sqrt(st[top - 1]); break;
            case Op::Abs: st[top - 1] = std::abs(st[top - 1]); break;
        }
    }
    return st[0];
}

}  // namespace sl4
