#pragma once

#include <memory>
#include <string>
#include <vector>

namespace sl4 {

/// Compiled real-valued expression in one variable `x`.
///
/// Grammar: numeric literals, `x`, `pi`, `+ - * / ^`, parentheses and the
/// functions exp, log, sin, cos, sqrt, abs. `^` is right associative and binds
/// tighter than unary minus, so `-x^2` is `-(x^2)`.
class Expression {
public:
    /// Throws Error(Parse) on malformed input.
    static Expression parse(const std::string& text);
    static Expression constant(double value);

    double operator()(double x) const;

    const std::string& text() const { return text_; }
    bool is_constant() const { return constant_; }

    enum class Op : unsigned char {
        Push, LoadX, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Sin, Cos, Sqrt, Abs
    };
    struct Instr {
        Op op;
        double value;
    };

private:
    std::string text_;
    std::vector<Instr> code_;
    std::size_t max_depth_ = 0;
    bool constant_ = false;
    double constant_value_ = 0.0;
};

}  // namespace sl4
