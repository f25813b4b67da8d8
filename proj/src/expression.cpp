#include "narrowgap/expression.hpp"

#include <cctype>
#include <charconv>

namespace narrowgap {

ParseError::ParseError(std::size_t position, const std::string& what)
    : std::runtime_error("at position " + std::to_string(position) + ": " + what), position_(position)
{
}

namespace {

class Parser {
public:
    Parser(std::string_view text, int n_vars) : text_(text), n_vars_(n_vars) {}

    Polynomial parse()
    {
        skip_ws();
        if (at_end()) throw ParseError(pos_, "empty expression");
        Polynomial p = expr();
        skip_ws();
        if (!at_end()) throw ParseError(pos_, std::string("unexpected character '") + text_[pos_] + "'");
        return p;
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }

    void skip_ws()
    {
        while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek()
    {
        skip_ws();
        return at_end() ? '\0' : text_[pos_];
    }

    Polynomial expr()
    {
        Polynomial acc = term();
        for (;;) {
            const char c = peek();
            if (c != '+' && c != '-') break;
            ++pos_;
            Polynomial rhs = term();
            if (c == '+')
                acc += rhs;
            else
                acc -= rhs;
        }
        return acc;
    }

    Polynomial term()
    {
        Polynomial acc = factor();
        while (peek() == '*') {
            ++pos_;
            const std::size_t at = pos_;
            acc = guarded(at, [&] { return acc * factor(); });
        }
        return acc;
    }

    Polynomial factor()
    {
        Polynomial base = atom();
        while (peek() == '^') {
            ++pos_;
            skip_ws();
            const std::size_t at = pos_;
            const int k = integer_exponent();
            base = guarded(at, [&] { return base.pow(k); });
        }
        return base;
    }

    Polynomial atom()
    {
        const char c = peek();
        if (c == '\0') throw ParseError(pos_, "unexpected end of expression");
        if (c == '(') {
            ++pos_;
            Polynomial inner = expr();
            if (peek() != ')') throw ParseError(pos_, "expected ')'");
            ++pos_;
            return inner;
        }
        if (c == '+' || c == '-') {
            ++pos_;
            Polynomial a = atom();
            return c == '-' ? a * -1.0 : a;
        }
        if (c == 'x') return variable();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Polynomial::constant(n_vars_, number());
        throw ParseError(pos_, std::string("unexpected character '") + c + "'");
    }

    Polynomial variable()
    {
        const std::size_t start = pos_;
        ++pos_; // 'x'
        std::size_t end = pos_;
        while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
        if (end == pos_) throw ParseError(start, "variable must be x1..x" + std::to_string(n_vars_));
        int index = 0;
        std::from_chars(text_.data() + pos_, text_.data() + end, index);
        if (index < 1 || index > n_vars_)
            throw ParseError(start, "unknown variable '" + std::string(text_.substr(start, end - start)) + "'");
        pos_ = end;
        return Polynomial::variable(n_vars_, index - 1);
    }

    double number()
    {
        const std::size_t start = pos_;
        std::size_t end = pos_;
        auto digits = [&] {
            while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
        };
        digits();
        if (end < text_.size() && text_[end] == '.') {
            ++end;
            digits();
        }
        if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
            std::size_t e = end + 1;
            if (e < text_.size() && (text_[e] == '+' || text_[e] == '-')) ++e;
            if (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) {
                end = e;
                digits();
            }
        }
        const std::string literal(text_.substr(start, end - start));
        if (literal == ".") throw ParseError(start, "malformed number");
        pos_ = end;
        return std::stod(literal);
    }

    int integer_exponent()
    {
        const std::size_t start = pos_;
        std::size_t end = pos_;
        while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
        if (end == start) throw ParseError(start, "exponent must be a non-negative integer");
        if (end < text_.size() && (text_[end] == '.' || text_[end] == 'e' || text_[end] == 'E'))
            throw ParseError(start, "exponent must be a non-negative integer");
        int k = 0;
        const auto res = std::from_chars(text_.data() + start, text_.data() + end, k);
        if (res.ec != std::errc{}) throw ParseError(start, "exponent out of range");
        pos_ = end;
        return k;
    }

    template <class F>
    Polynomial guarded(std::size_t at, F&& f)
    {
        try {
            return f();
        } catch (const DomainError& e) {
            throw ParseError(at, e.what());
        }
    }

    std::string_view text_;
    int n_vars_;
    std::size_t pos_ = 0;
};

} // namespace

Polynomial parse_expression(std::string_view text, int n_vars)
{
    return Parser(text, n_vars).parse();
}

} // namespace narrowgap
