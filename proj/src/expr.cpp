#include "tsh/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string_view>

namespace tsh::expr {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + message),
      line_(line),
      column_(column) {}

namespace {

Expr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

bool is_const(const Expr& e, double v) { return e->op == Op::constant && e->value == v; }
bool is_const(const Expr& e) { return e->op == Op::constant; }

// ---------------------------------------------------------------- lexer

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  double number = 0.0;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    Token tok;
    tok.line = line_;
    tok.column = col_;
    if (pos_ >= src_.size()) return tok;
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(tok);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        advance();
      tok.kind = Tok::ident;
      tok.text = std::string(src_.substr(start, pos_ - start));
      return tok;
    }
    advance();
    tok.text = std::string(1, c);
    switch (c) {
      case '+': tok.kind = Tok::plus; break;
      case '-': tok.kind = Tok::minus; break;
      case '*': tok.kind = Tok::star; break;
      case '/': tok.kind = Tok::slash; break;
      case '^': tok.kind = Tok::caret; break;
      case '(': tok.kind = Tok::lparen; break;
      case ')': tok.kind = Tok::rparen; break;
      case ',': tok.kind = Tok::comma; break;
      default:
        throw ParseError("unexpected character '" + tok.text + "'", tok.line, tok.column);
    }
    return tok;
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  Token number(Token tok) {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      advance();
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      const std::size_t save = pos_;
      const std::size_t save_col = col_;
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        digits();
      } else {
        pos_ = save;
        col_ = save_col;
      }
    }
    tok.text = std::string(src_.substr(start, pos_ - start));
    const char* first = tok.text.data();
    const char* last = first + tok.text.size();
    auto [ptr, ec] = std::from_chars(first, last, tok.number);
    if (ec != std::errc() || ptr != last)
      throw ParseError("malformed number '" + tok.text + "'", tok.line, tok.column);
    tok.kind = Tok::number;
    return tok;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// ---------------------------------------------------------------- parser

bool lookup_function(const std::string& name, Func& f) {
  static const std::pair<const char*, Func> table[] = {
      {"sin", Func::sin}, {"cos", Func::cos},   {"tan", Func::tan}, {"exp", Func::exp},
      {"log", Func::log}, {"sqrt", Func::sqrt}, {"abs", Func::abs},
  };
  for (const auto& [n, fn] : table)
    if (name == n) {
      f = fn;
      return true;
    }
  return false;
}

const char* function_name(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::tan: return "tan";
    case Func::exp: return "exp";
    case Func::log: return "log";
    case Func::sqrt: return "sqrt";
    case Func::abs: return "abs";
  }
  return "?";
}

class Parser {
 public:
  Parser(const std::string& src, std::size_t dim) : lex_(src), dim_(dim) { tok_ = lex_.next(); }

  Expr parse_all() {
    Expr e = expression();
    if (tok_.kind != Tok::end) fail("unexpected '" + tok_.text + "' after expression");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, tok_.line, tok_.column); }

  void advance() { tok_ = lex_.next(); }

  void expect(Tok kind, const char* what) {
    if (tok_.kind != kind)
      fail(std::string("expected ") + what + (tok_.kind == Tok::end ? " before end of input"
                                                                    : ", got '" + tok_.text + "'"));
    advance();
  }

  static Expr binary(Op op, Expr a, Expr b) {
    Node n;
    n.op = op;
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    return make(std::move(n));
  }

  Expr expression() {
    Expr e = term();
    while (tok_.kind == Tok::plus || tok_.kind == Tok::minus) {
      const Op op = tok_.kind == Tok::plus ? Op::add : Op::sub;
      advance();
      e = binary(op, e, term());
    }
    return e;
  }

  Expr term() {
    Expr e = unary();
    while (tok_.kind == Tok::star || tok_.kind == Tok::slash) {
      const Op op = tok_.kind == Tok::star ? Op::mul : Op::div;
      advance();
      e = binary(op, e, unary());
    }
    return e;
  }

  Expr unary() {
    if (tok_.kind == Tok::minus) {
      advance();
      Node n;
      n.op = Op::neg;
      n.lhs = unary();
      return make(std::move(n));
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (tok_.kind == Tok::caret) {
      advance();
      return binary(Op::pow, base, unary());
    }
    return base;
  }

  Expr primary() {
    const Token tok = tok_;
    switch (tok.kind) {
      case Tok::number: {
        advance();
        Node n;
        n.op = Op::constant;
        n.value = tok.number;
        return make(std::move(n));
      }
      case Tok::lparen: {
        advance();
        Expr e = expression();
        expect(Tok::rparen, "')'");
        return e;
      }
      case Tok::ident:
        advance();
        return identifier(tok);
      case Tok::end:
        fail("unexpected end of input");
      default:
        fail("unexpected '" + tok.text + "'");
    }
  }

  Expr identifier(const Token& tok) {
    Func f{};
    if (lookup_function(tok.text, f)) {
      if (tok_.kind != Tok::lparen)
        throw ParseError("function '" + tok.text + "' requires one argument in parentheses",
                         tok.line, tok.column);
      advance();
      if (tok_.kind == Tok::rparen)
        throw ParseError("function '" + tok.text + "' takes exactly one argument, got none",
                         tok.line, tok.column);
      Node n;
      n.op = Op::call;
      n.func = f;
      n.lhs = expression();
      if (tok_.kind == Tok::comma)
        throw ParseError("function '" + tok.text + "' takes exactly one argument", tok_.line,
                         tok_.column);
      expect(Tok::rparen, "')'");
      return make(std::move(n));
    }
    if (tok.text == "t") return var_t();
    if (tok.text.size() >= 2 && (tok.text[0] == 'q' || tok.text[0] == 'p')) {
      std::size_t k = 0;
      const char* first = tok.text.data() + 1;
      const char* last = tok.text.data() + tok.text.size();
      auto [ptr, ec] = std::from_chars(first, last, k);
      if (ec == std::errc() && ptr == last && tok.text[1] != '0') {
        if (k < 1 || k > dim_)
          throw ParseError("unknown identifier '" + tok.text + "' (dimension is " +
                               std::to_string(dim_) + ")",
                           tok.line, tok.column);
        return tok.text[0] == 'q' ? var_q(k - 1) : var_p(k - 1);
      }
    }
    throw ParseError("unknown identifier '" + tok.text + "'", tok.line, tok.column);
  }

  Lexer lex_;
  std::size_t dim_;
  Token tok_;
};

// ---------------------------------------------------------------- printer

int precedence(const Expr& e) {
  switch (e->op) {
    case Op::add:
    case Op::sub: return 1;
    case Op::mul:
    case Op::div: return 2;
    case Op::neg: return 3;
    case Op::pow: return 4;
    case Op::constant: return std::signbit(e->value) ? 3 : 5;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

void print(const Expr& e, std::string& out);

void print_child(const Expr& e, int min_prec, std::string& out) {
  if (precedence(e) < min_prec) {
    out += '(';
    print(e, out);
    out += ')';
  } else {
    print(e, out);
  }
}

void print(const Expr& e, std::string& out) {
  switch (e->op) {
    case Op::constant: out += format_number(e->value); return;
    case Op::var_q: out += "q" + std::to_string(e->index + 1); return;
    case Op::var_p: out += "p" + std::to_string(e->index + 1); return;
    case Op::var_t: out += "t"; return;
    case Op::neg:
      out += '-';
      print_child(e->lhs, 3, out);
      return;
    case Op::call:
      out += function_name(e->func);
      out += '(';
      print(e->lhs, out);
      out += ')';
      return;
    case Op::pow:
      print_child(e->lhs, 5, out);
      out += '^';
      print_child(e->rhs, 3, out);
      return;
    default: break;
  }
  const int p = precedence(e);
  const char* sym = e->op == Op::add ? " + " : e->op == Op::sub ? " - " : e->op == Op::mul ? "*" : "/";
  print_child(e->lhs, p, out);
  out += sym;
  print_child(e->rhs, p + 1, out);
}

double apply(Func f, double x) {
  switch (f) {
    case Func::sin: return std::sin(x);
    case Func::cos: return std::cos(x);
    case Func::tan: return std::tan(x);
    case Func::exp: return std::exp(x);
    case Func::log: return std::log(x);
    case Func::sqrt: return std::sqrt(x);
    case Func::abs: return std::abs(x);
  }
  return NAN;
}

void collect(const Expr& e, Usage& u) {
  if (!e) return;
  if (e->op == Op::var_q) u.max_q = std::max(u.max_q, e->index + 1);
  if (e->op == Op::var_p) u.max_p = std::max(u.max_p, e->index + 1);
  if (e->op == Op::var_t) u.uses_t = true;
  collect(e->lhs, u);
  collect(e->rhs, u);
}

}  // namespace

Expr parse(const std::string& source, std::size_t dim) { return Parser(source, dim).parse_all(); }

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

double evaluate(const Expr& e, const Point& at) {
  switch (e->op) {
    case Op::constant: return e->value;
    case Op::var_q: return at.q[e->index];
    case Op::var_p: return at.p[e->index];
    case Op::var_t: return at.t;
    case Op::neg: return -evaluate(e->lhs, at);
    case Op::add: return evaluate(e->lhs, at) + evaluate(e->rhs, at);
    case Op::sub: return evaluate(e->lhs, at) - evaluate(e->rhs, at);
    case Op::mul: return evaluate(e->lhs, at) * evaluate(e->rhs, at);
    case Op::div: return evaluate(e->lhs, at) / evaluate(e->rhs, at);
    case Op::pow: {
      const double base = evaluate(e->lhs, at);
      if (is_const(e->rhs, 2.0)) return base * base;
      return std::pow(base, evaluate(e->rhs, at));
    }
    case Op::call: return apply(e->func, evaluate(e->lhs, at));
  }
  return NAN;
}

double evaluate_finite(const Expr& e, const Point& at) {
  const double v = evaluate(e, at);
  if (!std::isfinite(v)) throw EvalError("expression '" + to_string(e) + "' is not finite here");
  return v;
}

Usage usage(const Expr& e) {
  Usage u;
  collect(e, u);
  return u;
}

// ---------------------------------------------------------------- builders

Expr constant(double v) {
  Node n;
  n.op = Op::constant;
  n.value = v;
  return make(std::move(n));
}

Expr var_q(std::size_t i) {
  Node n;
  n.op = Op::var_q;
  n.index = i;
  return make(std::move(n));
}

Expr var_p(std::size_t i) {
  Node n;
  n.op = Op::var_p;
  n.index = i;
  return make(std::move(n));
}

Expr var_t() {
  Node n;
  n.op = Op::var_t;
  return make(std::move(n));
}

Expr neg(Expr a) {
  if (is_const(a)) return constant(-a->value);
  if (a->op == Op::neg) return a->lhs;
  Node n;
  n.op = Op::neg;
  n.lhs = std::move(a);
  return make(std::move(n));
}

namespace {
Expr raw_binary(Op op, Expr a, Expr b) {
  Node n;
  n.op = op;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}
}  // namespace

Expr add(Expr a, Expr b) {
  if (is_const(a) && is_const(b)) return constant(a->value + b->value);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return raw_binary(Op::add, std::move(a), std::move(b));
}

Expr sub(Expr a, Expr b) {
  if (is_const(a) && is_const(b)) return constant(a->value - b->value);
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return neg(std::move(b));
  return raw_binary(Op::sub, std::move(a), std::move(b));
}

Expr mul(Expr a, Expr b) {
  if (is_const(a) && is_const(b)) return constant(a->value * b->value);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a, -1.0)) return neg(std::move(b));
  if (is_const(b, -1.0)) return neg(std::move(a));
  return raw_binary(Op::mul, std::move(a), std::move(b));
}

Expr div(Expr a, Expr b) {
  if (is_const(a) && is_const(b) && b->value != 0.0) return constant(a->value / b->value);
  if (is_const(a, 0.0) && !is_const(b, 0.0)) return constant(0.0);
  if (is_const(b, 1.0)) return a;
  return raw_binary(Op::div, std::move(a), std::move(b));
}

Expr pow(Expr a, Expr b) {
  if (is_const(b, 0.0)) return constant(1.0);
  if (is_const(b, 1.0)) return a;
  if (is_const(a) && is_const(b)) {
    const double v = std::pow(a->value, b->value);
    if (std::isfinite(v)) return constant(v);
  }
  return raw_binary(Op::pow, std::move(a), std::move(b));
}

Expr call(Func f, Expr a) {
  if (is_const(a)) {
    const double v = apply(f, a->value);
    if (std::isfinite(v) && f != Func::abs) return constant(v);
  }
  Node n;
  n.op = Op::call;
  n.func = f;
  n.lhs = std::move(a);
  return make(std::move(n));
}

// ---------------------------------------------------------------- derivative

Expr differentiate(const Expr& e, Op var, std::size_t index) {
  switch (e->op) {
    case Op::constant: return constant(0.0);
    case Op::var_q:
    case Op::var_p:
      return constant(e->op == var && e->index == index ? 1.0 : 0.0);
    case Op::var_t: return constant(var == Op::var_t ? 1.0 : 0.0);
    case Op::neg: return neg(differentiate(e->lhs, var, index));
    case Op::add: return add(differentiate(e->lhs, var, index), differentiate(e->rhs, var, index));
    case Op::sub: return sub(differentiate(e->lhs, var, index), differentiate(e->rhs, var, index));
    case Op::mul:
      return add(mul(differentiate(e->lhs, var, index), e->rhs),
                 mul(e->lhs, differentiate(e->rhs, var, index)));
    case Op::div: {
      const Expr da = differentiate(e->lhs, var, index);
      const Expr db = differentiate(e->rhs, var, index);
      if (is_const(db, 0.0)) return div(da, e->rhs);
      return div(sub(mul(da, e->rhs), mul(e->lhs, db)), pow(e->rhs, constant(2.0)));
    }
    case Op::pow: {
      const Expr da = differentiate(e->lhs, var, index);
      if (is_const(e->rhs)) {
        const double c = e->rhs->value;
        return mul(mul(constant(c), pow(e->lhs, constant(c - 1.0))), da);
      }
      const Expr db = differentiate(e->rhs, var, index);
      return mul(e, add(mul(db, call(Func::log, e->lhs)), div(mul(e->rhs, da), e->lhs)));
    }
    case Op::call: {
      const Expr& u = e->lhs;
      const Expr du = differentiate(u, var, index);
      if (is_const(du, 0.0)) return constant(0.0);
      switch (e->func) {
        case Func::sin: return mul(call(Func::cos, u), du);
        case Func::cos: return mul(neg(call(Func::sin, u)), du);
        case Func::tan: return div(du, pow(call(Func::cos, u), constant(2.0)));
        case Func::exp: return mul(e, du);
        case Func::log: return div(du, u);
        case Func::sqrt: return div(du, mul(constant(2.0), e));
        // u/|u| is the sign of u; evaluates to NaN (an error) at u = 0.
        case Func::abs: return mul(div(u, e), du);
      }
    }
  }
  return constant(0.0);
}

}  // namespace tsh::expr
