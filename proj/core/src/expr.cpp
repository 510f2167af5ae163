#include "exactrd/expr.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <string>

#include "exactrd/error.hpp"

namespace exactrd {

struct Expr::Node {
  Op op = Op::Const;
  double value = 0.0;
  std::vector<Expr> args;
  std::size_t count = 1;
};

namespace {

bool is_unary(Op op) { return op >= Op::Neg && op <= Op::Sqrt; }

double apply_unary(Op op, double x) {
  switch (op) {
    case Op::Neg: return -x;
    case Op::Sin: return std::sin(x);
    case Op::Cos: return std::cos(x);
    case Op::Tan: return std::tan(x);
    case Op::Sinh: return std::sinh(x);
    case Op::Cosh: return std::cosh(x);
    case Op::Tanh: return std::tanh(x);
    case Op::Sech: return 1.0 / std::cosh(x);
    case Op::Exp: return std::exp(x);
    case Op::Ln: return x > 0.0 ? std::log(x) : std::nan("");
    case Op::Abs: return std::fabs(x);
    case Op::Sqrt: return x >= 0.0 ? std::sqrt(x) : std::nan("");
    default: return std::nan("");
  }
}

double apply_binary(Op op, double x, double y) {
  switch (op) {
    case Op::Add: return x + y;
    case Op::Sub: return x - y;
    case Op::Mul: return x * y;
    case Op::Div: return y != 0.0 ? x / y : std::nan("");
    case Op::Pow: return std::pow(x, y);
    default: return std::nan("");
  }
}

double eval_node(const Expr& e, double t) {
  double r = 0.0;
  switch (e.op()) {
    case Op::Const: return e.value();
    case Op::Var: return t;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Pow:
      r = apply_binary(e.op(), eval_node(e.arg(0), t), eval_node(e.arg(1), t));
      break;
    default:
      r = apply_unary(e.op(), eval_node(e.arg(0), t));
      break;
  }
  if (!std::isfinite(r)) throw DomainError(render(e), t);
  return r;
}

}  // namespace

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = v;
  return Expr(std::move(n));
}

Expr Expr::var() {
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  return Expr(std::move(n));
}

Expr Expr::unary(Op op, Expr a) {
  if (!is_unary(op)) throw PreconditionError("Expr::unary: not a unary op");
  if (a.is_constant()) {
    double v = apply_unary(op, a.value());
    if (std::isfinite(v)) return constant(v);
  }
  auto n = std::make_shared<Node>();
  n->op = op;
  n->count = 1 + a.node_count();
  n->args = {std::move(a)};
  return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr a, Expr b) {
  if (op < Op::Add) throw PreconditionError("Expr::binary: not a binary op");
  if (a.is_constant() && b.is_constant()) {
    double v = apply_binary(op, a.value(), b.value());
    if (std::isfinite(v)) return constant(v);
  }
  auto n = std::make_shared<Node>();
  n->op = op;
  n->count = 1 + a.node_count() + b.node_count();
  n->args = {std::move(a), std::move(b)};
  return Expr(std::move(n));
}

Op Expr::op() const { return node_->op; }
double Expr::value() const { return node_->value; }
const Expr& Expr::arg(std::size_t i) const { return node_->args.at(i); }
std::size_t Expr::arity() const { return node_->args.size(); }
std::size_t Expr::node_count() const { return node_->count; }

double Expr::eval(double t) const { return eval_node(*this, t); }

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(Op::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(Op::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(Op::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(Op::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(Op::Neg, a); }

std::string_view function_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tan: return "tan";
    case Op::Sinh: return "sinh";
    case Op::Cosh: return "cosh";
    case Op::Tanh: return "tanh";
    case Op::Sech: return "sech";
    case Op::Exp: return "exp";
    case Op::Ln: return "ln";
    case Op::Abs: return "abs";
    case Op::Sqrt: return "sqrt";
    default: return "";
  }
}

// ---------------------------------------------------------------- parser

namespace {

constexpr int kMaxDepth = 400;

constexpr Op kFunctions[] = {Op::Sin,  Op::Cos, Op::Tan, Op::Sinh,
                             Op::Cosh, Op::Tanh, Op::Sech, Op::Exp,
                             Op::Ln,   Op::Abs, Op::Sqrt};

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Expr run() {
    for (std::size_t i = 0; i < s_.size(); ++i) {
      if (static_cast<unsigned char>(s_[i]) > 127) throw SyntaxError("non-ASCII character", i);
    }
    skip_ws();
    if (pos_ == s_.size()) throw SyntaxError("empty expression", pos_);
    Expr e = sum();
    skip_ws();
    if (pos_ != s_.size()) {
      throw SyntaxError(std::string("unexpected '") + s_[pos_] + "'", pos_);
    }
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' ||
                                s_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr count(Expr e) {
    if (++nodes_ > kMaxExprNodes) throw SyntaxError("expression exceeds node limit", pos_);
    return e;
  }

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& pp) : p(pp) {
      if (++p.depth_ > kMaxDepth) throw SyntaxError("expression nested too deeply", p.pos_);
    }
    ~DepthGuard() { --p.depth_; }
  };

  Expr sum() {
    Expr lhs = product();
    for (;;) {
      if (accept('+')) {
        lhs = count(lhs + product());
      } else if (accept('-')) {
        lhs = count(lhs - product());
      } else {
        return lhs;
      }
    }
  }

  Expr product() {
    Expr lhs = signed_term();
    for (;;) {
      if (accept('*')) {
        lhs = count(lhs * signed_term());
      } else if (accept('/')) {
        lhs = count(lhs / signed_term());
      } else {
        return lhs;
      }
    }
  }

  Expr signed_term() {
    DepthGuard g(*this);
    if (accept('-')) return count(-signed_term());
    if (accept('+')) return signed_term();
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (accept('^')) {
      DepthGuard g(*this);
      return count(Expr::binary(Op::Pow, base, signed_term()));
    }
    return base;
  }

  Expr atom() {
    skip_ws();
    if (pos_ == s_.size()) throw SyntaxError("unexpected end of input", pos_);
    char c = s_[pos_];
    if (c == '(') {
      DepthGuard g(*this);
      ++pos_;
      Expr e = sum();
      if (!accept(')')) throw SyntaxError("expected ')'", pos_);
      return e;
    }
    if (is_digit(c) || c == '.') return number();
    if (is_ident_start(c)) return identifier();
    throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
  }

  Expr number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (is_digit(s_[pos_]) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && is_digit(s_[pos_])) {
        while (pos_ < s_.size() && is_digit(s_[pos_])) ++pos_;
      } else {
        pos_ = save;  // `2e` is a number followed by the constant e
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || ptr != s_.data() + pos_ || !std::isfinite(v)) {
      throw SyntaxError("malformed number", start);
    }
    if (pos_ < s_.size() && is_ident_start(s_[pos_])) {
      throw SyntaxError("missing operator between number and identifier", pos_);
    }
    return count(Expr::constant(v));
  }

  Expr identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && is_ident_char(s_[pos_])) ++pos_;
    std::string_view name = s_.substr(start, pos_ - start);
    skip_ws();
    bool call = pos_ < s_.size() && s_[pos_] == '(';

    Expr leaf;
    bool is_leaf = true;
    if (name == "t") {
      leaf = Expr::var();
    } else if (name == "pi") {
      leaf = Expr::constant(std::numbers::pi);
    } else if (name == "e") {
      leaf = Expr::constant(std::numbers::e);
    } else {
      is_leaf = false;
    }
    if (is_leaf) {
      if (call) throw ArityError("'" + std::string(name) + "' is not a function", start);
      return count(leaf);
    }

    for (Op op : kFunctions) {
      if (function_name(op) != name) continue;
      if (!call) throw ArityError("function '" + std::string(name) + "' needs one argument", start);
      DepthGuard g(*this);
      ++pos_;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ')') {
        throw ArityError("function '" + std::string(name) + "' needs one argument", pos_);
      }
      Expr arg = sum();
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        throw ArityError("function '" + std::string(name) + "' takes one argument", pos_);
      }
      if (!accept(')')) throw SyntaxError("expected ')'", pos_);
      return count(Expr::unary(op, arg));
    }
    throw UnknownIdentifierError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t nodes_ = 0;
  int depth_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).run(); }

// ---------------------------------------------------------------- diff

namespace {

Expr K(double v) { return Expr::constant(v); }
Expr fn(Op op, const Expr& u) { return Expr::unary(op, u); }
Expr pw(const Expr& u, const Expr& v) { return Expr::binary(Op::Pow, u, v); }

// outer * du, skipping the multiplication when du is exactly 0 or 1
Expr chain(const Expr& outer, const Expr& du) {
  if (du.is_zero()) return K(0.0);
  if (du.is_constant() && du.value() == 1.0) return outer;
  return outer * du;
}

Expr add_terms(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return a + b;
}

Expr sub_terms(const Expr& a, const Expr& b) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return -b;
  return a - b;
}

}  // namespace

Expr diff(const Expr& e) {
  switch (e.op()) {
    case Op::Const: return K(0.0);
    case Op::Var: return K(1.0);
    default: break;
  }
  if (e.arity() == 1) {
    const Expr& u = e.arg(0);
    Expr du = diff(u);
    if (du.is_zero()) return K(0.0);
    switch (e.op()) {
      case Op::Neg: return -du;
      case Op::Sin: return chain(fn(Op::Cos, u), du);
      case Op::Cos: return chain(-fn(Op::Sin, u), du);
      case Op::Tan: return chain(K(1.0) / pw(fn(Op::Cos, u), K(2.0)), du);
      case Op::Sinh: return chain(fn(Op::Cosh, u), du);
      case Op::Cosh: return chain(fn(Op::Sinh, u), du);
      case Op::Tanh: return chain(pw(fn(Op::Sech, u), K(2.0)), du);
      case Op::Sech: return chain(-(fn(Op::Sech, u) * fn(Op::Tanh, u)), du);
      case Op::Exp: return chain(fn(Op::Exp, u), du);
      case Op::Ln: return du / u;
      // sign(u) written as |u|/u so that evaluation at u = 0 is a domain error
      case Op::Abs: return chain(fn(Op::Abs, u) / u, du);
      case Op::Sqrt: return du / (K(2.0) * fn(Op::Sqrt, u));
      default: break;
    }
  }
  const Expr& u = e.arg(0);
  const Expr& v = e.arg(1);
  Expr du = diff(u);
  Expr dv = diff(v);
  switch (e.op()) {
    case Op::Add: return add_terms(du, dv);
    case Op::Sub: return sub_terms(du, dv);
    case Op::Mul: return add_terms(chain(v, du), chain(u, dv));
    case Op::Div: {
      Expr first = du.is_zero() ? K(0.0) : du / v;
      Expr second = dv.is_zero() ? K(0.0) : chain(u / pw(v, K(2.0)), dv);
      return sub_terms(first, second);
    }
    case Op::Pow: {
      if (dv.is_zero()) {
        if (du.is_zero()) return K(0.0);
        return chain(v * pw(u, v - K(1.0)), du);
      }
      if (du.is_zero()) return chain(e * fn(Op::Ln, u), dv);
      return e * add_terms(chain(fn(Op::Ln, u), dv), chain(v / u, du));
    }
    default: break;
  }
  throw PreconditionError("diff: unsupported node");
}

// ---------------------------------------------------------------- render

namespace {

void render_into(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::Const: {
      char buf[64];
      double v = e.value();
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, std::fabs(v));
      (void)ec;
      std::string digits(buf, ptr);
      if (std::signbit(v)) {
        out += "(-" + digits + ")";
      } else {
        out += digits;
      }
      return;
    }
    case Op::Var: out += 't'; return;
    case Op::Neg:
      out += "(-";
      render_into(e.arg(0), out);
      out += ')';
      return;
    default: break;
  }
  if (e.arity() == 1) {
    out += function_name(e.op());
    out += '(';
    render_into(e.arg(0), out);
    out += ')';
    return;
  }
  char sym = '+';
  switch (e.op()) {
    case Op::Sub: sym = '-'; break;
    case Op::Mul: sym = '*'; break;
    case Op::Div: sym = '/'; break;
    case Op::Pow: sym = '^'; break;
    default: break;
  }
  out += '(';
  render_into(e.arg(0), out);
  out += sym;
  render_into(e.arg(1), out);
  out += ')';
}

}  // namespace

std::string render(const Expr& e) {
  std::string out;
  render_into(e, out);
  return out;
}

}  // namespace exactrd
