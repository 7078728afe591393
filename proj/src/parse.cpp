#include "opcalc/parse.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>

#include "opcalc/errors.hpp"

namespace opcalc {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Reads a floating-point number at text[pos]; advances pos on success.
std::optional<double> read_real(const std::string& text, std::size_t& pos) {
  std::size_t end = pos;
  if (end < text.size() && (text[end] == '+' || text[end] == '-')) ++end;
  const std::size_t digits = end;
  while (end < text.size() && (std::isdigit(static_cast<unsigned char>(text[end])) || text[end] == '.')) ++end;
  if (end == digits) return std::nullopt;
  if (end < text.size() && (text[end] == 'e' || text[end] == 'E')) {
    std::size_t e = end + 1;
    if (e < text.size() && (text[e] == '+' || text[e] == '-')) ++e;
    const std::size_t ed = e;
    while (e < text.size() && std::isdigit(static_cast<unsigned char>(text[e]))) ++e;
    if (e > ed) end = e;
  }
  double v = 0.0;
  const char* first = text.data() + pos + (text[pos] == '+' ? 1 : 0);
  const auto r = std::from_chars(first, text.data() + end, v);
  if (r.ec != std::errc() || r.ptr != text.data() + end) return std::nullopt;
  pos = end;
  return v;
}

// Splits "a, b=c, (d,e)" at top-level commas.
std::vector<std::string> split_args(const std::string& text) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : text) {
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

// Positional and key=value arguments of a call.
struct Args {
  std::string call;
  std::vector<std::string> positional;
  std::map<std::string, std::string> named;

  Args(std::string name, const std::string& inner) : call(std::move(name)) {
    for (const auto& a : split_args(inner)) {
      if (a.empty()) throw ParseError(call + ": empty argument");
      const auto eq = a.find('=');
      const bool keyword = eq != std::string::npos && a.find_first_of("([") > eq;
      if (keyword) {
        named[trim(a.substr(0, eq))] = trim(a.substr(eq + 1));
      } else {
        if (!named.empty()) throw ParseError(call + ": positional argument after keyword argument");
        positional.push_back(a);
      }
    }
  }

  // Argument by position or name; the name wins if both are given.
  std::optional<std::string> get(std::size_t index, const std::string& name) const {
    if (auto it = named.find(name); it != named.end()) return it->second;
    if (index < positional.size()) return positional[index];
    return std::nullopt;
  }
  std::string need(std::size_t index, const std::string& name) const {
    auto v = get(index, name);
    if (!v) throw ParseError(call + ": missing argument '" + name + "'");
    return *v;
  }
  double real(std::size_t index, const std::string& name) const {
    const cplx z = parse_complex(need(index, name));
    if (z.imag() != 0.0) throw ParseError(call + ": argument '" + name + "' must be real");
    return z.real();
  }
  std::optional<double> real_opt(std::size_t index, const std::string& name) const {
    if (!get(index, name)) return std::nullopt;
    return real(index, name);
  }
  cplx complex(std::size_t index, const std::string& name) const { return parse_complex(need(index, name)); }
  long integer(std::size_t index, const std::string& name) const {
    const double v = real(index, name);
    if (v != std::floor(v) || std::abs(v) > 1e15) throw ParseError(call + ": argument '" + name + "' must be an integer");
    return long(v);
  }
  void allow(std::size_t max_positional, std::initializer_list<const char*> names) const {
    if (positional.size() > max_positional) throw ParseError(call + ": too many arguments");
    for (const auto& [k, v] : named) {
      bool ok = false;
      for (const char* n : names) ok = ok || k == n;
      if (!ok) throw ParseError(call + ": unknown argument '" + k + "'");
    }
  }
};

std::optional<Domain> domain_arg(const Args& a, std::size_t index) {
  if (auto psi = a.real_opt(index, "psi")) return Domain::sector(*psi);
  return std::nullopt;
}

bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Recursive-descent parser shared by the function and measure languages.
template <class Value, class Builder>
class ExprParser {
 public:
  ExprParser(const std::string& text, Builder& b) : s_(text), b_(b) {}

  Value run() {
    Value v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at position " + std::to_string(pos_) + " in '" + s_ + "'");
  }

  Value expr() {
    Value v = term();
    for (;;) {
      if (accept('+')) {
        v = b_.add(v, term());
      } else if (accept('-')) {
        v = b_.add(v, b_.scale(-1.0, term()));
      } else {
        return v;
      }
    }
  }

  Value term() {
    Value v = unary();
    while (accept('*')) v = b_.mul(v, unary());
    return v;
  }

  Value unary() {
    if (accept('-')) return b_.scale(-1.0, unary());
    if (accept('+')) return unary();
    return power();
  }

  Value power() {
    Value v = primary();
    while (accept('^')) {
      skip();
      std::size_t p = pos_;
      auto e = read_real(s_, p);
      if (!e || *e != std::floor(*e) || *e < 0.0 || *e > 1e6) fail("exponent must be a non-negative integer");
      pos_ = p;
      v = b_.power(v, int(*e));
    }
    return v;
  }

  // Contents of a bracket group starting at s_[pos_] == open; advances past the closing bracket.
  std::string group(char open, char close) {
    if (!accept(open)) fail(std::string("expected '") + open + "'");
    const std::size_t start = pos_;
    int depth = 1;
    for (; pos_ < s_.size(); ++pos_) {
      if (s_[pos_] == open) ++depth;
      if (s_[pos_] == close && --depth == 0) break;
    }
    if (depth != 0) fail(std::string("unbalanced '") + open + "'");
    return s_.substr(start, pos_++ - start);
  }

  Value primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (s_[pos_] == '(') {
      ExprParser inner(group('(', ')'), b_);
      return inner.run();
    }
    std::size_t p = pos_;
    if (auto x = read_real(s_, p)) {
      pos_ = p;
      if (pos_ < s_.size() && s_[pos_] == 'i' && (pos_ + 1 == s_.size() || !is_name_char(s_[pos_ + 1]))) {
        ++pos_;
        return b_.number(cplx(0.0, *x));
      }
      return b_.number(*x);
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && is_name_char(s_[pos_])) ++pos_;
    if (pos_ == start) fail("expected a name or number");
    const std::string name = s_.substr(start, pos_ - start);
    if (name == "i") return b_.number(cplx(0.0, 1.0));
    skip();
    if (pos_ < s_.size() && s_[pos_] == '[') return b_.bracket(name, group('[', ']'));
    if (pos_ < s_.size() && s_[pos_] == '(') return b_.call(name, group('(', ')'));
    return b_.call(name, std::nullopt);
  }

  std::string s_;
  Builder& b_;
  std::size_t pos_ = 0;
};

// Pairs "(t,c),(t,c)" for bandlimited.
std::vector<std::pair<double, cplx>> parse_pairs(const std::string& text) {
  std::vector<std::pair<double, cplx>> out;
  for (const auto& item : split_args(text)) {
    if (item.size() < 2 || item.front() != '(' || item.back() != ')')
      throw ParseError("bandlimited: expected (t,c) pairs, got '" + item + "'");
    const auto parts = split_args(item.substr(1, item.size() - 2));
    if (parts.size() != 2) throw ParseError("bandlimited: expected (t,c) pairs, got '" + item + "'");
    const cplx t = parse_complex(parts[0]);
    if (t.imag() != 0.0) throw ParseError("bandlimited: rates must be real");
    out.emplace_back(t.real(), parse_complex(parts[1]));
  }
  if (out.empty()) throw ParseError("bandlimited: no terms");
  return out;
}

struct FunctionBuilder {
  HolFunction number(cplx c) { return HolFunction::constant(c); }
  HolFunction add(const HolFunction& f, const HolFunction& g) {
    if (f.kind() == FnKind::Constant && g.kind() == FnKind::Constant)
      return HolFunction::constant(f.params()[0] + g.params()[0]);
    return opcalc::add(f, g);
  }
  HolFunction mul(const HolFunction& f, const HolFunction& g) {
    if (f.kind() == FnKind::Constant && g.kind() == FnKind::Constant)
      return HolFunction::constant(f.params()[0] * g.params()[0]);
    return opcalc::mul(f, g);
  }
  HolFunction scale(cplx c, const HolFunction& f) { return mul(HolFunction::constant(c), f); }
  HolFunction power(const HolFunction& f, int n) {
    if (f.kind() == FnKind::CayleyPower) return HolFunction::cayley_power(f.order() * n);
    if (n == 0) return HolFunction::constant(1.0);
    HolFunction out = f;
    for (int k = 1; k < n; ++k) out = mul(out, f);
    return out;
  }

  HolFunction bracket(const std::string& name, const std::string& inner) {
    if (name == "bandlimited") return HolFunction::band_limited(parse_pairs(inner));
    throw ParseError("'" + name + "' does not take a bracket list");
  }

  HolFunction call(const std::string& name, const std::optional<std::string>& inner) {
    const Args a(name, inner.value_or(""));
    const bool bare = !inner.has_value();
    if (name == "cayley" || name == "V") {
      a.allow(1, {"n"});
      return HolFunction::cayley_power(a.get(0, "n") ? int(a.integer(0, "n")) : 1);
    }
    if (name == "arccot" && bare) return HolFunction::arccot();
    if (name == "exp_arccot" && bare) return HolFunction::exp_arccot();
    if (bare) throw ParseError("'" + name + "' needs arguments");
    if (name == "exp") {
      a.allow(1, {"t"});
      return HolFunction::exp(a.real(0, "t"));
    }
    if (name == "resolvent") {
      a.allow(2, {"lambda", "psi"});
      return HolFunction::resolvent(a.complex(0, "lambda"), domain_arg(a, 1));
    }
    if (name == "phi") {
      a.allow(1, {"t"});
      return HolFunction::phi(a.real(0, "t"));
    }
    if (name == "power_exp") {
      a.allow(1, {"nu"});
      return HolFunction::power_exp(a.real(0, "nu"));
    }
    if (name == "sector_exp") {
      a.allow(3, {"gamma", "lambda", "psi"});
      return HolFunction::sector_exp(a.real(0, "gamma"), a.get(1, "lambda") ? a.complex(1, "lambda") : cplx(1.0),
                                     domain_arg(a, 2));
    }
    if (name == "bernstein_resolvent") {
      a.allow(3, {"g", "lambda", "psi"});
      return HolFunction::bernstein_resolvent(parse_bernstein(a.need(0, "g")), a.complex(1, "lambda"),
                                              domain_arg(a, 2));
    }
    if (name == "bandlimited") return HolFunction::band_limited(parse_pairs(*inner));
    if (name == "e_delta") {
      a.allow(1, {"delta"});
      return HolFunction::e_delta(a.real(0, "delta"));
    }
    if (name == "const" || name == "constant") {
      a.allow(1, {"c"});
      return HolFunction::constant(a.complex(0, "c"));
    }
    if (name == "laplace") return laplace_transform(parse_measure(*inner));
    // Combinators take a function expression as their first argument.
    if (a.positional.empty()) throw ParseError(name + ": missing function argument");
    const HolFunction f = parse_function(a.positional[0]);
    Args rest(name, "");
    rest.positional.assign(a.positional.begin() + 1, a.positional.end());
    rest.named = a.named;
    if (name == "scale" || name == "arg_scale") {
      rest.allow(1, {"t"});
      return arg_scale(f, rest.real(0, "t"));
    }
    if (name == "shift" || name == "arg_shift") {
      rest.allow(1, {"tau"});
      return arg_shift(f, rest.complex(0, "tau"));
    }
    if (name == "arg_power" || name == "compose_power") {
      rest.allow(1, {"gamma"});
      return compose_power(f, rest.real(0, "gamma"));
    }
    if (name == "arg_invert") {
      rest.allow(0, {});
      return arg_invert(f);
    }
    if (name == "d") {
      rest.allow(0, {});
      return HolFunction::derivative_of(f);
    }
    throw ParseError("unknown function '" + name + "'");
  }
};

struct MeasureBuilder {
  // A bare number is a scalar waiting for a '*'; stored as a scaled empty measure marker.
  struct Value {
    std::optional<cplx> scalar;
    RadonMeasure mu;
  };
  Value number(cplx c) { return {c, {}}; }
  Value add(const Value& a, const Value& b) {
    if (a.scalar || b.scalar) throw ParseError("measure expressions cannot add bare numbers");
    return {std::nullopt, a.mu + b.mu};
  }
  Value mul(const Value& a, const Value& b) {
    if (a.scalar && b.scalar) return {*a.scalar * *b.scalar, {}};
    if (a.scalar) return {std::nullopt, b.mu.scaled(*a.scalar)};
    if (b.scalar) return {std::nullopt, a.mu.scaled(*b.scalar)};
    return {std::nullopt, convolve(a.mu, b.mu)};
  }
  Value scale(cplx c, const Value& v) { return mul(number(c), v); }
  Value power(const Value& v, int n) {
    if (v.scalar) throw ParseError("measure expressions cannot raise bare numbers");
    return {std::nullopt, convolution_power(v.mu, n)};
  }
  Value bracket(const std::string& name, const std::string&) {
    throw ParseError("'" + name + "' does not take a bracket list");
  }
  Value call(const std::string& name, const std::optional<std::string>& inner) {
    if (!inner) {
      if (name == "cayley") return {std::nullopt, cayley_power_measure(1)};
      throw ParseError("'" + name + "' needs arguments");
    }
    const Args a(name, *inner);
    if (name == "dirac") {
      a.allow(2, {"t", "c"});
      return {std::nullopt, RadonMeasure::dirac(a.real(0, "t"), a.get(1, "c") ? a.complex(1, "c") : cplx(1.0))};
    }
    if (name == "expdec") {
      a.allow(2, {"a", "c"});
      return {std::nullopt, RadonMeasure::exp_decay(a.complex(0, "a"), a.get(1, "c") ? a.complex(1, "c") : cplx(1.0))};
    }
    if (name == "polyexp") {
      a.allow(3, {"m", "a", "c"});
      return {std::nullopt, RadonMeasure::poly_exp(int(a.integer(0, "m")), a.complex(1, "a"),
                                                   a.get(2, "c") ? a.complex(2, "c") : cplx(1.0))};
    }
    if (name == "cayley") {
      a.allow(1, {"n"});
      return {std::nullopt, cayley_power_measure(int(a.integer(0, "n")))};
    }
    throw ParseError("unknown measure '" + name + "'");
  }
};

}  // namespace

cplx parse_complex(const std::string& raw) {
  const std::string text = trim(raw);
  if (text.empty()) throw ParseError("empty complex literal");
  std::string s = text;
  // Allow a surrounding pair of parentheses, as in describe() output.
  if (s.front() == '(' && s.back() == ')') s = trim(s.substr(1, s.size() - 2));
  auto bad = [&]() { return ParseError("invalid complex literal '" + text + "'"); };
  if (s == "i" || s == "+i") return {0.0, 1.0};
  if (s == "-i") return {0.0, -1.0};
  std::size_t pos = 0;
  const auto first = read_real(s, pos);
  if (!first) throw bad();
  if (pos == s.size()) return *first;
  if (s[pos] == 'i' && pos + 1 == s.size()) return {0.0, *first};
  if (s[pos] != '+' && s[pos] != '-') throw bad();
  const double sign = s[pos] == '-' ? -1.0 : 1.0;
  if (s.substr(pos + 1) == "i") return {*first, sign};
  std::size_t p2 = pos;
  const auto second = read_real(s, p2);
  if (!second || p2 + 1 != s.size() || s[p2] != 'i') throw bad();
  return {*first, *second};
}

BernsteinFunction parse_bernstein(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "sqrt") return BernsteinFunction::sqrt();
  if (s == "log1p") return BernsteinFunction::log1p();
  if (s == "z_over_1pz") return BernsteinFunction::z_over_1pz();
  if (s.rfind("power(", 0) == 0 && s.back() == ')') {
    const cplx e = parse_complex(s.substr(6, s.size() - 7));
    if (e.imag() != 0.0) throw ParseError("power exponent must be real");
    return BernsteinFunction::power(e.real());
  }
  throw ParseError("unknown Bernstein function '" + s + "'");
}

HolFunction parse_function(const std::string& text) {
  FunctionBuilder b;
  return ExprParser<HolFunction, FunctionBuilder>(text, b).run();
}

RadonMeasure parse_measure(const std::string& text) {
  MeasureBuilder b;
  const auto v = ExprParser<MeasureBuilder::Value, MeasureBuilder>(text, b).run();
  if (v.scalar) throw ParseError("measure expression is a bare number");
  return v.mu;
}

MatrixOperator parse_operator(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) throw ParseError("empty operator");
  if (s.front() == '[' || s.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(s);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("operator JSON: ") + e.what());
    }
    return MatrixOperator(matrix_from_json(j), "matrix");
  }
  const auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')') throw ParseError("operator must be name(args) or JSON: '" + s + "'");
  const std::string name = trim(s.substr(0, open));
  const Args a(name, s.substr(open + 1, s.size() - open - 2));
  if (name == "diag") {
    if (!a.named.empty() || a.positional.empty()) throw ParseError("diag: expects a list of eigenvalues");
    std::vector<cplx> d;
    for (const auto& x : a.positional) d.push_back(parse_complex(x));
    return diag_operator(d);
  }
  auto dim = [&](std::size_t i) {
    const long n = a.integer(i, "dim");
    if (n < 1 || n > 512) throw ParseError(name + ": dim must lie in [1, 512]");
    return int(n);
  };
  auto seed = [&](std::size_t i) {
    const long v = a.integer(i, "seed");
    if (v < 0) throw ParseError(name + ": seed must be non-negative");
    return std::uint64_t(v);
  };
  if (name == "jordan" || name == "jordan_block") {
    a.allow(2, {"lambda", "n"});
    const long n = a.integer(1, "n");
    if (n < 1 || n > 512) throw ParseError(name + ": n must lie in [1, 512]");
    return jordan_block(a.complex(0, "lambda"), int(n));
  }
  if (name == "random_sectorial") {
    a.allow(3, {"dim", "theta", "seed"});
    return random_sectorial(dim(0), a.real(1, "theta"), seed(2));
  }
  if (name == "random_hilbert_contraction_gen") {
    a.allow(2, {"dim", "seed"});
    return random_hilbert_contraction_gen(dim(0), seed(1));
  }
  throw ParseError("unknown operator '" + name + "'");
}

}  // namespace opcalc
