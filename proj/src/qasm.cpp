#include <cctype>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "reqisc/circuit.hpp"

namespace reqisc {

QasmError::QasmError(int line_, int column_, const std::string& what)
    : std::runtime_error("qasm:" + std::to_string(line_) + ":" +
                         std::to_string(column_) + ": " + what),
      line(line_),
      column(column_) {}

namespace {

constexpr double kPi = std::numbers::pi;

struct Token {
  enum Kind { ident, number, symbol, string, eof } kind;
  std::string text;
  double value = 0;
  int line = 1, column = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_space();
    tok_ = Token{Token::eof, "", 0, line_, col_};
    if (pos_ >= src_.size()) return;
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_')) {
        bump();
      }
      tok_.kind = Token::ident;
      tok_.text = src_.substr(start, pos_ - start);
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E' ||
              ((src_[pos_] == '+' || src_[pos_] == '-') && pos_ > start &&
               (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E')))) {
        bump();
      }
      tok_.kind = Token::number;
      tok_.text = src_.substr(start, pos_ - start);
      tok_.value = std::stod(tok_.text);
    } else if (c == '"') {
      bump();
      size_t start = pos_;
      while (pos_ < src_.size() && src_[pos_] != '"') bump();
      tok_.kind = Token::string;
      tok_.text = src_.substr(start, pos_ - start);
      if (pos_ < src_.size()) bump();
    } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      tok_.kind = Token::symbol;
      tok_.text = "->";
      bump();
      bump();
    } else {
      tok_.kind = Token::symbol;
      tok_.text = std::string(1, c);
      bump();
    }
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  ParseResult run() {
    expect_header();
    while (lex_.peek().kind != Token::eof) statement();
    if (!saw_qreg_) fail(lex_.peek(), "missing qreg declaration");
    return std::move(result_);
  }

 private:
  [[noreturn]] void fail(const Token& t, const std::string& msg) {
    throw QasmError(t.line, t.column, msg);
  }

  Token expect_symbol(const std::string& s) {
    Token t = lex_.next();
    if (t.kind != Token::symbol || t.text != s) {
      fail(t, "expected '" + s + "'");
    }
    return t;
  }

  Token expect_ident() {
    Token t = lex_.next();
    if (t.kind != Token::ident) fail(t, "expected identifier");
    return t;
  }

  void expect_header() {
    Token t = lex_.peek();
    if (t.kind == Token::ident && t.text == "OPENQASM") {
      lex_.next();
      Token v = lex_.next();
      if (v.kind != Token::number) fail(v, "expected version number");
      expect_symbol(";");
    }
  }

  int expect_index() {
    expect_symbol("[");
    Token t = lex_.next();
    if (t.kind != Token::number) fail(t, "expected index");
    expect_symbol("]");
    return static_cast<int>(t.value);
  }

  // qubit operand: q[3] or bare q (broadcast)
  struct Operand {
    int index = -1;  // -1 = whole register
    Token at;
  };

  Operand qubit_operand() {
    Token name = expect_ident();
    if (name.text != qreg_name_) {
      fail(name, "unknown register '" + name.text + "'");
    }
    Operand op;
    op.at = name;
    if (lex_.peek().kind == Token::symbol && lex_.peek().text == "[") {
      op.index = expect_index();
      if (op.index < 0 || op.index >= result_.circuit.n_qubits) {
        fail(name, "qubit index out of range");
      }
    }
    return op;
  }

  // parameter expressions: numbers, pi, + - * / ^, unary minus, sin/cos/...
  double expr() { return add_expr(); }

  double add_expr() {
    double v = mul_expr();
    while (lex_.peek().kind == Token::symbol &&
           (lex_.peek().text == "+" || lex_.peek().text == "-")) {
      std::string op = lex_.next().text;
      double rhs = mul_expr();
      v = op == "+" ? v + rhs : v - rhs;
    }
    return v;
  }

  double mul_expr() {
    double v = pow_expr();
    while (lex_.peek().kind == Token::symbol &&
           (lex_.peek().text == "*" || lex_.peek().text == "/")) {
      std::string op = lex_.next().text;
      double rhs = pow_expr();
      v = op == "*" ? v * rhs : v / rhs;
    }
    return v;
  }

  double pow_expr() {
    double v = unary_expr();
    if (lex_.peek().kind == Token::symbol && lex_.peek().text == "^") {
      lex_.next();
      return std::pow(v, pow_expr());
    }
    return v;
  }

  double unary_expr() {
    if (lex_.peek().kind == Token::symbol && lex_.peek().text == "-") {
      lex_.next();
      return -unary_expr();
    }
    if (lex_.peek().kind == Token::symbol && lex_.peek().text == "+") {
      lex_.next();
      return unary_expr();
    }
    return atom_expr();
  }

  double atom_expr() {
    Token t = lex_.next();
    if (t.kind == Token::number) return t.value;
    if (t.kind == Token::symbol && t.text == "(") {
      double v = expr();
      expect_symbol(")");
      return v;
    }
    if (t.kind == Token::ident) {
      if (t.text == "pi") return kPi;
      static const std::map<std::string, double (*)(double)> funcs = {
          {"sin", std::sin}, {"cos", std::cos},   {"tan", std::tan},
          {"exp", std::exp}, {"ln", std::log},    {"sqrt", std::sqrt},
      };
      auto it = funcs.find(t.text);
      if (it != funcs.end()) {
        expect_symbol("(");
        double v = expr();
        expect_symbol(")");
        return it->second(v);
      }
      fail(t, "unknown identifier in expression '" + t.text + "'");
    }
    fail(t, "expected expression");
  }

  std::vector<double> param_list() {
    std::vector<double> ps;
    if (!(lex_.peek().kind == Token::symbol && lex_.peek().text == "(")) {
      return ps;
    }
    lex_.next();
    if (!(lex_.peek().kind == Token::symbol && lex_.peek().text == ")")) {
      ps.push_back(expr());
      while (lex_.peek().kind == Token::symbol && lex_.peek().text == ",") {
        lex_.next();
        ps.push_back(expr());
      }
    }
    expect_symbol(")");
    return ps;
  }

  std::vector<Operand> operand_list() {
    std::vector<Operand> ops;
    ops.push_back(qubit_operand());
    while (lex_.peek().kind == Token::symbol && lex_.peek().text == ",") {
      lex_.next();
      ops.push_back(qubit_operand());
    }
    expect_symbol(";");
    return ops;
  }

  void skip_statement() {
    while (lex_.peek().kind != Token::eof) {
      Token t = lex_.next();
      if (t.kind == Token::symbol && t.text == ";") return;
    }
  }

  void statement() {
    Token t = lex_.next();
    if (t.kind != Token::ident) fail(t, "expected statement");
    const std::string& name = t.text;
    if (name == "include") {
      lex_.next();  // the file string
      expect_symbol(";");
      return;
    }
    if (name == "qreg") {
      if (saw_qreg_) fail(t, "only one qreg is supported");
      Token reg = expect_ident();
      int n = expect_index();
      expect_symbol(";");
      qreg_name_ = reg.text;
      result_.circuit = Circuit(n);
      saw_qreg_ = true;
      return;
    }
    if (name == "creg") {
      expect_ident();
      expect_index();
      expect_symbol(";");
      return;
    }
    if (name == "opaque" || name == "gate") {
      // only the canonical-gate declaration is recognized
      Token g = expect_ident();
      if (g.text != "can") fail(g, "unsupported gate declaration '" + g.text + "'");
      skip_statement();
      return;
    }
    if (name == "barrier") {
      skip_statement();
      return;
    }
    if (name == "measure") {
      result_.warnings.push_back(
          {t.line, t.column, "measurement ignored (unitary metrics only)"});
      skip_statement();
      return;
    }
    if (name == "reset") {
      result_.warnings.push_back({t.line, t.column, "reset ignored"});
      skip_statement();
      return;
    }
    if (!saw_qreg_) fail(t, "gate before qreg declaration");
    apply_gate_stmt(t);
  }

  void broadcast(GateKind kind, std::vector<double> params,
                 const std::vector<Operand>& ops) {
    // 1q gates broadcast over a bare register operand
    if (ops.size() == 1 && ops[0].index < 0) {
      for (int q = 0; q < result_.circuit.n_qubits; ++q) {
        result_.circuit.push(Gate::simple(kind, {q}, params));
      }
      return;
    }
    std::vector<int> qs;
    for (const auto& op : ops) {
      if (op.index < 0) fail(op.at, "register operand not allowed here");
      qs.push_back(op.index);
    }
    for (size_t i = 0; i < qs.size(); ++i) {
      for (size_t j = i + 1; j < qs.size(); ++j) {
        if (qs[i] == qs[j]) fail(ops[0].at, "repeated qubit operand");
      }
    }
    result_.circuit.push(Gate::simple(kind, qs, params));
  }

  void apply_gate_stmt(const Token& t) {
    const std::string& name = t.text;
    auto params = param_list();
    auto ops = operand_list();
    auto need = [&](size_t nparams, size_t nops) {
      if (params.size() != nparams) {
        fail(t, "gate '" + name + "' expects " + std::to_string(nparams) +
                    " parameter(s)");
      }
      bool bare = ops.size() == 1 && ops[0].index < 0;
      if (!bare && ops.size() != nops) {
        fail(t, "gate '" + name + "' expects " + std::to_string(nops) +
                    " operand(s)");
      }
      if (bare && nops != 1) fail(t, "register broadcast only for 1q gates");
    };
    if (name == "u3" || name == "u") {
      need(3, 1);
      broadcast(GateKind::u3, params, ops);
    } else if (name == "u2") {
      need(2, 1);
      broadcast(GateKind::u3, {kPi / 2, params[0], params[1]}, ops);
    } else if (name == "u1" || name == "p") {
      need(1, 1);
      broadcast(GateKind::u3, {0, 0, params[0]}, ops);
    } else if (name == "can") {
      need(3, 2);
      WeylCoordinate c = canonicalize_coordinate(params[0], params[1],
                                                 params[2]);
      broadcast(GateKind::can, {c.x, c.y, c.z}, ops);
    } else if (name == "cx" || name == "CX") {
      need(0, 2);
      broadcast(GateKind::cx, {}, ops);
    } else if (name == "cz") {
      need(0, 2);
      broadcast(GateKind::cz, {}, ops);
    } else if (name == "ccx") {
      need(0, 3);
      broadcast(GateKind::ccx, {}, ops);
    } else if (name == "swap") {
      need(0, 2);
      broadcast(GateKind::swap_gate, {}, ops);
    } else if (name == "h") {
      need(0, 1);
      broadcast(GateKind::h, {}, ops);
    } else if (name == "x") {
      need(0, 1);
      broadcast(GateKind::x, {}, ops);
    } else if (name == "y") {
      need(0, 1);
      broadcast(GateKind::y, {}, ops);
    } else if (name == "z") {
      need(0, 1);
      broadcast(GateKind::z, {}, ops);
    } else if (name == "s") {
      need(0, 1);
      broadcast(GateKind::s, {}, ops);
    } else if (name == "sdg") {
      need(0, 1);
      broadcast(GateKind::rz, {-kPi / 2}, ops);
    } else if (name == "t") {
      need(0, 1);
      broadcast(GateKind::t, {}, ops);
    } else if (name == "tdg") {
      need(0, 1);
      broadcast(GateKind::rz, {-kPi / 4}, ops);
    } else if (name == "rz") {
      need(1, 1);
      broadcast(GateKind::rz, params, ops);
    } else if (name == "rx") {
      need(1, 1);
      broadcast(GateKind::rx, params, ops);
    } else if (name == "ry") {
      need(1, 1);
      broadcast(GateKind::ry, params, ops);
    } else if (name == "id") {
      need(0, 1);
      // no-op
    } else {
      fail(t, "unsupported gate '" + name + "'");
    }
  }

  Lexer lex_;
  ParseResult result_;
  std::string qreg_name_;
  bool saw_qreg_ = false;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ParseResult parse_qasm(const std::string& text) { return Parser(text).run(); }

std::string emit_qasm(const Circuit& c) {
  std::ostringstream out;
  out << "OPENQASM 2.0;\n";
  out << "include \"qelib1.inc\";\n";
  bool has_can = false;
  for (const auto& g : c.gates) {
    if (g.kind == GateKind::can) has_can = true;
    if (g.kind == GateKind::unitary_block) {
      throw NumericsError("emit_qasm: unitary blocks are synthesis-internal");
    }
  }
  if (has_can) out << "opaque can(x,y,z) a,b;\n";
  out << "qreg q[" << c.n_qubits << "];\n";
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::u3:
        out << "u3(" << fmt(g.params[0]) << "," << fmt(g.params[1]) << ","
            << fmt(g.params[2]) << ")";
        break;
      case GateKind::can:
        out << "can(" << fmt(g.params[0]) << "," << fmt(g.params[1]) << ","
            << fmt(g.params[2]) << ")";
        break;
      case GateKind::rz:
      case GateKind::rx:
      case GateKind::ry:
        out << gate_name(g.kind) << "(" << fmt(g.params[0]) << ")";
        break;
      default:
        out << gate_name(g.kind);
    }
    out << " ";
    for (size_t i = 0; i < g.qubits.size(); ++i) {
      out << (i ? "," : "") << "q[" << g.qubits[i] << "]";
    }
    out << ";\n";
  }
  return out.str();
}

}  // namespace reqisc
