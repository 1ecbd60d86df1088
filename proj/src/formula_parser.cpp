#include "freqmc/formula.hpp"

#include <cctype>

namespace freqmc {

namespace {

enum class Tok { Ident, True, False, Not, And, Or, Implies, Next, Until, Eventually, Globally,
                 LParen, RParen, LBrace, RBrace, Number, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      int line = line_, col = col_;
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, "", line, col});
        return out;
      }
      char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string word;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
          word += advance();
        out.push_back({keyword(word), word, line, col});
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::string num;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                       text_[pos_] == '.' || text_[pos_] == '/'))
          num += advance();
        out.push_back({Tok::Number, num, line, col});
      } else if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
        advance();
        advance();
        out.push_back({Tok::Implies, "->", line, col});
      } else {
        Tok kind;
        switch (c) {
          case '!': kind = Tok::Not; break;
          case '&': kind = Tok::And; break;
          case '|': kind = Tok::Or; break;
          case '(': kind = Tok::LParen; break;
          case ')': kind = Tok::RParen; break;
          case '{': kind = Tok::LBrace; break;
          case '}': kind = Tok::RBrace; break;
          default:
            throw FormulaSyntaxError(std::string("unexpected character '") + c + "'", line, col);
        }
        advance();
        out.push_back({kind, std::string(1, c), line, col});
      }
    }
  }

 private:
  static Tok keyword(const std::string& w) {
    if (w == "true") return Tok::True;
    if (w == "false") return Tok::False;
    if (w == "X") return Tok::Next;
    if (w == "U") return Tok::Until;
    if (w == "F") return Tok::Eventually;
    if (w == "G") return Tok::Globally;
    return Tok::Ident;
  }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Formula parse() {
    Formula f = implication();
    if (peek().kind != Tok::End) error("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  [[noreturn]] void error(const std::string& what) const {
    throw FormulaSyntaxError(what, peek().line, peek().column);
  }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) error(std::string("expected ") + what);
    take();
  }

  Formula implication() {
    Formula lhs = disjunction();
    if (peek().kind == Tok::Implies) {
      take();
      return Formula::implies(lhs, implication());
    }
    return lhs;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (peek().kind == Tok::Or) {
      take();
      f = Formula::disjunction(f, conjunction());
    }
    return f;
  }

  Formula conjunction() {
    Formula f = until();
    while (peek().kind == Tok::And) {
      take();
      f = Formula::conjunction(f, until());
    }
    return f;
  }

  Formula until() {
    Formula lhs = unary();
    if (peek().kind == Tok::Until) {
      take();
      return Formula::until(lhs, until());
    }
    return lhs;
  }

  Formula unary() {
    switch (peek().kind) {
      case Tok::Not: take(); return Formula::negation(unary());
      case Tok::Next: take(); return Formula::next(unary());
      case Tok::Eventually: take(); return Formula::eventually(unary());
      case Tok::Globally: {
        take();
        if (peek().kind != Tok::LBrace) return Formula::globally(unary());
        take();
        const Token& num = peek();
        if (num.kind != Tok::Number) error("expected frequency bound");
        Rational bound;
        try {
          bound = parse_rational(num.text);
        } catch (const std::invalid_argument& e) {
          error(e.what());
        }
        if (bound < 0 || bound > 1)
          error("frequency bound " + num.text + " outside [0,1]");
        take();
        expect(Tok::RBrace, "'}'");
        return Formula::freq_globally(bound, unary());
      }
      default: return primary();
    }
  }

  Formula primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::True: take(); return Formula::tt();
      case Tok::False: take(); return Formula::ff();
      case Tok::Ident: take(); return Formula::atom(t.text);
      case Tok::LParen: {
        take();
        Formula f = implication();
        expect(Tok::RParen, "')'");
        return f;
      }
      case Tok::End: error("unexpected end of formula");
      default: error("unexpected '" + t.text + "'");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_formula(std::string_view text) { return Parser(Lexer(text).run()).parse(); }

}  // namespace freqmc
