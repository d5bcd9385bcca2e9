#include "biham/observable.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace biham {

const char* letter_name(Letter l) {
  switch (l) {
    case Letter::G: return "G";
    case Letter::Ginv: return "Ginv";
    case Letter::L: return "L";
    case Letter::Q: return "Q";
    case Letter::Qinv: return "Qinv";
  }
  return "?";
}

ObservableExpr::ObservableExpr(std::vector<WordTerm> terms) : terms_(std::move(terms)) {}

ObservableExpr ObservableExpr::word(double coeff, Part part,
                                    std::vector<Letter> letters) {
  WordTerm t{coeff, part, std::move(letters)};
  return ObservableExpr({std::move(t)});
}

ObservableExpr ObservableExpr::zero() { return ObservableExpr(); }

ObservableExpr ObservableExpr::operator*(double s) const {
  std::vector<WordTerm> out = terms_;
  for (auto& t : out) t.coeff *= s;
  return ObservableExpr(std::move(out));
}

ObservableExpr operator*(double s, const ObservableExpr& e) { return e * s; }

ObservableExpr ObservableExpr::operator+(const ObservableExpr& other) const {
  std::vector<WordTerm> out = terms_;
  out.insert(out.end(), other.terms_.begin(), other.terms_.end());
  return ObservableExpr(std::move(out));
}

// --- letter binding ---------------------------------------------------------

namespace {

struct LetterBinder {
  const Point& p;

  ComplexMatrix operator()(Letter l) const {
    struct Visitor {
      Letter l;
      ComplexMatrix operator()(const GlPoint& x) const {
        switch (l) {
          case Letter::G: return x.K;
          case Letter::Ginv: return x.K.partialPivLu().inverse();
          default: break;
        }
        throw std::invalid_argument(std::string("observable: letter ") +
                                    letter_name(l) + " undefined at a gl point");
      }
      ComplexMatrix operator()(const PhasePoint& x) const {
        switch (l) {
          case Letter::G: return x.g.m;
          case Letter::Ginv: return x.g.m.adjoint();
          case Letter::L: return x.L.m;
          default: break;
        }
        throw std::invalid_argument(std::string("observable: letter ") +
                                    letter_name(l) + " undefined at a phase point");
      }
      ComplexMatrix operator()(const ReducedPoint& x) const {
        switch (l) {
          case Letter::G:
          case Letter::Q: return x.Q.Q;
          case Letter::Ginv:
          case Letter::Qinv: return x.Q.inverse();
          case Letter::L: return x.L.m;
        }
        throw std::invalid_argument("observable: bad letter at a reduced point");
      }
      ComplexMatrix operator()(const ModelPoint1& x) const {
        switch (l) {
          case Letter::G: return x.g.m;
          case Letter::Ginv: return x.g.m.adjoint();
          case Letter::L: return x.b.m * x.b.m.adjoint();
          default: break;
        }
        throw std::invalid_argument(std::string("observable: letter ") +
                                    letter_name(l) + " undefined at a model1 point");
      }
      ComplexMatrix operator()(const ModelPoint2& x) const {
        switch (l) {
          case Letter::G: return x.g.m;
          case Letter::Ginv: return x.g.m.adjoint();
          case Letter::L: return x.L.m();
          default: break;
        }
        throw std::invalid_argument(std::string("observable: letter ") +
                                    letter_name(l) + " undefined at a model2 point");
      }
      ComplexMatrix operator()(const RSCoords&) const {
        throw std::invalid_argument(
            "observable: word evaluation is not defined at decoupled coordinates");
      }
    };
    return std::visit(Visitor{l}, p);
  }
};

}  // namespace

ComplexMatrix letter_matrix(Letter l, const Point& p) { return LetterBinder{p}(l); }

Complex word_trace(const std::vector<Letter>& word, const Point& p) {
  const int n = point_dim(p);
  if (word.empty()) return Complex(static_cast<double>(n), 0.0);
  LetterBinder bind{p};
  ComplexMatrix acc = bind(word[0]);
  for (std::size_t i = 1; i < word.size(); ++i) acc *= bind(word[i]);
  return acc.trace();
}

double ObservableExpr::evaluate(const Point& p) const {
  double total = 0.0;
  for (const auto& t : terms_) {
    const Complex tr = word_trace(t.word, p);
    total += t.coeff * (t.part == Part::Re ? tr.real() : tr.imag());
  }
  return total;
}

ObservableExpr ObservableExpr::unit_shift_derived() const {
  std::vector<WordTerm> out;
  for (const auto& t : terms_) {
    for (std::size_t i = 0; i < t.word.size(); ++i) {
      if (t.word[i] != Letter::L) continue;
      WordTerm d;
      d.coeff = t.coeff;
      d.part = t.part;
      d.word = t.word;
      d.word.erase(d.word.begin() + static_cast<std::ptrdiff_t>(i));
      out.push_back(std::move(d));
    }
  }
  return ObservableExpr(std::move(out));
}

namespace {

// Valid invariant words are cyclic interleavings of L blocks and
// Qinv L...L Q blocks, or contain no L letter at all.
bool invariant_word_pattern(const std::vector<WordTerm>& terms,
                            const std::vector<Letter>& w) {
  (void)terms;
  bool has_l = false;
  for (Letter l : w) {
    if (l == Letter::G || l == Letter::Ginv) return false;
    if (l == Letter::L) has_l = true;
  }
  if (!has_l) return true;  // words in Q alone
  for (int start_depth = 0; start_depth <= 1; ++start_depth) {
    int depth = start_depth;
    bool ok = true;
    for (Letter l : w) {
      if (l == Letter::Qinv) {
        if (depth != 0) { ok = false; break; }
        depth = 1;
      } else if (l == Letter::Q) {
        if (depth != 1) { ok = false; break; }
        depth = 0;
      }
    }
    if (ok && depth == start_depth) return true;
  }
  return false;
}

}  // namespace

ObservableExpr ObservableExpr::extend_invariant() const {
  std::vector<WordTerm> out;
  for (const auto& t : terms_) {
    if (!invariant_word_pattern(terms_, t.word)) {
      throw std::invalid_argument(
          "extend_invariant: non-invariant input word pattern in " + str());
    }
    WordTerm lifted = t;
    for (auto& l : lifted.word) {
      if (l == Letter::Q) l = Letter::G;
      if (l == Letter::Qinv) l = Letter::Ginv;
    }
    out.push_back(std::move(lifted));
  }
  return ObservableExpr(std::move(out));
}

// --- text form --------------------------------------------------------------

std::string ObservableExpr::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) os << " + ";
    first = false;
    std::ostringstream coeff;
    coeff.precision(17);
    coeff << t.coeff;
    os << coeff.str() << '*' << (t.part == Part::Re ? "Re" : "Im") << " tr(";
    for (std::size_t i = 0; i < t.word.size(); ++i) {
      if (i) os << ' ';
      os << letter_name(t.word[i]);
    }
    os << ')';
  }
  return os.str();
}

namespace {

struct Parser {
  const std::string& s;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("observable parse error at position " +
                                std::to_string(pos) + ": " + what);
  }
  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  bool lookahead_word(const char* w) {
    skip_ws();
    std::size_t i = 0;
    while (w[i]) {
      if (pos + i >= s.size() || s[pos + i] != w[i]) return false;
      ++i;
    }
    return true;
  }
  void expect_word(const char* w) {
    if (!lookahead_word(w)) fail(std::string("expected '") + w + "'");
    pos += std::string(w).size();
  }

  double number() {
    skip_ws();
    std::size_t consumed = 0;
    double v = 0.0;
    try {
      v = std::stod(s.substr(pos), &consumed);
    } catch (const std::exception&) {
      fail("expected a number");
    }
    pos += consumed;
    return v;
  }

  Letter letter() {
    skip_ws();
    if (lookahead_word("Ginv")) { pos += 4; return Letter::Ginv; }
    if (lookahead_word("Qinv")) { pos += 4; return Letter::Qinv; }
    if (lookahead_word("G")) { pos += 1; return Letter::G; }
    if (lookahead_word("Q")) { pos += 1; return Letter::Q; }
    if (lookahead_word("L")) { pos += 1; return Letter::L; }
    fail("expected a letter (G, Ginv, L, Q, Qinv)");
  }

  WordTerm term(double sign) {
    WordTerm t;
    skip_ws();
    // optional coefficient
    if (pos < s.size() &&
        (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' ||
         s[pos] == '-' || s[pos] == '+')) {
      t.coeff = number();
      if (!eat('*')) fail("expected '*' after coefficient");
    }
    t.coeff *= sign;
    skip_ws();
    if (lookahead_word("Re")) {
      pos += 2;
      t.part = Part::Re;
    } else if (lookahead_word("Im")) {
      pos += 2;
      t.part = Part::Im;
    } else {
      fail("expected 'Re' or 'Im'");
    }
    skip_ws();
    expect_word("tr");
    if (!eat('(')) fail("expected '(' after tr");
    skip_ws();
    while (!eat(')')) {
      if (pos >= s.size()) fail("unterminated word");
      t.word.push_back(letter());
      skip_ws();
    }
    return t;
  }
};

}  // namespace

ObservableExpr ObservableExpr::parse(const std::string& text) {
  Parser p{text};
  std::vector<WordTerm> terms;
  double sign = 1.0;
  p.skip_ws();
  if (p.pos >= text.size()) p.fail("empty observable");
  terms.push_back(p.term(sign));
  for (;;) {
    p.skip_ws();
    if (p.pos >= text.size()) break;
    if (p.eat('+')) {
      sign = 1.0;
    } else if (p.eat('-')) {
      sign = -1.0;
    } else {
      p.fail("expected '+' or '-' between terms");
    }
    terms.push_back(p.term(sign));
  }
  return ObservableExpr(std::move(terms));
}

Observable::Observable(ObservableExpr e) : expr(std::move(e)) {
  const ObservableExpr& ref = *expr;
  fn = [ref](const Point& p) { return ref.evaluate(p); };
}

Observable::Observable(std::function<double(const Point&)> f) : fn(std::move(f)) {
  if (!fn) throw std::invalid_argument("Observable: empty callable");
}

}  // namespace biham
