// observable.hpp — real observables built from traces of words in the
// dynamical matrices.  A word is a sequence over {G, Ginv, L, Q, Qinv}; an
// observable is a linear combination of Re/Im parts of word traces.  Words
// admit exact directional derivatives, which is what the bracket evaluators
// consume.
//
// Letter bindings per point kind:
//   phase/model2 : G -> g, Ginv -> g^{-1}, L -> L
//   reduced      : Q -> Q, Qinv -> Q^{-1}, L -> L  (G letters also bind to Q)
//   model1       : G -> g, Ginv -> g^{-1}, L -> b b^dagger
//   gl           : G -> K, Ginv -> K^{-1}  (no L/Q letters)

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "biham/points.hpp"

namespace biham {

enum class Letter { G, Ginv, L, Q, Qinv };

const char* letter_name(Letter l);

enum class Part { Re, Im };

struct WordTerm {
  double coeff = 1.0;
  Part part = Part::Re;
  std::vector<Letter> word;  // empty word stands for the identity matrix
};

class ObservableExpr {
 public:
  ObservableExpr() = default;
  explicit ObservableExpr(std::vector<WordTerm> terms);

  // Single-term helpers.
  static ObservableExpr word(double coeff, Part part, std::vector<Letter> letters);
  static ObservableExpr zero();

  // Canonical text form, e.g. "0.5*Re tr(L L) + 1*Im tr(G L)".
  // parse() accepts exactly this grammar and reports the failure position.
  static ObservableExpr parse(const std::string& text);
  std::string str() const;

  const std::vector<WordTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  double evaluate(const Point& p) const;

  // Exact derivative along the flow L -> L + t I, as an observable.
  ObservableExpr unit_shift_derived() const;

  // Textual substitution Q -> G after checking that every word is built from
  // blocks L and Qinv..L..Q (or uses no L at all).  Throws
  // std::invalid_argument on non-invariant word patterns.
  ObservableExpr extend_invariant() const;

  ObservableExpr operator*(double s) const;
  ObservableExpr operator+(const ObservableExpr& other) const;

 private:
  std::vector<WordTerm> terms_;
};

ObservableExpr operator*(double s, const ObservableExpr& e);

// An observable handed to bracket evaluators: either a word expression
// (exact derivatives available) or a plain callable (finite differences).
struct Observable {
  std::optional<ObservableExpr> expr;
  std::function<double(const Point&)> fn;

  Observable(ObservableExpr e);
  Observable(std::function<double(const Point&)> f);
  double operator()(const Point& p) const { return fn(p); }
  bool exact() const { return expr.has_value(); }
};

// Matrices bound to the letters at a point.  Throws on alphabet mismatch.
ComplexMatrix letter_matrix(Letter l, const Point& p);

// Value of tr(word) at a point.
Complex word_trace(const std::vector<Letter>& word, const Point& p);

}  // namespace biham
