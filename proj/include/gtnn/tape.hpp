#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gtnn {

class Tape;

/// Scalar tracked on a Tape, or an untracked constant.
///
/// Arithmetic between Vars records nodes on the owning tape; constants fold
/// into the local partials and never allocate nodes, so data values mixed
/// into an expression do not pollute the gradient.
class Var {
 public:
  Var() = default;                                // constant 0
  Var(double c) : val_(c) {}                      // untracked constant
  double value() const { return val_; }
  bool tracked() const { return idx_ >= 0; }

 private:
  friend class Tape;
  friend Var operator+(const Var&, const Var&);
  friend Var operator-(const Var&, const Var&);
  friend Var operator*(const Var&, const Var&);
  friend Var operator/(const Var&, const Var&);
  friend Var operator-(const Var&);
  friend Var relu(const Var&);
  friend Var step(const Var&);
  friend Var sigmoid(const Var&);
  friend Var exp(const Var&);
  friend Var log(const Var&);
  friend Var sqrt(const Var&);
  friend Var sin(const Var&);
  friend Var cos(const Var&);
  friend Var square(const Var&);

  Var(Tape* tape, int idx, double val) : tape_(tape), idx_(idx), val_(val) {}

  Tape* tape_ = nullptr;
  int idx_ = -1;
  double val_ = 0.0;
};

/// Reverse-mode scalar autodiff graph.
///
/// Nodes are appended in evaluation order, which is automatically a
/// topological order, and the backward sweep walks them in reverse. Leaves
/// are registered explicitly with leaf(); gradient() returns d(root)/d(leaf)
/// for every registered leaf in registration order.
class Tape {
 public:
  /// Registers a trainable input.
  Var leaf(double value);

  /// Drops all nodes and leaf registrations.
  void reset();

  std::size_t size() const { return nodes_.size(); }
  std::size_t leaf_count() const { return leaves_.size(); }

  /// Backward sweep from root; returns the gradient over registered leaves.
  /// Throws std::invalid_argument if root does not live on this tape.
  std::vector<double> gradient(const Var& root);

  /// Adjoint of an arbitrary tracked Var after the last gradient() call.
  double adjoint(const Var& v) const;

  // Node recording, used by the Var operators.
  Var unary(const Var& a, double value, double da);
  Var binary(const Var& a, const Var& b, double value, double da, double db);

 private:
  struct Node {
    int pa, pb;      // parent indices, -1 when absent
    double da, db;   // local partials
  };
  std::vector<Node> nodes_;
  std::vector<int> leaves_;
  std::vector<double> adj_;
};

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& a);

inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }

Var relu(const Var& x);
Var step(const Var& x);  // zero derivative everywhere
Var sigmoid(const Var& x);
Var exp(const Var& x);
Var log(const Var& x);
Var sqrt(const Var& x);
Var sin(const Var& x);
Var cos(const Var& x);
Var square(const Var& x);

}  // namespace gtnn
