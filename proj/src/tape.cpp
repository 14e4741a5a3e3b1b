#include "gtnn/tape.hpp"

#include <cmath>
#include <stdexcept>

namespace gtnn {

Var Tape::leaf(double value) {
  nodes_.push_back({-1, -1, 0.0, 0.0});
  const int idx = static_cast<int>(nodes_.size()) - 1;
  leaves_.push_back(idx);
  return Var(this, idx, value);
}

void Tape::reset() {
  nodes_.clear();
  leaves_.clear();
  adj_.clear();
}

Var Tape::unary(const Var& a, double value, double da) {
  nodes_.push_back({a.idx_, -1, da, 0.0});
  return Var(this, static_cast<int>(nodes_.size()) - 1, value);
}

Var Tape::binary(const Var& a, const Var& b, double value, double da, double db) {
  nodes_.push_back({a.idx_, b.idx_, da, db});
  return Var(this, static_cast<int>(nodes_.size()) - 1, value);
}

std::vector<double> Tape::gradient(const Var& root) {
  if (!root.tracked() || root.tape_ != this)
    throw std::invalid_argument("Tape::gradient: root is not on this tape");
  adj_.assign(nodes_.size(), 0.0);
  adj_[static_cast<std::size_t>(root.idx_)] = 1.0;
  for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
    const double a = adj_[static_cast<std::size_t>(i)];
    if (a == 0.0) continue;
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.pa >= 0) adj_[static_cast<std::size_t>(n.pa)] += n.da * a;
    if (n.pb >= 0) adj_[static_cast<std::size_t>(n.pb)] += n.db * a;
  }
  std::vector<double> g(leaves_.size());
  for (std::size_t k = 0; k < leaves_.size(); ++k)
    g[k] = adj_[static_cast<std::size_t>(leaves_[k])];
  return g;
}

double Tape::adjoint(const Var& v) const {
  if (!v.tracked() || v.tape_ != this)
    throw std::invalid_argument("Tape::adjoint: var is not on this tape");
  return adj_.at(static_cast<std::size_t>(v.idx_));
}

namespace {

Tape* owner(const Var& a, const Var& b, Tape* ta, Tape* tb) {
  if (ta && tb && ta != tb)
    throw std::invalid_argument("Var arithmetic: operands belong to different tapes");
  return ta ? ta : tb;
}

}  // namespace

Var operator+(const Var& a, const Var& b) {
  Tape* t = owner(a, b, a.tape_, b.tape_);
  const double v = a.val_ + b.val_;
  if (!t) return Var(v);
  if (a.tracked() && b.tracked()) return t->binary(a, b, v, 1.0, 1.0);
  return t->unary(a.tracked() ? a : b, v, 1.0);
}

Var operator-(const Var& a, const Var& b) {
  Tape* t = owner(a, b, a.tape_, b.tape_);
  const double v = a.val_ - b.val_;
  if (!t) return Var(v);
  if (a.tracked() && b.tracked()) return t->binary(a, b, v, 1.0, -1.0);
  if (a.tracked()) return t->unary(a, v, 1.0);
  return t->unary(b, v, -1.0);
}

Var operator*(const Var& a, const Var& b) {
  Tape* t = owner(a, b, a.tape_, b.tape_);
  const double v = a.val_ * b.val_;
  if (!t) return Var(v);
  if (a.tracked() && b.tracked()) return t->binary(a, b, v, b.val_, a.val_);
  if (a.tracked()) return t->unary(a, v, b.val_);
  return t->unary(b, v, a.val_);
}

Var operator/(const Var& a, const Var& b) {
  Tape* t = owner(a, b, a.tape_, b.tape_);
  const double v = a.val_ / b.val_;
  if (!t) return Var(v);
  const double da = 1.0 / b.val_;
  const double db = -a.val_ / (b.val_ * b.val_);
  if (a.tracked() && b.tracked()) return t->binary(a, b, v, da, db);
  if (a.tracked()) return t->unary(a, v, da);
  return t->unary(b, v, db);
}

Var operator-(const Var& a) {
  if (!a.tracked()) return Var(-a.val_);
  return a.tape_->unary(a, -a.val_, -1.0);
}

#define GTNN_UNARY(name, vexpr, dexpr)                    \
  Var name(const Var& x) {                                \
    const double xv = x.val_;                             \
    const double v = (vexpr);                             \
    if (!x.tracked()) return Var(v);                      \
    return x.tape_->unary(x, v, (dexpr));                 \
  }

GTNN_UNARY(relu, xv > 0.0 ? xv : 0.0, xv >= 0.0 ? 1.0 : 0.0)
GTNN_UNARY(step, xv >= 0.0 ? 1.0 : 0.0, 0.0)
GTNN_UNARY(exp, std::exp(xv), v)
GTNN_UNARY(log, std::log(xv), 1.0 / xv)
GTNN_UNARY(sqrt, std::sqrt(xv), 0.5 / v)
GTNN_UNARY(sin, std::sin(xv), std::cos(xv))
GTNN_UNARY(cos, std::cos(xv), -std::sin(xv))
GTNN_UNARY(square, xv * xv, 2.0 * xv)

#undef GTNN_UNARY

Var sigmoid(const Var& x) {
  const double s = 1.0 / (1.0 + std::exp(-x.val_));
  if (!x.tracked()) return Var(s);
  return x.tape_->unary(x, s, s * (1.0 - s));
}

}  // namespace gtnn
