#include "cmm/tape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cmm/kernels.hpp"

namespace cmm {
namespace {

double stable_sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double stable_softplus(double z) {
  // softplus(z) = max(z, 0) + log1p(exp(-|z|))
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace

Var Tape::alloc(Op op, std::size_t len, std::uint32_t a, std::uint32_t b) {
  Rec r;
  r.op = op;
  r.off = static_cast<std::uint32_t>(vals_.size());
  r.len = static_cast<std::uint32_t>(len);
  r.a = a;
  r.b = b;
  vals_.resize(vals_.size() + len, 0.0);
  grads_.resize(grads_.size() + len, 0.0);
  recs_.push_back(r);
  return Var{static_cast<std::uint32_t>(recs_.size() - 1), this};
}

void Tape::check_same_tape(Var v) const {
  if (v.tape != this) throw std::invalid_argument("tape: node from another tape");
  if (v.id >= recs_.size()) throw std::invalid_argument("tape: stale node handle");
}

Var Tape::input(std::span<const double> values) {
  Var v = alloc(Op::kInput, values.size(), 0, 0);
  std::copy(values.begin(), values.end(), vptr(recs_[v.id]));
  return v;
}

Var Tape::input(double value) { return input(std::span<const double>(&value, 1)); }

Var Tape::binary_elementwise(Op op, Var a, Var b) {
  check_same_tape(a);
  check_same_tape(b);
  const std::size_t na = recs_[a.id].len, nb = recs_[b.id].len;
  if (na != nb && na != 1 && nb != 1)
    throw std::invalid_argument("tape: elementwise length mismatch (" +
                                std::to_string(na) + " vs " + std::to_string(nb) + ")");
  const std::size_t n = std::max(na, nb);
  Var y = alloc(op, n, a.id, b.id);
  const auto& k = kernels::active();
  const Rec& ra = recs_[a.id];
  const Rec& rb = recs_[b.id];
  Rec& ry = recs_[y.id];
  const double* pa = vptr(ra);
  const double* pb = vptr(rb);
  double* py = vptr(ry);
  if (na == nb) {
    switch (op) {
      case Op::kAdd: k.add(pa, pb, py, n); break;
      case Op::kSub: k.sub(pa, pb, py, n); break;
      case Op::kMul: k.mul(pa, pb, py, n); break;
      case Op::kDiv:
        for (std::size_t i = 0; i < n; ++i) {
          if (pb[i] == 0.0)
            throw std::domain_error("tape: division by zero at node " +
                                    std::to_string(y.id));
          py[i] = pa[i] / pb[i];
        }
        break;
      default: throw std::logic_error("tape: not an elementwise op");
    }
    return y;
  }
  // broadcast path
  for (std::size_t i = 0; i < n; ++i) {
    const double va = pa[na == 1 ? 0 : i];
    const double vb = pb[nb == 1 ? 0 : i];
    switch (op) {
      case Op::kAdd: py[i] = va + vb; break;
      case Op::kSub: py[i] = va - vb; break;
      case Op::kMul: py[i] = va * vb; break;
      case Op::kDiv:
        if (vb == 0.0)
          throw std::domain_error("tape: division by zero at node " +
                                  std::to_string(y.id));
        py[i] = va / vb;
        break;
      default: throw std::logic_error("tape: not an elementwise op");
    }
  }
  return y;
}

Var Tape::add(Var a, Var b) { return binary_elementwise(Op::kAdd, a, b); }
Var Tape::sub(Var a, Var b) { return binary_elementwise(Op::kSub, a, b); }
Var Tape::mul(Var a, Var b) { return binary_elementwise(Op::kMul, a, b); }
Var Tape::div(Var a, Var b) { return binary_elementwise(Op::kDiv, a, b); }

Var Tape::unary(Op op, Var a) {
  check_same_tape(a);
  const std::size_t n = recs_[a.id].len;
  Var y = alloc(op, n, a.id, 0);
  const double* pa = vptr(recs_[a.id]);
  double* py = vptr(recs_[y.id]);
  switch (op) {
    case Op::kNeg:
      for (std::size_t i = 0; i < n; ++i) py[i] = -pa[i];
      break;
    case Op::kExp:
      for (std::size_t i = 0; i < n; ++i) py[i] = std::exp(pa[i]);
      break;
    case Op::kLn:
      for (std::size_t i = 0; i < n; ++i) {
        if (pa[i] < 0.0)
          throw std::domain_error("tape: ln of negative value at node " +
                                  std::to_string(y.id));
        py[i] = std::log(std::max(pa[i], kLnClamp));
      }
      break;
    case Op::kSigmoid:
      for (std::size_t i = 0; i < n; ++i) py[i] = stable_sigmoid(pa[i]);
      break;
    case Op::kSoftplus:
      for (std::size_t i = 0; i < n; ++i) py[i] = stable_softplus(pa[i]);
      break;
    case Op::kRelu:
      for (std::size_t i = 0; i < n; ++i) py[i] = pa[i] > 0.0 ? pa[i] : 0.0;
      break;
    default: throw std::logic_error("tape: not a unary op");
  }
  return y;
}

Var Tape::neg(Var a) { return unary(Op::kNeg, a); }
Var Tape::exp(Var a) { return unary(Op::kExp, a); }
Var Tape::ln(Var a) { return unary(Op::kLn, a); }
Var Tape::sigmoid(Var a) { return unary(Op::kSigmoid, a); }
Var Tape::softplus(Var a) { return unary(Op::kSoftplus, a); }
Var Tape::relu(Var a) { return unary(Op::kRelu, a); }

Var Tape::affine(Var x, double a, double b) {
  check_same_tape(x);
  const std::size_t n = recs_[x.id].len;
  Var y = alloc(Op::kAffine, n, x.id, 0);
  recs_[y.id].c0 = a;
  recs_[y.id].c1 = b;
  const double* px = vptr(recs_[x.id]);
  double* py = vptr(recs_[y.id]);
  for (std::size_t i = 0; i < n; ++i) py[i] = a * px[i] + b;
  return y;
}

Var Tape::matvec(Var w, Var x, std::size_t rows, std::size_t cols) {
  check_same_tape(w);
  check_same_tape(x);
  if (recs_[w.id].len != rows * cols)
    throw std::invalid_argument("tape: matvec weight length != rows*cols");
  if (recs_[x.id].len != cols)
    throw std::invalid_argument("tape: matvec input length != cols");
  Var y = alloc(Op::kMatVec, rows, w.id, x.id);
  recs_[y.id].aux = static_cast<std::uint32_t>(cols);
  kernels::active().matvec(vptr(recs_[w.id]), vptr(recs_[x.id]),
                           vptr(recs_[y.id]), rows, cols);
  return y;
}

Var Tape::dot(Var a, Var b) {
  check_same_tape(a);
  check_same_tape(b);
  if (recs_[a.id].len != recs_[b.id].len)
    throw std::invalid_argument("tape: dot length mismatch");
  Var y = alloc(Op::kDot, 1, a.id, b.id);
  *vptr(recs_[y.id]) =
      kernels::active().dot(vptr(recs_[a.id]), vptr(recs_[b.id]), recs_[a.id].len);
  return y;
}

Var Tape::softmax(Var a) {
  check_same_tape(a);
  const std::size_t n = recs_[a.id].len;
  if (n == 0) throw std::invalid_argument("tape: softmax of empty vector");
  Var y = alloc(Op::kSoftmax, n, a.id, 0);
  const double* pa = vptr(recs_[a.id]);
  double* py = vptr(recs_[y.id]);
  const double m = *std::max_element(pa, pa + n);
  for (std::size_t i = 0; i < n; ++i) py[i] = std::exp(pa[i] - m);
  const double s = kernels::active().sum(py, n);
  for (std::size_t i = 0; i < n; ++i) py[i] /= s;
  return y;
}

Var Tape::logsumexp(Var a) {
  check_same_tape(a);
  const std::size_t n = recs_[a.id].len;
  if (n == 0) throw std::invalid_argument("tape: logsumexp of empty vector");
  Var y = alloc(Op::kLogSumExp, 1, a.id, 0);
  const double* pa = vptr(recs_[a.id]);
  const double m = *std::max_element(pa, pa + n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(pa[i] - m);
  *vptr(recs_[y.id]) = m + std::log(s);
  return y;
}

Var Tape::max_index(Var a) {
  check_same_tape(a);
  const std::size_t n = recs_[a.id].len;
  if (n == 0) throw std::invalid_argument("tape: max_index of empty vector");
  Var y = alloc(Op::kMaxIndex, 1, a.id, 0);
  const double* pa = vptr(recs_[a.id]);
  *vptr(recs_[y.id]) =
      static_cast<double>(std::max_element(pa, pa + n) - pa);
  return y;
}

Var Tape::sum(Var a) {
  check_same_tape(a);
  Var y = alloc(Op::kSum, 1, a.id, 0);
  *vptr(recs_[y.id]) = kernels::active().sum(vptr(recs_[a.id]), recs_[a.id].len);
  return y;
}

Var Tape::pick(Var a, std::size_t index) {
  check_same_tape(a);
  if (index >= recs_[a.id].len)
    throw std::invalid_argument("tape: pick index out of range");
  Var y = alloc(Op::kPick, 1, a.id, 0);
  recs_[y.id].aux = static_cast<std::uint32_t>(index);
  *vptr(recs_[y.id]) = vptr(recs_[a.id])[index];
  return y;
}

Var Tape::concat(Var a, Var b) {
  check_same_tape(a);
  check_same_tape(b);
  const std::size_t na = recs_[a.id].len, nb = recs_[b.id].len;
  Var y = alloc(Op::kConcat, na + nb, a.id, b.id);
  double* py = vptr(recs_[y.id]);
  std::copy_n(vptr(recs_[a.id]), na, py);
  std::copy_n(vptr(recs_[b.id]), nb, py + na);
  return y;
}

void Tape::backward(Var root) {
  check_same_tape(root);
  if (recs_[root.id].len != 1)
    throw std::invalid_argument("tape: backward root must be scalar");
  std::fill(grads_.begin(), grads_.end(), 0.0);
  grads_[recs_[root.id].off] = 1.0;

  const auto& k = kernels::active();
  for (std::size_t idx = root.id + 1; idx-- > 0;) {
    const Rec& r = recs_[idx];
    const std::size_t n = r.len;
    const double* gy = gptr(r);
    const double* y = vptr(r);
    switch (r.op) {
      case Op::kInput:
        break;
      case Op::kAdd:
      case Op::kSub:
      case Op::kMul:
      case Op::kDiv: {
        const Rec& ra = recs_[r.a];
        const Rec& rb = recs_[r.b];
        double* ga = gptr(ra);
        double* gb = gptr(rb);
        const double* pa = vptr(ra);
        const double* pb = vptr(rb);
        const bool sa = ra.len == 1 && n > 1;  // broadcast flags
        const bool sb = rb.len == 1 && n > 1;
        for (std::size_t i = 0; i < n; ++i) {
          const double g = gy[i];
          const double va = pa[sa ? 0 : i];
          const double vb = pb[sb ? 0 : i];
          double da = 0.0, db = 0.0;
          switch (r.op) {
            case Op::kAdd: da = g; db = g; break;
            case Op::kSub: da = g; db = -g; break;
            case Op::kMul: da = g * vb; db = g * va; break;
            case Op::kDiv: da = g / vb; db = -g * va / (vb * vb); break;
            default: break;
          }
          ga[sa ? 0 : i] += da;
          gb[sb ? 0 : i] += db;
        }
        break;
      }
      case Op::kNeg:
        k.axpy(-1.0, gy, gptr(recs_[r.a]), n);
        break;
      case Op::kExp:
        k.mul_acc(gy, y, gptr(recs_[r.a]), n);
        break;
      case Op::kLn: {
        const double* pa = vptr(recs_[r.a]);
        double* ga = gptr(recs_[r.a]);
        for (std::size_t i = 0; i < n; ++i)
          if (pa[i] >= kLnClamp) ga[i] += gy[i] / pa[i];
        break;
      }
      case Op::kSigmoid: {
        double* ga = gptr(recs_[r.a]);
        for (std::size_t i = 0; i < n; ++i) ga[i] += gy[i] * y[i] * (1.0 - y[i]);
        break;
      }
      case Op::kSoftplus: {
        const double* pa = vptr(recs_[r.a]);
        double* ga = gptr(recs_[r.a]);
        for (std::size_t i = 0; i < n; ++i) ga[i] += gy[i] * stable_sigmoid(pa[i]);
        break;
      }
      case Op::kRelu: {
        const double* pa = vptr(recs_[r.a]);
        double* ga = gptr(recs_[r.a]);
        for (std::size_t i = 0; i < n; ++i)
          if (pa[i] > 0.0) ga[i] += gy[i];
        break;
      }
      case Op::kAffine:
        k.axpy(r.c0, gy, gptr(recs_[r.a]), n);
        break;
      case Op::kMatVec: {
        const std::size_t cols = r.aux;
        const std::size_t rows = n;
        k.outer_acc(gy, vptr(recs_[r.b]), gptr(recs_[r.a]), rows, cols);
        k.matvec_t_acc(vptr(recs_[r.a]), gy, gptr(recs_[r.b]), rows, cols);
        break;
      }
      case Op::kDot: {
        const double g = gy[0];
        k.axpy(g, vptr(recs_[r.b]), gptr(recs_[r.a]), recs_[r.a].len);
        k.axpy(g, vptr(recs_[r.a]), gptr(recs_[r.b]), recs_[r.a].len);
        break;
      }
      case Op::kSoftmax: {
        double* ga = gptr(recs_[r.a]);
        const double s = k.dot(gy, y, n);
        for (std::size_t i = 0; i < n; ++i) ga[i] += y[i] * (gy[i] - s);
        break;
      }
      case Op::kLogSumExp: {
        const double g = gy[0];
        const double* pa = vptr(recs_[r.a]);
        double* ga = gptr(recs_[r.a]);
        const double lse = y[0];
        for (std::size_t i = 0; i < recs_[r.a].len; ++i)
          ga[i] += g * std::exp(pa[i] - lse);
        break;
      }
      case Op::kMaxIndex:
        break;  // non-differentiable, zero contribution
      case Op::kSum: {
        const double g = gy[0];
        double* ga = gptr(recs_[r.a]);
        for (std::size_t i = 0; i < recs_[r.a].len; ++i) ga[i] += g;
        break;
      }
      case Op::kPick:
        gptr(recs_[r.a])[r.aux] += gy[0];
        break;
      case Op::kConcat: {
        const std::size_t na = recs_[r.a].len;
        k.axpy(1.0, gy, gptr(recs_[r.a]), na);
        k.axpy(1.0, gy + na, gptr(recs_[r.b]), recs_[r.b].len);
        break;
      }
    }
  }
}

std::span<const double> Tape::value(Var v) const {
  check_same_tape(v);
  const Rec& r = recs_[v.id];
  return {vals_.data() + r.off, r.len};
}

std::span<const double> Tape::adjoint(Var v) const {
  check_same_tape(v);
  const Rec& r = recs_[v.id];
  return {grads_.data() + r.off, r.len};
}

void Tape::clear() {
  recs_.clear();
  vals_.clear();
  grads_.clear();
}

}  // namespace cmm
