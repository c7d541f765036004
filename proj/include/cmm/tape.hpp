#pragma once
// Reverse-mode differentiable expression tape over dense real vectors.
//
// Nodes are vector-valued; values and adjoints live in flat arrays owned by
// the tape, so the primitive forward/backward rules reduce to the dense
// kernels in kernels.hpp. Recording order is evaluation order, which keeps
// every node's inputs before it (backward is a single reverse sweep).
//
// A tape is single-threaded; independent tapes may run concurrently.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cmm {

class Tape;

// Handle to a node on a specific tape. Values never change after creation
// within one forward pass.
struct Var {
  std::uint32_t id = 0;
  Tape* tape = nullptr;

  std::span<const double> value() const;
  std::size_t size() const;
  double scalar() const;  // requires size() == 1
};

class Tape {
 public:
  // Inputs to ln below this value are clamped up to it (softmax outputs may
  // underflow); the clamped region has zero derivative. Negative inputs are
  // a domain error.
  static constexpr double kLnClamp = 1e-12;

  Var input(std::span<const double> values);
  Var input(double value);

  Var add(Var a, Var b);  // elementwise; one side may be scalar (broadcast)
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var div(Var a, Var b);
  Var neg(Var a);
  Var exp(Var a);
  Var ln(Var a);
  Var sigmoid(Var a);
  Var softplus(Var a);
  Var relu(Var a);  // subgradient at 0 is 0

  // y = a*x + b with constant coefficients.
  Var affine(Var x, double a, double b);

  // w is rows x cols row-major (a single node of length rows*cols).
  Var matvec(Var w, Var x, std::size_t rows, std::size_t cols);
  Var dot(Var a, Var b);
  Var softmax(Var a);            // numerically stable (max-subtracted)
  Var logsumexp(Var a);          // scalar
  Var max_index(Var a);          // scalar index value; zero adjoint
  Var sum(Var a);                // scalar
  Var pick(Var a, std::size_t index);
  Var concat(Var a, Var b);

  // Populates adjoints of every node reachable from root (a scalar);
  // unreachable nodes keep adjoint 0. May be called once per forward pass.
  void backward(Var root);

  std::span<const double> value(Var v) const;
  std::span<const double> adjoint(Var v) const;

  std::size_t node_count() const { return recs_.size(); }

  // Drops all nodes but keeps buffer capacity; handles become invalid.
  void clear();

 private:
  enum class Op : std::uint8_t {
    kInput,
    kAdd,
    kSub,
    kMul,
    kDiv,
    kNeg,
    kExp,
    kLn,
    kSigmoid,
    kSoftplus,
    kRelu,
    kAffine,
    kMatVec,
    kDot,
    kSoftmax,
    kLogSumExp,
    kMaxIndex,
    kSum,
    kPick,
    kConcat,
  };

  struct Rec {
    Op op;
    std::uint32_t off;   // offset into vals_/grads_
    std::uint32_t len;   // node length
    std::uint32_t a = 0; // input node ids
    std::uint32_t b = 0;
    std::uint32_t aux = 0;  // cols for matvec, index for pick
    double c0 = 0.0;        // affine coefficients
    double c1 = 0.0;
  };

  Var alloc(Op op, std::size_t len, std::uint32_t a, std::uint32_t b);
  Var binary_elementwise(Op op, Var a, Var b);
  Var unary(Op op, Var a);
  void check_same_tape(Var v) const;

  const double* vptr(const Rec& r) const { return vals_.data() + r.off; }
  double* vptr(Rec& r) { return vals_.data() + r.off; }
  const double* gptr(const Rec& r) const { return grads_.data() + r.off; }
  double* gptr(const Rec& r) { return grads_.data() + r.off; }

  std::vector<Rec> recs_;
  std::vector<double> vals_;
  std::vector<double> grads_;
};

inline std::span<const double> Var::value() const { return tape->value(*this); }
inline std::size_t Var::size() const { return tape->value(*this).size(); }
inline double Var::scalar() const { return tape->value(*this)[0]; }

}  // namespace cmm
