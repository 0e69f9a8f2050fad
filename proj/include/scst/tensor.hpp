#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace scst {

class Tape;

namespace detail {

struct TensorNode {
  std::vector<int> shape;
  std::vector<double> values;
  std::vector<double> grad;   // sized lazily by backward()
  bool requires_grad = false;
  // Tape ids, not pointers: a new tape may reuse a dead tape's address.
  std::uint64_t producer_tape = 0;    // tape that recorded the producing op; 0 for leaves
  std::uint64_t registered_tape = 0;  // last tape that tracked this node
};

}  // namespace detail

// Dense 64-bit tensor handle. Copies share the underlying node; leaves
// (parameters, constants) outlive any tape that consumes them.
class Tensor {
 public:
  Tensor() = default;

  // Leaf tensor, not attached to any tape until an op consumes it.
  static Tensor leaf(std::vector<int> shape, std::vector<double> values,
                     bool requires_grad);
  static Tensor scalar_leaf(double value, bool requires_grad);

  bool defined() const { return node_ != nullptr; }
  const std::vector<int>& shape() const { return node_->shape; }
  const std::vector<double>& values() const { return node_->values; }
  std::vector<double>& mutable_values() { return node_->values; }
  const std::vector<double>& grad() const { return node_->grad; }
  bool requires_grad() const { return node_->requires_grad; }

  std::size_t size() const { return node_->values.size(); }
  bool is_scalar() const { return defined() && size() == 1; }
  // Value of a one-element tensor.
  double item() const;

  // Deep copy; the copy is a detached leaf.
  Tensor clone() const;

  detail::TensorNode* node() const { return node_.get(); }

 private:
  friend class Tape;
  explicit Tensor(std::shared_ptr<detail::TensorNode> node)
      : node_(std::move(node)) {}
  std::shared_ptr<detail::TensorNode> node_;
};

// Reverse-mode tape. Ops are recorded in execution order; backward() replays
// them once in reverse, accumulating gradients (multiple uses of a tensor sum
// their contributions). A tape and its tensors belong to one thread.
class Tape {
 public:
  Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Constant (no-grad) tensor owned by this computation.
  Tensor constant(std::vector<int> shape, std::vector<double> values);
  Tensor zeros(std::vector<int> shape);

  // Recorded ops. Shape rules are checked and violations throw
  // std::invalid_argument naming the op and the offending shapes.
  Tensor matmul(const Tensor& a, const Tensor& b);  // [m,k]x[k,n] or [m,k]x[k]
  Tensor add(const Tensor& a, const Tensor& b);     // same shape, elementwise
  Tensor tanh(const Tensor& x);
  Tensor embedding_lookup(const Tensor& table, int row);  // [v,e] -> [e]
  Tensor log_softmax(const Tensor& x);                    // 1-D, stable form
  Tensor index_select(const Tensor& x, std::vector<int> indices);  // 1-D gather
  Tensor scale(const Tensor& x, double c);
  Tensor sum(const Tensor& x);  // -> shape {1}
  Tensor concat(const std::vector<Tensor>& parts);  // 1-D concatenation

  // Populates grad for every requires_grad tensor this tape touched with
  // d(root)/d(tensor); tensors on the tape unreachable from root get zeros.
  // root must be a one-element tensor produced on this tape.
  void backward(const Tensor& root);

  std::size_t num_ops() const { return records_.size(); }

 private:
  struct OpRecord {
    std::function<void()> backprop;
  };

  Tensor make_output(std::vector<int> shape, std::vector<double> values,
                     bool requires_grad);
  void track(const Tensor& t);

  std::uint64_t id_;
  std::vector<OpRecord> records_;
  std::vector<std::shared_ptr<detail::TensorNode>> tracked_;
};

// Shared numeric kernels: the tape ops and the model's inference path run the
// same arithmetic in the same order, so teacher-forced re-scoring reproduces
// decode-time probabilities bit for bit.
namespace kernels {

// y = A x, A is [m,k] row-major.
std::vector<double> matvec(const std::vector<double>& a, int m, int k,
                           const std::vector<double>& x);
std::vector<double> vec_add(const std::vector<double>& a,
                            const std::vector<double>& b);
std::vector<double> vec_tanh(const std::vector<double>& x);
std::vector<double> log_softmax(const std::vector<double>& logits);
// log(sum(exp(x))) in the max-shifted form.
double log_sum_exp(const std::vector<double>& x);

}  // namespace kernels

std::string shape_to_string(const std::vector<int>& shape);

}  // namespace scst
