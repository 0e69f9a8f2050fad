#include "scst/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace scst {

namespace {

std::size_t shape_numel(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw std::invalid_argument("tensor: negative dimension");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

[[noreturn]] void shape_error(const std::string& op,
                              const std::vector<int>& a,
                              const std::vector<int>& b) {
  throw std::invalid_argument(op + ": shape mismatch " + shape_to_string(a) +
                              " vs " + shape_to_string(b));
}

}  // namespace

std::string shape_to_string(const std::vector<int>& shape) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ",";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

Tensor Tensor::leaf(std::vector<int> shape, std::vector<double> values,
                    bool requires_grad) {
  if (shape_numel(shape) != values.size()) {
    throw std::invalid_argument(
        "tensor: shape " + shape_to_string(shape) + " expects " +
        std::to_string(shape_numel(shape)) + " values, got " +
        std::to_string(values.size()));
  }
  auto node = std::make_shared<detail::TensorNode>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::scalar_leaf(double value, bool requires_grad) {
  return leaf({1}, {value}, requires_grad);
}

double Tensor::item() const {
  if (!is_scalar()) {
    throw std::invalid_argument("item: tensor of shape " +
                                shape_to_string(node_->shape) +
                                " is not a scalar");
  }
  return node_->values[0];
}

Tensor Tensor::clone() const {
  return Tensor::leaf(node_->shape, node_->values, node_->requires_grad);
}

Tape::Tape() {
  static std::atomic<std::uint64_t> next_id{1};
  id_ = next_id.fetch_add(1);
}

Tensor Tape::constant(std::vector<int> shape, std::vector<double> values) {
  Tensor t = Tensor::leaf(std::move(shape), std::move(values), false);
  track(t);
  return t;
}

Tensor Tape::zeros(std::vector<int> shape) {
  std::size_t n = shape_numel(shape);
  return constant(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tape::make_output(std::vector<int> shape, std::vector<double> values,
                         bool requires_grad) {
  Tensor t = Tensor::leaf(std::move(shape), std::move(values), requires_grad);
  t.node_->producer_tape = id_;
  track(t);
  return t;
}

void Tape::track(const Tensor& t) {
  detail::TensorNode* n = t.node();
  if (n->registered_tape == id_) return;
  n->registered_tape = id_;
  tracked_.push_back(t.node_);
}

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
  const auto& sa = a.shape();
  const auto& sb = b.shape();
  if (sa.size() != 2) shape_error("matmul", sa, sb);
  const int m = sa[0], k = sa[1];
  const bool vec = sb.size() == 1;
  if (vec) {
    if (sb[0] != k) shape_error("matmul", sa, sb);
  } else if (sb.size() != 2 || sb[0] != k) {
    shape_error("matmul", sa, sb);
  }
  const int n = vec ? 1 : sb[1];
  track(a);
  track(b);

  std::vector<double> out(static_cast<std::size_t>(m) * n, 0.0);
  if (vec) {
    out = kernels::matvec(a.values(), m, k, b.values());
  } else {
    for (int i = 0; i < m; ++i)
      for (int p = 0; p < k; ++p) {
        const double av = a.values()[i * k + p];
        for (int j = 0; j < n; ++j) out[i * n + j] += av * b.values()[p * n + j];
      }
  }
  Tensor y = make_output(vec ? std::vector<int>{m} : std::vector<int>{m, n},
                         std::move(out),
                         a.requires_grad() || b.requires_grad());
  auto an = a.node_, bn = b.node_, yn = y.node_;
  records_.push_back({[an, bn, yn, m, k, n, vec]() {
    const auto& g = yn->grad;
    if (an->requires_grad) {
      for (int i = 0; i < m; ++i)
        for (int p = 0; p < k; ++p) {
          double acc = 0.0;
          for (int j = 0; j < n; ++j) acc += g[i * n + j] * bn->values[p * n + j];
          an->grad[i * k + p] += acc;
        }
    }
    if (bn->requires_grad) {
      for (int p = 0; p < k; ++p)
        for (int j = 0; j < n; ++j) {
          double acc = 0.0;
          for (int i = 0; i < m; ++i) acc += an->values[i * k + p] * g[i * n + j];
          bn->grad[p * n + j] += acc;
        }
    }
    (void)vec;
  }});
  return y;
}

Tensor Tape::add(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_error("add", a.shape(), b.shape());
  track(a);
  track(b);
  Tensor y = make_output(a.shape(), kernels::vec_add(a.values(), b.values()),
                         a.requires_grad() || b.requires_grad());
  auto an = a.node_, bn = b.node_, yn = y.node_;
  records_.push_back({[an, bn, yn]() {
    const auto& g = yn->grad;
    if (an->requires_grad)
      for (std::size_t i = 0; i < g.size(); ++i) an->grad[i] += g[i];
    if (bn->requires_grad)
      for (std::size_t i = 0; i < g.size(); ++i) bn->grad[i] += g[i];
  }});
  return y;
}

Tensor Tape::tanh(const Tensor& x) {
  track(x);
  Tensor y = make_output(x.shape(), kernels::vec_tanh(x.values()),
                         x.requires_grad());
  auto xn = x.node_, yn = y.node_;
  records_.push_back({[xn, yn]() {
    if (!xn->requires_grad) return;
    for (std::size_t i = 0; i < yn->grad.size(); ++i) {
      const double t = yn->values[i];
      xn->grad[i] += yn->grad[i] * (1.0 - t * t);
    }
  }});
  return y;
}

Tensor Tape::embedding_lookup(const Tensor& table, int row) {
  const auto& s = table.shape();
  if (s.size() != 2) {
    throw std::invalid_argument("embedding_lookup: table must be 2-D, got " +
                                shape_to_string(s));
  }
  if (row < 0 || row >= s[0]) {
    throw std::invalid_argument("embedding_lookup: row " + std::to_string(row) +
                                " out of range for table " + shape_to_string(s));
  }
  track(table);
  const int e = s[1];
  std::vector<double> out(table.values().begin() + static_cast<std::size_t>(row) * e,
                          table.values().begin() + static_cast<std::size_t>(row + 1) * e);
  Tensor y = make_output({e}, std::move(out), table.requires_grad());
  auto tn = table.node_, yn = y.node_;
  records_.push_back({[tn, yn, row, e]() {
    if (!tn->requires_grad) return;
    for (int i = 0; i < e; ++i)
      tn->grad[static_cast<std::size_t>(row) * e + i] += yn->grad[i];
  }});
  return y;
}

Tensor Tape::log_softmax(const Tensor& x) {
  if (x.shape().size() != 1) {
    throw std::invalid_argument("log_softmax: expects 1-D input, got " +
                                shape_to_string(x.shape()));
  }
  if (x.size() == 0) {
    throw std::invalid_argument("log_softmax: empty input");
  }
  track(x);
  Tensor y = make_output(x.shape(), kernels::log_softmax(x.values()),
                         x.requires_grad());
  auto xn = x.node_, yn = y.node_;
  records_.push_back({[xn, yn]() {
    if (!xn->requires_grad) return;
    double gsum = 0.0;
    for (double g : yn->grad) gsum += g;
    for (std::size_t i = 0; i < yn->grad.size(); ++i)
      xn->grad[i] += yn->grad[i] - std::exp(yn->values[i]) * gsum;
  }});
  return y;
}

Tensor Tape::index_select(const Tensor& x, std::vector<int> indices) {
  if (x.shape().size() != 1) {
    throw std::invalid_argument("index_select: expects 1-D input, got " +
                                shape_to_string(x.shape()));
  }
  const int n = x.shape()[0];
  for (int idx : indices) {
    if (idx < 0 || idx >= n) {
      throw std::invalid_argument("index_select: index " + std::to_string(idx) +
                                  " out of range for " +
                                  shape_to_string(x.shape()));
    }
  }
  track(x);
  std::vector<double> out(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i)
    out[i] = x.values()[indices[i]];
  Tensor y = make_output({static_cast<int>(indices.size())}, std::move(out),
                         x.requires_grad());
  auto xn = x.node_, yn = y.node_;
  auto idx = std::make_shared<std::vector<int>>(std::move(indices));
  records_.push_back({[xn, yn, idx]() {
    if (!xn->requires_grad) return;
    for (std::size_t i = 0; i < idx->size(); ++i)
      xn->grad[(*idx)[i]] += yn->grad[i];
  }});
  return y;
}

Tensor Tape::scale(const Tensor& x, double c) {
  track(x);
  std::vector<double> out(x.values());
  for (double& v : out) v *= c;
  Tensor y = make_output(x.shape(), std::move(out), x.requires_grad());
  auto xn = x.node_, yn = y.node_;
  records_.push_back({[xn, yn, c]() {
    if (!xn->requires_grad) return;
    for (std::size_t i = 0; i < yn->grad.size(); ++i)
      xn->grad[i] += c * yn->grad[i];
  }});
  return y;
}

Tensor Tape::sum(const Tensor& x) {
  track(x);
  double acc = 0.0;
  for (double v : x.values()) acc += v;
  Tensor y = make_output({1}, {acc}, x.requires_grad());
  auto xn = x.node_, yn = y.node_;
  records_.push_back({[xn, yn]() {
    if (!xn->requires_grad) return;
    const double g = yn->grad[0];
    for (double& gi : xn->grad) gi += g;
  }});
  return y;
}

Tensor Tape::concat(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat: no inputs");
  std::vector<double> out;
  bool rg = false;
  for (const auto& p : parts) {
    if (p.shape().size() != 1) {
      throw std::invalid_argument("concat: expects 1-D inputs, got " +
                                  shape_to_string(p.shape()));
    }
    track(p);
    out.insert(out.end(), p.values().begin(), p.values().end());
    rg = rg || p.requires_grad();
  }
  Tensor y = make_output({static_cast<int>(out.size())}, std::move(out), rg);
  auto nodes = std::make_shared<std::vector<std::shared_ptr<detail::TensorNode>>>();
  for (const auto& p : parts) nodes->push_back(p.node_);
  auto yn = y.node_;
  records_.push_back({[nodes, yn]() {
    std::size_t off = 0;
    for (auto& pn : *nodes) {
      const std::size_t len = pn->values.size();
      if (pn->requires_grad)
        for (std::size_t i = 0; i < len; ++i) pn->grad[i] += yn->grad[off + i];
      off += len;
    }
  }});
  return y;
}

void Tape::backward(const Tensor& root) {
  if (!root.defined() || !root.is_scalar()) {
    throw std::invalid_argument(
        "backward: root must be a one-element tensor, got " +
        (root.defined() ? shape_to_string(root.shape()) : std::string("null")));
  }
  if (root.node()->producer_tape != id_) {
    throw std::invalid_argument("backward: root was not produced on this tape");
  }
  for (auto& n : tracked_) {
    n->grad.assign(n->values.size(), 0.0);
  }
  root.node()->grad[0] = 1.0;
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
    it->backprop();
  }
}

namespace kernels {

std::vector<double> matvec(const std::vector<double>& a, int m, int k,
                           const std::vector<double>& x) {
  std::vector<double> y(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    const double* row = a.data() + static_cast<std::size_t>(i) * k;
    for (int p = 0; p < k; ++p) acc += row[p] * x[p];
    y[i] = acc;
  }
  return y;
}

std::vector<double> vec_add(const std::vector<double>& a,
                            const std::vector<double>& b) {
  std::vector<double> y(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = a[i] + b[i];
  return y;
}

std::vector<double> vec_tanh(const std::vector<double>& x) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::tanh(x[i]);
  return y;
}

std::vector<double> log_softmax(const std::vector<double>& logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double v : logits) z += std::exp(v - m);
  const double lz = m + std::log(z);
  std::vector<double> y(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) y[i] = logits[i] - lz;
  return y;
}

double log_sum_exp(const std::vector<double>& x) {
  const double m = *std::max_element(x.begin(), x.end());
  double z = 0.0;
  for (double v : x) z += std::exp(v - m);
  return m + std::log(z);
}

}  // namespace kernels

}  // namespace scst
