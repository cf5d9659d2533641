#include "zpres/tape.hpp"

#include <algorithm>
#include <cmath>

#include "zpres/error.hpp"

namespace zpres {

Parameter::Parameter(std::string name, Tensor v) : name(std::move(name)), value(std::move(v)) {
  grad = Tensor::zeros(value.shape);
}

Var Tape::push(Tensor value, std::function<void(Tape&, const Node&)> back, Parameter* param) {
  Node n;
  n.grad = Tensor::zeros(value.shape);
  n.value = std::move(value);
  n.back = std::move(back);
  n.param = param;
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Tape::Node& Tape::node(Var v) { return nodes_[static_cast<std::size_t>(v.id)]; }

const Tape::Node& Tape::node_checked(Var v, const char* what) const {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size()))
    throw ShapeError(std::string(what) + ": var id " + std::to_string(v.id) +
                     " not on this tape (" + std::to_string(nodes_.size()) + " nodes)");
  return nodes_[static_cast<std::size_t>(v.id)];
}

const Tensor& Tape::value(Var v) const { return node_checked(v, "Tape::value").value; }

const Tensor& Tape::grad(Var v) const { return node_checked(v, "Tape::grad").grad; }

void Tape::accumulate(int id, const Tensor& g) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  for (std::size_t i = 0; i < g.data.size(); ++i) n.grad.data[i] += g.data[i];
  n.touched = true;
}

void Tape::accumulate_scaled(int id, const Tensor& g, double c) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  for (std::size_t i = 0; i < g.data.size(); ++i) n.grad.data[i] += c * g.data[i];
  n.touched = true;
}

Var Tape::leaf(Parameter& p) { return push(p.value, nullptr, &p); }

Var Tape::constant(Tensor t) { return push(std::move(t), nullptr); }

Var Tape::zeros(std::size_t dim) { return constant(Tensor::zeros({dim})); }

Var Tape::matvec(Var w, Var x) {
  const Tensor& wm = node_checked(w, "matvec").value;
  const Tensor& xv = node_checked(x, "matvec").value;
  if (!wm.is_matrix()) throw ShapeError("matvec: W is not a matrix, got " + shape_str(wm));
  require_vector(xv, "matvec x");
  if (wm.cols() != xv.shape[0])
    throw ShapeError("matvec: W " + shape_str(wm) + " incompatible with x " + shape_str(xv));

  std::size_t r = wm.rows(), c = wm.cols();
  Tensor y = Tensor::zeros({r});
  for (std::size_t i = 0; i < r; ++i) {
    const double* row = wm.data.data() + i * c;
    double acc = 0.0;
    for (std::size_t j = 0; j < c; ++j) acc += row[j] * xv.data[j];
    y.data[i] = acc;
  }
  int wi = w.id, xi = x.id;
  return push(std::move(y), [wi, xi, r, c](Tape& t, const Node& out) {
    Node& wn = t.nodes_[static_cast<std::size_t>(wi)];
    Node& xn = t.nodes_[static_cast<std::size_t>(xi)];
    for (std::size_t i = 0; i < r; ++i) {
      double gy = out.grad.data[i];
      if (gy == 0.0) continue;
      double* gw_row = wn.grad.data.data() + i * c;
      const double* w_row = wn.value.data.data() + i * c;
      for (std::size_t j = 0; j < c; ++j) {
        gw_row[j] += gy * xn.value.data[j];
        xn.grad.data[j] += gy * w_row[j];
      }
    }
    wn.touched = true;
    xn.touched = true;
  });
}

Var Tape::col(Var m, std::size_t j) {
  const Tensor& mm = node_checked(m, "col").value;
  if (!mm.is_matrix()) throw ShapeError("col: not a matrix, got " + shape_str(mm));
  if (j >= mm.cols())
    throw ShapeError("col: index " + std::to_string(j) + " out of range for " + shape_str(mm));
  std::size_t r = mm.rows(), c = mm.cols();
  Tensor y = Tensor::zeros({r});
  for (std::size_t i = 0; i < r; ++i) y.data[i] = mm.data[i * c + j];
  int mi = m.id;
  return push(std::move(y), [mi, j, r, c](Tape& t, const Node& out) {
    Node& mn = t.nodes_[static_cast<std::size_t>(mi)];
    for (std::size_t i = 0; i < r; ++i) mn.grad.data[i * c + j] += out.grad.data[i];
    mn.touched = true;
  });
}

Var Tape::add(Var a, Var b) {
  const Tensor& av = node_checked(a, "add").value;
  const Tensor& bv = node_checked(b, "add").value;
  require_same_shape(av, bv, "add");
  Tensor y = av;
  for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += bv.data[i];
  int ai = a.id, bi = b.id;
  return push(std::move(y), [ai, bi](Tape& t, const Node& out) {
    t.accumulate(ai, out.grad);
    t.accumulate(bi, out.grad);
  });
}

Var Tape::sum(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("sum: empty operand list");
  Tensor y = node_checked(parts[0], "sum").value;
  for (std::size_t p = 1; p < parts.size(); ++p) {
    const Tensor& v = node_checked(parts[p], "sum").value;
    require_same_shape(y, v, "sum");
    for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += v.data[i];
  }
  std::vector<int> ids;
  ids.reserve(parts.size());
  for (Var p : parts) ids.push_back(p.id);
  return push(std::move(y), [ids](Tape& t, const Node& out) {
    for (int id : ids) t.accumulate(id, out.grad);
  });
}

Var Tape::mul(Var a, Var b) {
  const Tensor& av = node_checked(a, "mul").value;
  const Tensor& bv = node_checked(b, "mul").value;
  require_same_shape(av, bv, "mul");
  Tensor y = av;
  for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] *= bv.data[i];
  int ai = a.id, bi = b.id;
  return push(std::move(y), [ai, bi](Tape& t, const Node& out) {
    Node& an = t.nodes_[static_cast<std::size_t>(ai)];
    Node& bn = t.nodes_[static_cast<std::size_t>(bi)];
    for (std::size_t i = 0; i < out.grad.data.size(); ++i) {
      an.grad.data[i] += out.grad.data[i] * bn.value.data[i];
      bn.grad.data[i] += out.grad.data[i] * an.value.data[i];
    }
    an.touched = true;
    bn.touched = true;
  });
}

Var Tape::scale(Var a, double c) {
  Tensor y = node_checked(a, "scale").value;
  for (double& v : y.data) v *= c;
  int ai = a.id;
  return push(std::move(y), [ai, c](Tape& t, const Node& out) {
    t.accumulate_scaled(ai, out.grad, c);
  });
}

Var Tape::concat(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat: empty operand list");
  std::size_t total = 0;
  for (Var p : parts) {
    const Tensor& v = node_checked(p, "concat").value;
    require_vector(v, "concat operand");
    total += v.shape[0];
  }
  Tensor y = Tensor::zeros({total});
  std::size_t off = 0;
  std::vector<int> ids;
  std::vector<std::size_t> dims;
  for (Var p : parts) {
    const Tensor& v = node(p).value;
    std::copy(v.data.begin(), v.data.end(), y.data.begin() + static_cast<long>(off));
    ids.push_back(p.id);
    dims.push_back(v.shape[0]);
    off += v.shape[0];
  }
  return push(std::move(y), [ids, dims](Tape& t, const Node& out) {
    std::size_t off2 = 0;
    for (std::size_t p = 0; p < ids.size(); ++p) {
      Node& pn = t.nodes_[static_cast<std::size_t>(ids[p])];
      for (std::size_t i = 0; i < dims[p]; ++i) pn.grad.data[i] += out.grad.data[off2 + i];
      pn.touched = true;
      off2 += dims[p];
    }
  });
}

Var Tape::stack_scalars(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("stack_scalars: empty candidate set");
  Tensor y = Tensor::zeros({parts.size()});
  std::vector<int> ids;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Tensor& v = node_checked(parts[i], "stack_scalars").value;
    require_vector_dim(v, 1, "stack_scalars operand");
    y.data[i] = v.data[0];
    ids.push_back(parts[i].id);
  }
  return push(std::move(y), [ids](Tape& t, const Node& out) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      Node& pn = t.nodes_[static_cast<std::size_t>(ids[i])];
      pn.grad.data[0] += out.grad.data[i];
      pn.touched = true;
    }
  });
}

namespace {

inline double sigmoid_scalar(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Var Tape::sigmoid(Var a) {
  Tensor y = node_checked(a, "sigmoid").value;
  for (double& v : y.data) v = sigmoid_scalar(v);
  int ai = a.id;
  return push(std::move(y), [ai](Tape& t, const Node& out) {
    Node& an = t.nodes_[static_cast<std::size_t>(ai)];
    for (std::size_t i = 0; i < out.grad.data.size(); ++i) {
      double yv = out.value.data[i];
      an.grad.data[i] += out.grad.data[i] * yv * (1.0 - yv);
    }
    an.touched = true;
  });
}

Var Tape::tanh(Var a) {
  Tensor y = node_checked(a, "tanh").value;
  for (double& v : y.data) v = std::tanh(v);
  int ai = a.id;
  return push(std::move(y), [ai](Tape& t, const Node& out) {
    Node& an = t.nodes_[static_cast<std::size_t>(ai)];
    for (std::size_t i = 0; i < out.grad.data.size(); ++i) {
      double yv = out.value.data[i];
      an.grad.data[i] += out.grad.data[i] * (1.0 - yv * yv);
    }
    an.touched = true;
  });
}

Var Tape::relu(Var a) {
  Tensor y = node_checked(a, "relu").value;
  for (double& v : y.data) v = v > 0.0 ? v : 0.0;
  int ai = a.id;
  return push(std::move(y), [ai](Tape& t, const Node& out) {
    Node& an = t.nodes_[static_cast<std::size_t>(ai)];
    for (std::size_t i = 0; i < out.grad.data.size(); ++i)
      if (an.value.data[i] > 0.0) an.grad.data[i] += out.grad.data[i];
    an.touched = true;
  });
}

Var Tape::softmax(Var a) {
  const Tensor& av = node_checked(a, "softmax").value;
  require_vector(av, "softmax input");
  if (av.shape[0] == 0) throw ShapeError("softmax: empty candidate set");
  Tensor y = av;
  double mx = *std::max_element(y.data.begin(), y.data.end());
  double z = 0.0;
  for (double& v : y.data) {
    v = std::exp(v - mx);
    z += v;
  }
  for (double& v : y.data) v /= z;
  int ai = a.id;
  return push(std::move(y), [ai](Tape& t, const Node& out) {
    Node& an = t.nodes_[static_cast<std::size_t>(ai)];
    double dot = 0.0;
    for (std::size_t i = 0; i < out.grad.data.size(); ++i)
      dot += out.grad.data[i] * out.value.data[i];
    for (std::size_t i = 0; i < out.grad.data.size(); ++i)
      an.grad.data[i] += out.value.data[i] * (out.grad.data[i] - dot);
    an.touched = true;
  });
}

Var Tape::cross_entropy(Var probs, const std::vector<double>& gold) {
  const Tensor& pv = node_checked(probs, "cross_entropy").value;
  require_vector(pv, "cross_entropy probs");
  if (pv.shape[0] != gold.size())
    throw ShapeError("cross_entropy: probs dim " + std::to_string(pv.shape[0]) +
                     " vs gold dim " + std::to_string(gold.size()));
  double loss = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i)
    if (gold[i] != 0.0) loss -= gold[i] * std::log(std::max(pv.data[i], kLogFloor));
  int pi = probs.id;
  std::vector<double> g = gold;
  return push(Tensor::scalar(loss), [pi, g](Tape& t, const Node& out) {
    Node& pn = t.nodes_[static_cast<std::size_t>(pi)];
    double gl = out.grad.data[0];
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i] == 0.0) continue;
      double p = pn.value.data[i];
      if (p > kLogFloor) pn.grad.data[i] -= gl * g[i] / p;
      // clamp active: flat, no gradient
    }
    pn.touched = true;
  });
}

void Tape::backward(Var loss) {
  if (nodes_.empty()) throw ShapeError("backward before forward: tape is empty");
  const Node& ln = node_checked(loss, "backward");
  if (ln.value.size() != 1)
    throw ShapeError("backward: loss must be scalar, got " + shape_str(ln.value));
  if (!ln.value.all_finite()) throw NumericError("backward: loss is not finite");

  nodes_[static_cast<std::size_t>(loss.id)].grad.data[0] = 1.0;
  nodes_[static_cast<std::size_t>(loss.id)].touched = true;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.back && n.touched) n.back(*this, n);
  }
  for (Node& n : nodes_) {
    if (n.param && n.touched)
      for (std::size_t i = 0; i < n.grad.data.size(); ++i)
        n.param->grad.data[i] += n.grad.data[i];
  }
}

}  // namespace zpres
