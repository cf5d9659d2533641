#pragma once

// Independent reference implementations used as test oracles. These must not
// call into the library's numeric paths: each one recomputes its result from
// the definition with plain loops.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

// Single-hidden-unit LSTM step, scalar arithmetic throughout.
struct ScalarLstm {
  double wi, ui, bi, wf, uf, bf, wo, uo, bo, wc, uc, bc;

  static double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

  // returns {h, c}
  std::pair<double, double> step(double x, double h, double c) const {
    double i = sig(wi * x + ui * h + bi);
    double f = sig(wf * x + uf * h + bf);
    double o = sig(wo * x + uo * h + bo);
    double cand = std::tanh(wc * x + uc * h + bc);
    double c2 = f * c + i * cand;
    double h2 = o * std::tanh(c2);
    return {h2, c2};
  }
};

// y = relu(W x + b), naive loops.
inline std::vector<double> relu_layer(const std::vector<std::vector<double>>& w,
                                      const std::vector<double>& b,
                                      const std::vector<double>& x) {
  std::vector<double> y(w.size(), 0.0);
  for (std::size_t r = 0; r < w.size(); ++r) {
    double acc = b[r];
    for (std::size_t c = 0; c < x.size(); ++c) acc += w[r][c] * x[c];
    y[r] = acc > 0.0 ? acc : 0.0;
  }
  return y;
}

// exp/sum in long double.
inline std::vector<double> softmax(const std::vector<double>& s) {
  long double z = 0.0L;
  std::vector<long double> e(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    e[i] = expl(static_cast<long double>(s[i]));
    z += e[i];
  }
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = static_cast<double>(e[i] / z);
  return out;
}

inline double cross_entropy(const std::vector<double>& probs, const std::vector<double>& gold) {
  long double loss = 0.0L;
  for (std::size_t i = 0; i < probs.size(); ++i)
    if (gold[i] != 0.0) loss -= static_cast<long double>(gold[i]) * logl(probs[i]);
  return static_cast<double>(loss);
}

// d/ds of cross_entropy(softmax(s), gold): (sum gold) * probs - gold.
inline std::vector<double> softmax_ce_grad(const std::vector<double>& s,
                                           const std::vector<double>& gold) {
  std::vector<double> p = softmax(s);
  double gsum = 0.0;
  for (double g : gold) gsum += g;
  std::vector<double> grad(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) grad[i] = gsum * p[i] - gold[i];
  return grad;
}

}  // namespace oracle
