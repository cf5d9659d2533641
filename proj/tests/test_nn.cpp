#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "zpres/error.hpp"
#include "zpres/nn.hpp"

using namespace zpres;

namespace {

Tensor random_vec(std::size_t n, Rng& rng, double range = 1.0) {
  Tensor t = Tensor::zeros({n});
  for (double& v : t.data) v = rng.next_uniform(range);
  return t;
}

LstmParams random_lstm(std::size_t in, std::size_t hidden, Rng& rng, double range = 0.5) {
  LstmParams p("lstm", in, hidden);
  init_uniform(p.params(), range, rng);
  return p;
}

}  // namespace

TEST_CASE("lstm_step zero params is a fixed point of the zero state") {
  LstmParams p("z", 3, 4);
  Tensor x = Tensor::vec({1.5, -2.0, 0.25});
  auto [h, c] = lstm_step(x, Tensor::zeros({4}), Tensor::zeros({4}), p);
  for (double v : h.data) CHECK(v == 0.0);
  for (double v : c.data) CHECK(v == 0.0);
}

TEST_CASE("lstm_step hidden state is bounded by 1 componentwise") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    LstmParams p = random_lstm(5, 6, rng, 2.0);
    Tensor x = random_vec(5, rng, 3.0);
    Tensor h0 = random_vec(6, rng, 0.9);
    Tensor c0 = random_vec(6, rng, 2.0);
    auto [h, c] = lstm_step(x, h0, c0, p);
    for (double v : h.data) CHECK(std::fabs(v) < 1.0);
  }
}

TEST_CASE("lstm_step single hidden unit matches scalar oracle to 1e-12") {
  oracle::ScalarLstm ref{0.3, -0.7, 0.1, 0.9, 0.2, -0.4, -0.8, 0.6, 0.05, 1.1, -0.3, 0.2};
  LstmParams p("s", 1, 1);
  p.wi.value.data[0] = ref.wi;
  p.ui.value.data[0] = ref.ui;
  p.bi.value.data[0] = ref.bi;
  p.wf.value.data[0] = ref.wf;
  p.uf.value.data[0] = ref.uf;
  p.bf.value.data[0] = ref.bf;
  p.wo.value.data[0] = ref.wo;
  p.uo.value.data[0] = ref.uo;
  p.bo.value.data[0] = ref.bo;
  p.wc.value.data[0] = ref.wc;
  p.uc.value.data[0] = ref.uc;
  p.bc.value.data[0] = ref.bc;

  double x = 0.4, h = -0.2, c = 0.6;
  auto [eh, ec] = ref.step(x, h, c);
  auto [gh, gc] = lstm_step(Tensor::vec({x}), Tensor::vec({h}), Tensor::vec({c}), p);
  CHECK(gh.data[0] == doctest::Approx(eh).epsilon(1e-12));
  CHECK(gc.data[0] == doctest::Approx(ec).epsilon(1e-12));
}

TEST_CASE("lstm_step rejects mismatched shapes with the tensor named") {
  LstmParams p("m", 3, 4);
  CHECK_THROWS_WITH_AS(
      lstm_step(Tensor::vec({1.0, 2.0}), Tensor::zeros({4}), Tensor::zeros({4}), p),
      doctest::Contains("lstm_step x"), ShapeError);
  CHECK_THROWS_WITH_AS(
      lstm_step(Tensor::zeros({3}), Tensor::zeros({5}), Tensor::zeros({4}), p),
      doctest::Contains("lstm_step h_prev"), ShapeError);
}

TEST_CASE("lstm_run boundary cases") {
  Rng rng(7);
  LstmParams p = random_lstm(3, 4, rng);

  SUBCASE("empty sequence gives the zero vector") {
    auto [all, last] = lstm_run({}, p, false);
    CHECK(all.empty());
    CHECK(last == Tensor::zeros({4}));
  }

  SUBCASE("length one equals a single step from the zero state") {
    Tensor x = random_vec(3, rng);
    auto [all, last] = lstm_run({x}, p, false);
    auto [h, c] = lstm_step(x, Tensor::zeros({4}), Tensor::zeros({4}), p);
    CHECK(last == h);
    REQUIRE(all.size() == 1);
    CHECK(all[0] == h);
  }

  SUBCASE("reversed over [a,b,c] equals forward over [c,b,a]") {
    Tensor a = random_vec(3, rng), b = random_vec(3, rng), c = random_vec(3, rng);
    auto [all_r, last_r] = lstm_run({a, b, c}, p, true);
    auto [all_f, last_f] = lstm_run({c, b, a}, p, false);
    CHECK(last_r == last_f);
    // alignment: reversed all_hidden[i] pairs with input i
    CHECK(all_r[2] == all_f[0]);
    CHECK(all_r[1] == all_f[1]);
    CHECK(all_r[0] == all_f[2]);
  }
}

TEST_CASE("mlp_forward zero params give the zero vector") {
  MlpParams p("z", 4, 3, 3, 2);
  Tensor out = mlp_forward(Tensor::vec({1.0, -2.0, 3.0, 0.5}), p);
  CHECK(out == Tensor::zeros({2}));
}

TEST_CASE("mlp_forward identity square layers keep a nonnegative input") {
  MlpParams p("id", 3, 3, 3, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    p.w1.value.at(i, i) = 1.0;
    p.w2.value.at(i, i) = 1.0;
    p.w3.value.at(i, i) = 1.0;
  }
  Tensor x = Tensor::vec({0.5, 0.0, 2.0});
  CHECK(mlp_forward(x, p) == x);
}

TEST_CASE("mlp_forward matches the naive oracle to 1e-12 and stays nonnegative") {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    MlpParams p("r", 5, 4, 3, 2);
    init_uniform(p.params(), 0.8, rng);
    Tensor x = random_vec(5, rng);

    auto as_rows = [](const Parameter& w) {
      std::vector<std::vector<double>> rows(w.value.rows());
      for (std::size_t r = 0; r < w.value.rows(); ++r)
        for (std::size_t c = 0; c < w.value.cols(); ++c) rows[r].push_back(w.value.at(r, c));
      return rows;
    };
    auto l1 = oracle::relu_layer(as_rows(p.w1), p.b1.value.data, x.data);
    auto l2 = oracle::relu_layer(as_rows(p.w2), p.b2.value.data, l1);
    auto l3 = oracle::relu_layer(as_rows(p.w3), p.b3.value.data, l2);

    Tensor got = mlp_forward(x, p);
    REQUIRE(got.size() == l3.size());
    for (std::size_t i = 0; i < l3.size(); ++i) {
      CHECK(got.data[i] == doctest::Approx(l3[i]).epsilon(1e-12));
      CHECK(got.data[i] >= 0.0);
    }
  }
}

TEST_CASE("softmax basics") {
  SUBCASE("uniform on equal scores") {
    Tensor p = softmax(Tensor::vec({0.0, 0.0, 0.0}));
    for (double v : p.data) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("singleton is certain for any finite score") {
    for (double s : {-700.0, -1.0, 0.0, 3.5, 700.0})
      CHECK(softmax(Tensor::vec({s})).data[0] == 1.0);
  }
  SUBCASE("matches the high-precision oracle componentwise to 1e-12") {
    std::vector<double> s{1.0, 2.0, 3.0};
    auto expect = oracle::softmax(s);
    Tensor got = softmax(Tensor::vec(s));
    for (std::size_t i = 0; i < s.size(); ++i)
      CHECK(got.data[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  }
  SUBCASE("empty input is rejected") {
    CHECK_THROWS_WITH_AS(softmax(Tensor::zeros({0})), doctest::Contains("empty candidate set"),
                         ShapeError);
  }
}

TEST_CASE("softmax properties over random inputs") {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t k = 1 + rng.next_index(8);
    Tensor s = random_vec(k, rng, 30.0);
    Tensor p = softmax(s);

    double total = 0.0;
    for (double v : p.data) {
      CHECK(v > 0.0);
      total += v;
    }
    CHECK(std::fabs(total - 1.0) <= 1e-9);

    // shift invariance
    Tensor shifted = s;
    double c = rng.next_uniform(50.0);
    for (double& v : shifted.data) v += c;
    Tensor p2 = softmax(shifted);
    for (std::size_t i = 0; i < k; ++i)
      CHECK(std::fabs(p2.data[i] - p.data[i]) <= 1e-12);

    // permutation equivariance: rotate by one
    if (k > 1) {
      Tensor rot = Tensor::zeros({k});
      for (std::size_t i = 0; i < k; ++i) rot.data[i] = s.data[(i + 1) % k];
      Tensor pr = softmax(rot);
      for (std::size_t i = 0; i < k; ++i)
        CHECK(pr.data[i] == doctest::Approx(p.data[(i + 1) % k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("cross_entropy values") {
  CHECK(cross_entropy(Tensor::vec({1.0}), {1.0}) == 0.0);
  CHECK(cross_entropy(Tensor::vec({0.5, 0.5}), {1.0, 0.0}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));

  // multiple gold candidates
  Tensor probs = Tensor::vec({0.2, 0.3, 0.5});
  std::vector<double> gold{1.0, 0.0, 1.0};
  CHECK(cross_entropy(probs, gold) ==
        doctest::Approx(oracle::cross_entropy(probs.data, gold)).epsilon(1e-12));

  // zero probability on a gold index is floored, never Inf
  double clamped = cross_entropy(Tensor::vec({0.0, 1.0}), {1.0, 0.0});
  CHECK(std::isfinite(clamped));
  CHECK(clamped == doctest::Approx(-std::log(Tape::kLogFloor)));
}

TEST_CASE("backward leaves untouched parameters with zero gradient") {
  Parameter used("used", Tensor::vec({2.0}));
  Parameter unused("unused", Tensor::vec({5.0}));
  Tape t;
  Var loss = t.mul(t.leaf(used), t.leaf(used));
  t.backward(loss);
  CHECK(used.grad.data[0] == doctest::Approx(4.0));
  CHECK(unused.grad.data[0] == 0.0);
}

TEST_CASE("backward before any forward pass is an error") {
  Tape t;
  CHECK_THROWS_AS(t.backward(Var{0}), ShapeError);
}

TEST_CASE("softmax + cross_entropy gradient matches the analytic form") {
  // For sum(gold)=1 the analytic form reduces to probs - gold.
  std::vector<double> scores{0.4, -1.2, 2.0, 0.0};
  std::vector<double> gold{0.0, 0.0, 1.0, 0.0};

  Parameter s("s", Tensor::vec(scores));
  Tape t;
  Var probs = t.softmax(t.leaf(s));
  t.backward(t.cross_entropy(probs, gold));

  auto expect = oracle::softmax_ce_grad(scores, gold);
  for (std::size_t i = 0; i < scores.size(); ++i)
    CHECK(s.grad.data[i] == doctest::Approx(expect[i]).epsilon(1e-10));

  SUBCASE("multiple gold entries use the general form") {
    std::vector<double> gold2{1.0, 0.0, 1.0, 0.0};
    Parameter s2("s2", Tensor::vec(scores));
    Tape t2;
    t2.backward(t2.cross_entropy(t2.softmax(t2.leaf(s2)), gold2));
    auto expect2 = oracle::softmax_ce_grad(scores, gold2);
    for (std::size_t i = 0; i < scores.size(); ++i)
      CHECK(s2.grad.data[i] == doctest::Approx(expect2[i]).epsilon(1e-10));
  }
}

TEST_CASE("sgd_step") {
  SUBCASE("lr 0 leaves parameters unchanged") {
    Parameter p("p", Tensor::vec({1.0, -2.0}));
    p.grad.data = {10.0, 10.0};
    sgd_step({&p}, 0.0);
    CHECK(p.value.data[0] == 1.0);
    CHECK(p.value.data[1] == -2.0);
  }
  SUBCASE("p=1, g=2, lr=0.01 gives 0.98") {
    Parameter p("p", Tensor::vec({1.0}));
    p.grad.data[0] = 2.0;
    sgd_step({&p}, 0.01);
    CHECK(p.value.data[0] == doctest::Approx(0.98).epsilon(1e-15));
  }
}

TEST_CASE("one sgd step decreases the loss on a smooth toy instance") {
  Rng rng(13);
  Parameter w("w", Tensor::zeros({1, 4}));
  Parameter b("b", Tensor::zeros({1}));
  init_uniform({&w, &b}, 0.5, rng);
  Tensor x = random_vec(4, rng);

  auto build = [&](Tape& t) {
    Var s = t.tanh(t.add(t.matvec(t.leaf(w), t.constant(x)), t.leaf(b)));
    Var d = t.add(s, t.constant(Tensor::vec({-0.9})));
    return t.mul(d, d);
  };

  Tape t0;
  double before = t0.value(build(t0)).data[0];
  zero_grads({&w, &b});
  {
    Tape t;
    t.backward(build(t));
  }
  sgd_step({&w, &b}, 0.01);
  Tape t1;
  double after = t1.value(build(t1)).data[0];
  CHECK(after < before);
}

TEST_CASE("grad_check examples") {
  SUBCASE("quadratic p^2 at p=3: analytic 6 vs numeric 6") {
    Parameter p("p", Tensor::vec({3.0}));
    auto closure = [&](Tape& t) {
      Var v = t.leaf(p);
      return t.mul(v, v);
    };
    auto res = grad_check({&p}, closure, 1e-5, 8, 1);
    CHECK(res.max_rel_error < 1e-9);
  }
  SUBCASE("tanh affine layer under random init") {
    Rng rng(41);
    Parameter w("w", Tensor::zeros({3, 5}));
    Parameter b("b", Tensor::zeros({3}));
    init_uniform({&w, &b}, 0.4, rng);
    Tensor x = random_vec(5, rng);
    Tensor pull = random_vec(3, rng);
    auto closure = [&](Tape& t) {
      Var h = t.tanh(t.add(t.matvec(t.leaf(w), t.constant(x)), t.leaf(b)));
      Var d = t.add(h, t.constant(pull));
      Var q = t.mul(d, d);
      // reduce to scalar
      Var one = t.constant(Tensor::matrix(1, 3, {1.0, 1.0, 1.0}));
      return t.matvec(one, q);
    };
    auto res = grad_check({&w, &b}, closure, 1e-5, 64, 2);
    CHECK(res.max_rel_error < 1e-6);
  }
  SUBCASE("non-finite loss is an error") {
    Parameter p("p", Tensor::vec({1.0}));
    auto closure = [&](Tape& t) {
      return t.constant(Tensor::scalar(std::numeric_limits<double>::infinity()));
    };
    CHECK_THROWS_AS(grad_check({&p}, closure, 1e-5, 4, 1), NumericError);
  }
  SUBCASE("fixed seed reports the same error twice") {
    Rng rng(43);
    Parameter w("w", Tensor::zeros({2, 3}));
    init_uniform({&w}, 0.3, rng);
    Tensor x = random_vec(3, rng);
    auto closure = [&](Tape& t) {
      Var h = t.tanh(t.matvec(t.leaf(w), t.constant(x)));
      Var one = t.constant(Tensor::matrix(1, 2, {1.0, 1.0}));
      return t.matvec(one, h);
    };
    auto r1 = grad_check({&w}, closure, 1e-5, 4, 9);
    auto r2 = grad_check({&w}, closure, 1e-5, 4, 9);
    CHECK(r1.max_rel_error == r2.max_rel_error);
    CHECK(r1.worst_param == r2.worst_param);
  }
}

TEST_CASE("lstm and mlp gradients match finite differences") {
  Rng rng(57);
  LstmParams lstm("g", 3, 4);
  init_uniform(lstm.params(), 0.4, rng);
  std::vector<Tensor> seq{random_vec(3, rng), random_vec(3, rng), random_vec(3, rng)};
  Tensor pull = random_vec(4, rng);

  auto lstm_loss = [&](Tape& t) {
    LstmVars v = lstm.bind(t);
    std::vector<Var> xs;
    for (const Tensor& x : seq) xs.push_back(t.constant(x));
    LstmRun run = lstm_run(t, xs, v, false, 4);
    Var d = t.add(run.last_hidden, t.constant(pull));
    Var q = t.mul(d, d);
    Var one = t.constant(Tensor::matrix(1, 4, {1.0, 1.0, 1.0, 1.0}));
    return t.matvec(one, q);
  };
  auto res = grad_check(lstm.params(), lstm_loss, 1e-5, 24, 3);
  CHECK(res.max_rel_error < 1e-4);

  MlpParams mlp("gm", 6, 5, 4, 3);
  init_uniform(mlp.params(), 0.4, rng);
  Tensor x = random_vec(6, rng);
  Tensor pull2 = random_vec(3, rng);
  auto mlp_loss = [&](Tape& t) {
    MlpVars v = mlp.bind(t);
    Var out = mlp_forward(t, t.constant(x), v);
    Var d = t.add(out, t.constant(pull2));
    Var q = t.mul(d, d);
    Var one = t.constant(Tensor::matrix(1, 3, {1.0, 1.0, 1.0}));
    return t.matvec(one, q);
  };
  auto res2 = grad_check(mlp.params(), mlp_loss, 1e-5, 24, 4);
  CHECK(res2.max_rel_error < 1e-4);
}

TEST_CASE("forward outputs and gradients are deterministic") {
  auto run_once = [](std::uint64_t seed) {
    Rng rng(seed);
    LstmParams p("d", 3, 4);
    init_uniform(p.params(), 0.4, rng);
    Tensor x = Tensor::vec({0.1, -0.2, 0.3});
    Tape t;
    LstmVars v = p.bind(t);
    LstmState s = lstm_step(t, t.constant(x), LstmState{t.zeros(4), t.zeros(4)}, v);
    Var one = t.constant(Tensor::matrix(1, 4, {1.0, 1.0, 1.0, 1.0}));
    Var loss = t.matvec(one, t.mul(s.h, s.h));
    t.backward(loss);
    std::vector<double> out = t.value(s.h).data;
    for (Parameter* pp : p.params())
      out.insert(out.end(), pp->grad.data.begin(), pp->grad.data.end());
    return out;
  };
  CHECK(run_once(77) == run_once(77));
}
