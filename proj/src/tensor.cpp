#include "zpres/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "zpres/error.hpp"

namespace zpres {

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
  Tensor t;
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  t.shape = std::move(shape);
  t.data.assign(n, 0.0);
  return t;
}

Tensor Tensor::vec(std::vector<double> values) {
  Tensor t;
  t.shape = {values.size()};
  t.data = std::move(values);
  return t;
}

Tensor Tensor::scalar(double v) {
  Tensor t;
  t.shape = {1};
  t.data = {v};
  return t;
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  if (values.size() != rows * cols)
    throw ShapeError("matrix: " + std::to_string(values.size()) + " values for " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  Tensor t;
  t.shape = {rows, cols};
  t.data = std::move(values);
  return t;
}

std::size_t Tensor::rows() const {
  if (!is_matrix()) throw ShapeError("rows() on non-matrix tensor " + shape_str(*this));
  return shape[0];
}

std::size_t Tensor::cols() const {
  if (!is_matrix()) throw ShapeError("cols() on non-matrix tensor " + shape_str(*this));
  return shape[1];
}

double& Tensor::at(std::size_t r, std::size_t c) { return data[r * shape[1] + c]; }

double Tensor::at(std::size_t r, std::size_t c) const { return data[r * shape[1] + c]; }

bool Tensor::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

void Tensor::fill(double v) {
  for (double& x : data) x = v;
}

bool operator==(const Tensor& a, const Tensor& b) {
  return a.shape == b.shape && a.data == b.data;
}

std::string shape_str(const Tensor& t) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < t.shape.size(); ++i) {
    if (i) os << "x";
    os << t.shape[i];
  }
  os << ")";
  return os.str();
}

void require_vector(const Tensor& t, const char* name) {
  if (!t.is_vector())
    throw ShapeError(std::string(name) + ": expected vector, got " + shape_str(t));
}

void require_vector_dim(const Tensor& t, std::size_t dim, const char* name) {
  if (!t.is_vector() || t.shape[0] != dim)
    throw ShapeError(std::string(name) + ": expected vector of dim " + std::to_string(dim) +
                     ", got " + shape_str(t));
}

void require_matrix(const Tensor& t, std::size_t rows, std::size_t cols, const char* name) {
  if (!t.is_matrix() || t.shape[0] != rows || t.shape[1] != cols)
    throw ShapeError(std::string(name) + ": expected matrix " + std::to_string(rows) + "x" +
                     std::to_string(cols) + ", got " + shape_str(t));
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* name) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(name) + ": shape mismatch " + shape_str(a) + " vs " +
                     shape_str(b));
}

}  // namespace zpres
