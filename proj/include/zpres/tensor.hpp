#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace zpres {

// Dense 64-bit float tensor, row-major. Rank 1 for vectors, rank 2 for
// matrices; nothing here needs more.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;

  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor vec(std::vector<double> values);
  static Tensor scalar(double v);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t size() const { return data.size(); }
  bool is_vector() const { return shape.size() == 1; }
  bool is_matrix() const { return shape.size() == 2; }
  std::size_t rows() const;
  std::size_t cols() const;

  double& at(std::size_t r, std::size_t c);
  double at(std::size_t r, std::size_t c) const;

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
  bool all_finite() const;
  void fill(double v);
};

bool operator==(const Tensor& a, const Tensor& b);

std::string shape_str(const Tensor& t);

// Throw ShapeError naming `name` unless the expectation holds.
void require_vector(const Tensor& t, const char* name);
void require_vector_dim(const Tensor& t, std::size_t dim, const char* name);
void require_matrix(const Tensor& t, std::size_t rows, std::size_t cols, const char* name);
void require_same_shape(const Tensor& a, const Tensor& b, const char* name);

}  // namespace zpres
