#pragma once

#include <stdexcept>
#include <string>

namespace zpres {

// Shape or arity misuse of a numeric op; message names the offending tensor.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file (corpus, embeddings, checkpoint); message carries the
// file location where known.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid run configuration (missing path, conflicting dimensions).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite value where finite math is required (loss blowup, bad gradcheck).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Resolution was asked for a gap with no candidate antecedents; distinct from
// a wrong prediction.
struct NoCandidatesError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace zpres
