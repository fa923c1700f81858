#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gds/core/errors.hpp"
#include "gds/core/types.hpp"

namespace gds {

enum class TransformKind { identity, log, log_cholesky };

inline const char* to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::identity: return "identity";
    case TransformKind::log: return "log";
    case TransformKind::log_cholesky: return "log_cholesky";
  }
  return "unknown";
}

/// A contiguous run of the unconstrained vector. For log_cholesky blocks `matrix_dim` is k and
/// `size` is k(k+1)/2, stored row by row over the lower triangle with the diagonal on the log scale.
struct TransformBlock {
  std::string name;
  TransformKind kind = TransformKind::identity;
  Index offset = 0;
  Index size = 0;
  Index matrix_dim = 0;
};

/// Constrained-scale value of one block: a column vector, or a k×k covariance matrix.
struct ConstrainedBlock {
  std::string name;
  TransformKind kind = TransformKind::identity;
  Matrix value;
};

inline Index lower_triangle_size(Index k) { return k * (k + 1) / 2; }

/// L with exp() on the diagonal and the strict lower triangle copied from `raw`.
inline Matrix cholesky_from_unconstrained(const double* raw, Index k) {
  Matrix l = Matrix::Zero(k, k);
  Index pos = 0;
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j <= i; ++j) {
      l(i, j) = (i == j) ? std::exp(raw[pos]) : raw[pos];
      ++pos;
    }
  }
  return l;
}

inline Vector unconstrained_from_cholesky(const Matrix& l) {
  const Index k = l.rows();
  Vector raw(lower_triangle_size(k));
  Index pos = 0;
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j <= i; ++j) raw[pos++] = (i == j) ? std::log(l(i, i)) : l(i, j);
  }
  return raw;
}

/// log |∂Ω/∂raw| for Ω = LLᵀ under the log-Cholesky map:
/// k·log 2 + Σᵢ (k − i + 2)·rawᵢᵢ with 1-based i.
inline double log_cholesky_log_jacobian(const double* raw, Index k) {
  double out = static_cast<double>(k) * std::numbers::ln2;
  Index pos = 0;
  for (Index i = 0; i < k; ++i) {
    pos += i;  // skip strict lower part of row i
    out += static_cast<double>(k - i + 1) * raw[pos];
    ++pos;
  }
  return out;
}

class TransformMap {
 public:
  TransformMap() = default;

  explicit TransformMap(std::vector<TransformBlock> blocks) : blocks_(std::move(blocks)) {
    Index next = 0;
    for (const auto& b : blocks_) {
      if (b.offset != next) throw ContractViolation("transform block '" + b.name + "' leaves a gap or overlaps");
      if (b.kind == TransformKind::log_cholesky && b.size != lower_triangle_size(b.matrix_dim)) {
        throw ContractViolation("log-Cholesky block '" + b.name + "' has the wrong size");
      }
      next += b.size;
    }
    dimension_ = next;
  }

  Index dimension() const { return dimension_; }
  const std::vector<TransformBlock>& blocks() const { return blocks_; }

 private:
  std::vector<TransformBlock> blocks_;
  Index dimension_ = 0;
};

/// Builds a map from (name, kind, size) triples, assigning offsets in order.
class TransformMapBuilder {
 public:
  TransformMapBuilder& add(std::string name, TransformKind kind, Index size) {
    blocks_.push_back({std::move(name), kind, offset_, size, 0});
    offset_ += size;
    return *this;
  }
  TransformMapBuilder& add_covariance(std::string name, Index k) {
    blocks_.push_back({std::move(name), TransformKind::log_cholesky, offset_, lower_triangle_size(k), k});
    offset_ += lower_triangle_size(k);
    return *this;
  }
  TransformMap build() { return TransformMap(std::move(blocks_)); }

 private:
  std::vector<TransformBlock> blocks_;
  Index offset_ = 0;
};

inline std::vector<ConstrainedBlock> to_constrained(const TransformMap& map, const ParameterVector& theta) {
  if (theta.size() != map.dimension()) throw ContractViolation("parameter vector does not match transform map");
  std::vector<ConstrainedBlock> out;
  out.reserve(map.blocks().size());
  for (const auto& b : map.blocks()) {
    ConstrainedBlock c{b.name, b.kind, {}};
    const auto seg = theta.segment(b.offset, b.size);
    switch (b.kind) {
      case TransformKind::identity: c.value = seg; break;
      case TransformKind::log: c.value = seg.array().exp().matrix(); break;
      case TransformKind::log_cholesky: {
        const Matrix l = cholesky_from_unconstrained(theta.data() + b.offset, b.matrix_dim);
        c.value = l * l.transpose();
        break;
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

inline ParameterVector from_constrained(const TransformMap& map, const std::vector<ConstrainedBlock>& blocks) {
  if (blocks.size() != map.blocks().size()) throw ContractViolation("block count does not match transform map");
  ParameterVector theta(map.dimension());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = map.blocks()[i];
    const Matrix& v = blocks[i].value;
    switch (b.kind) {
      case TransformKind::identity:
        theta.segment(b.offset, b.size) = v.reshaped();
        break;
      case TransformKind::log:
        if ((v.array() <= 0.0).any()) throw ContractViolation("block '" + b.name + "' must be positive");
        theta.segment(b.offset, b.size) = v.reshaped().array().log().matrix();
        break;
      case TransformKind::log_cholesky: {
        Eigen::LLT<Matrix> llt(v);
        if (llt.info() != Eigen::Success) throw ContractViolation("block '" + b.name + "' is not positive definite");
        theta.segment(b.offset, b.size) = unconstrained_from_cholesky(llt.matrixL().toDenseMatrix());
        break;
      }
    }
  }
  return theta;
}

/// Constrained values laid out with one entry per unconstrained coordinate: covariance blocks
/// contribute their lower triangle (row by row), everything else its entries in order.
inline Vector flatten_constrained(const TransformMap& map, const ParameterVector& theta) {
  Vector flat(map.dimension());
  const auto blocks = to_constrained(map, theta);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = map.blocks()[i];
    if (b.kind == TransformKind::log_cholesky) {
      Index pos = b.offset;
      for (Index r = 0; r < b.matrix_dim; ++r)
        for (Index c = 0; c <= r; ++c) flat[pos++] = blocks[i].value(r, c);
    } else {
      flat.segment(b.offset, b.size) = blocks[i].value.reshaped();
    }
  }
  return flat;
}

inline std::vector<std::string> flat_parameter_names(const TransformMap& map) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(map.dimension()));
  for (const auto& b : map.blocks()) {
    if (b.kind == TransformKind::log_cholesky) {
      for (Index r = 0; r < b.matrix_dim; ++r)
        for (Index c = 0; c <= r; ++c)
          names.push_back(b.name + "[" + std::to_string(r + 1) + "," + std::to_string(c + 1) + "]");
    } else if (b.size == 1) {
      names.push_back(b.name);
    } else {
      for (Index i = 0; i < b.size; ++i) names.push_back(b.name + "[" + std::to_string(i + 1) + "]");
    }
  }
  return names;
}

}  // namespace gds
