#include "vislide/point.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace vislide {

namespace {

void check_blocks_tile(std::size_t dim, const std::vector<Block>& blocks) {
  std::size_t cursor = 0;
  for (const Block& b : blocks) {
    if (b.offset != cursor) {
      throw std::invalid_argument("Point: blocks must tile the value array "
                                  "without gaps or overlaps");
    }
    cursor += b.length;
  }
  if (cursor != dim) {
    throw std::invalid_argument("Point: block lengths do not sum to the "
                                "value dimension");
  }
}

}  // namespace

Point::Point(std::vector<double> values)
    : values_(std::move(values)), blocks_{Block{0, values_.size()}} {}

Point::Point(std::vector<double> values, std::vector<Block> blocks)
    : values_(std::move(values)), blocks_(std::move(blocks)) {
  check_blocks_tile(values_.size(), blocks_);
}

Point Point::zeros(std::size_t dim) {
  return Point(std::vector<double>(dim, 0.0));
}

Point Point::zeros_like(const Point& shape) {
  return Point(std::vector<double>(shape.dim(), 0.0), shape.blocks());
}

Point Point::constant(std::size_t dim, double value) {
  return Point(std::vector<double>(dim, value));
}

std::span<const double> Point::block_span(std::size_t b) const {
  const Block& blk = blocks_.at(b);
  return {values_.data() + blk.offset, blk.length};
}

std::span<double> Point::block_span(std::size_t b) {
  const Block& blk = blocks_.at(b);
  return {values_.data() + blk.offset, blk.length};
}

bool Point::same_shape(const Point& other) const {
  return dim() == other.dim() && blocks_ == other.blocks_;
}

bool Point::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Point::require_finite(const std::string& context) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw std::runtime_error("non-finite value at coordinate " +
                               std::to_string(i) + " in " + context);
    }
  }
}

void CompensatedAccumulator::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    correction_ += (sum_ - t) + x;
  } else {
    correction_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> xs) {
  CompensatedAccumulator acc;
  for (double x : xs) acc.add(x);
  return acc.total();
}

double dual_pairing(const Point& a, const Point& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("dual_pairing: dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()) + ")");
  }
  CompensatedAccumulator acc;
  for (std::size_t i = 0; i < a.dim(); ++i) acc.add(a[i] * b[i]);
  return acc.total();
}

double norm(const Point& p, NormKind kind) {
  CompensatedAccumulator acc;
  switch (kind) {
    case NormKind::euclidean:
      for (double v : p.values()) acc.add(v * v);
      return std::sqrt(acc.total());
    case NormKind::l1:
      for (double v : p.values()) acc.add(std::abs(v));
      return acc.total();
  }
  std::abort();
}

Point lin_comb(double a, const Point& x, double b, const Point& y) {
  if (x.dim() != y.dim()) {
    throw std::invalid_argument("lin_comb: dimension mismatch");
  }
  Point out = Point::zeros_like(x);
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = a * x[i] + b * y[i];
  return out;
}

Point diff(const Point& x, const Point& y) { return lin_comb(1.0, x, -1.0, y); }

}  // namespace vislide
