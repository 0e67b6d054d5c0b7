#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace vislide {

// Half-open slice [offset, offset+length) of a Point's value array.
struct Block {
  std::size_t offset = 0;
  std::size_t length = 0;

  friend bool operator==(const Block&, const Block&) = default;
};

// An element of the product space Z. Blocks tile the value array exactly;
// the constructor rejects gaps and overlaps.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> values);
  Point(std::vector<double> values, std::vector<Block> blocks);

  static Point zeros(std::size_t dim);
  static Point zeros_like(const Point& shape);
  static Point constant(std::size_t dim, double value);

  std::size_t dim() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  std::span<const double> block_span(std::size_t b) const;
  std::span<double> block_span(std::size_t b);

  bool same_shape(const Point& other) const;
  bool all_finite() const;
  // Throws std::runtime_error naming `context` if any entry is NaN/inf.
  void require_finite(const std::string& context) const;

  friend bool operator==(const Point& a, const Point& b) {
    return a.values_ == b.values_ && a.blocks_ == b.blocks_;
  }

 private:
  std::vector<double> values_;
  std::vector<Block> blocks_;
};

// Neumaier-compensated sum; used wherever a test tolerance is tighter
// than 1e-10.
double compensated_sum(std::span<const double> xs);

class CompensatedAccumulator {
 public:
  void add(double x);
  double total() const { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

enum class NormKind { euclidean, l1 };

// <a, b> = sum_i a_i b_i. Throws std::invalid_argument on dimension mismatch.
double dual_pairing(const Point& a, const Point& b);

double norm(const Point& p, NormKind kind);

// a*x + b*y with x's block structure. Dimensions must match.
Point lin_comb(double a, const Point& x, double b, const Point& y);

// x - y.
Point diff(const Point& x, const Point& y);

}  // namespace vislide
