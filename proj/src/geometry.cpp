#include "vislide/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "vislide/rng.hpp"

namespace vislide {

namespace {

constexpr double kSimplexFloor = 1e-300;

double soft_threshold(double x, double tau) {
  if (x > tau) return x - tau;
  if (x < -tau) return x + tau;
  return 0.0;
}

}  // namespace

FeasibleSet FeasibleSet::box(std::vector<double> lo, std::vector<double> hi) {
  if (lo.size() != hi.size() || lo.empty()) {
    throw std::invalid_argument("box: bound vectors must be nonempty and of "
                                "equal size");
  }
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || lo[i] > hi[i]) {
      throw std::invalid_argument("box: bounds must be finite with lo <= hi");
    }
  }
  FeasibleSet s;
  s.kind_ = SetKind::box;
  s.dim_ = lo.size();
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  return s;
}

FeasibleSet FeasibleSet::box_uniform(std::size_t dim, double lo, double hi) {
  return box(std::vector<double>(dim, lo), std::vector<double>(dim, hi));
}

FeasibleSet FeasibleSet::ball(std::vector<double> center, double radius) {
  if (center.empty() || !std::isfinite(radius) || radius <= 0.0) {
    throw std::invalid_argument("ball: need nonempty center and finite "
                                "radius > 0");
  }
  for (double c : center) {
    if (!std::isfinite(c)) throw std::invalid_argument("ball: center must be finite");
  }
  FeasibleSet s;
  s.kind_ = SetKind::ball;
  s.dim_ = center.size();
  s.lo_ = std::move(center);
  s.radius_ = radius;
  return s;
}

FeasibleSet FeasibleSet::simplex(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("simplex: dim must be positive");
  FeasibleSet s;
  s.kind_ = SetKind::simplex;
  s.dim_ = dim;
  return s;
}

FeasibleSet FeasibleSet::product(std::vector<FeasibleSet> parts) {
  if (parts.empty()) throw std::invalid_argument("product: needs parts");
  FeasibleSet s;
  s.kind_ = SetKind::product;
  s.dim_ = 0;
  for (const FeasibleSet& p : parts) s.dim_ += p.dim();
  s.parts_ = std::move(parts);
  return s;
}

bool FeasibleSet::member_span(std::span<const double> p, double tol) const {
  switch (kind_) {
    case SetKind::box:
      for (std::size_t i = 0; i < dim_; ++i) {
        if (p[i] < lo_[i] - tol || p[i] > hi_[i] + tol) return false;
      }
      return true;
    case SetKind::ball: {
      CompensatedAccumulator acc;
      for (std::size_t i = 0; i < dim_; ++i) {
        const double d = p[i] - lo_[i];
        acc.add(d * d);
      }
      return std::sqrt(acc.total()) <= radius_ + tol * std::max(1.0, radius_);
    }
    case SetKind::simplex: {
      CompensatedAccumulator acc;
      for (std::size_t i = 0; i < dim_; ++i) {
        if (p[i] < -tol) return false;
        acc.add(p[i]);
      }
      return std::abs(acc.total() - 1.0) <= tol * static_cast<double>(dim_);
    }
    case SetKind::product: {
      std::size_t offset = 0;
      for (const FeasibleSet& part : parts_) {
        if (!part.member_span(p.subspan(offset, part.dim()), tol)) return false;
        offset += part.dim();
      }
      return true;
    }
  }
  return false;
}

void project_simplex_span(std::span<const double> in, std::span<double> out) {
  const std::size_t n = in.size();
  std::vector<double> sorted(in.begin(), in.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  std::size_t support = 0;
  for (std::size_t j = 0; j < n; ++j) {
    cumulative += sorted[j];
    const double candidate = (1.0 - cumulative) / static_cast<double>(j + 1);
    if (sorted[j] + candidate > 0.0) {
      tau = candidate;
      support = j + 1;
    }
  }
  if (support == 0) {  // all mass would vanish; fall back to uniform
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(n));
    return;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(in[i] + tau, 0.0);
}

void FeasibleSet::project_span(std::span<const double> in,
                               std::span<double> out) const {
  switch (kind_) {
    case SetKind::box:
      for (std::size_t i = 0; i < dim_; ++i) {
        out[i] = std::clamp(in[i], lo_[i], hi_[i]);
      }
      return;
    case SetKind::ball: {
      CompensatedAccumulator acc;
      for (std::size_t i = 0; i < dim_; ++i) {
        const double d = in[i] - lo_[i];
        acc.add(d * d);
      }
      const double dist = std::sqrt(acc.total());
      if (dist <= radius_) {
        std::copy(in.begin(), in.end(), out.begin());
      } else {
        const double scale = radius_ / dist;
        for (std::size_t i = 0; i < dim_; ++i) {
          out[i] = lo_[i] + scale * (in[i] - lo_[i]);
        }
      }
      return;
    }
    case SetKind::simplex:
      project_simplex_span(in, out);
      return;
    case SetKind::product: {
      std::size_t offset = 0;
      for (const FeasibleSet& part : parts_) {
        part.project_span(in.subspan(offset, part.dim()),
                          out.subspan(offset, part.dim()));
        offset += part.dim();
      }
      return;
    }
  }
}

bool FeasibleSet::member(const Point& p, double tol) const {
  if (p.dim() != dim_) return false;
  return member_span(p.values(), tol);
}

Point FeasibleSet::project(const Point& p) const {
  if (p.dim() != dim_) {
    throw std::invalid_argument("project: dimension mismatch");
  }
  Point out = Point::zeros_like(p);
  project_span(p.values(), out.values());
  return out;
}

Point FeasibleSet::center() const {
  std::vector<double> c(dim_, 0.0);
  switch (kind_) {
    case SetKind::box:
      for (std::size_t i = 0; i < dim_; ++i) c[i] = 0.5 * (lo_[i] + hi_[i]);
      break;
    case SetKind::ball:
      c = lo_;
      break;
    case SetKind::simplex:
      std::fill(c.begin(), c.end(), 1.0 / static_cast<double>(dim_));
      break;
    case SetKind::product: {
      std::size_t offset = 0;
      for (const FeasibleSet& part : parts_) {
        const Point pc = part.center();
        std::copy(pc.values().begin(), pc.values().end(), c.begin() + offset);
        offset += part.dim();
      }
      break;
    }
  }
  return Point(std::move(c), natural_blocks());
}

std::vector<Block> FeasibleSet::natural_blocks() const {
  if (kind_ != SetKind::product) return {Block{0, dim_}};
  std::vector<Block> blocks;
  std::size_t offset = 0;
  for (const FeasibleSet& part : parts_) {
    blocks.push_back(Block{offset, part.dim()});
    offset += part.dim();
  }
  return blocks;
}

std::vector<Point> FeasibleSet::vertices(std::size_t max_count) const {
  std::vector<std::vector<double>> raw;
  switch (kind_) {
    case SetKind::box: {
      if (dim_ > 40 || (std::size_t{1} << dim_) > max_count) return {};
      const std::size_t count = std::size_t{1} << dim_;
      raw.reserve(count);
      for (std::size_t mask = 0; mask < count; ++mask) {
        std::vector<double> v(dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
          v[i] = (mask >> i) & 1u ? hi_[i] : lo_[i];
        }
        raw.push_back(std::move(v));
      }
      break;
    }
    case SetKind::simplex: {
      if (dim_ > max_count) return {};
      for (std::size_t i = 0; i < dim_; ++i) {
        std::vector<double> v(dim_, 0.0);
        v[i] = 1.0;
        raw.push_back(std::move(v));
      }
      break;
    }
    case SetKind::ball:
      return {};  // not enumerable
    case SetKind::product: {
      std::vector<std::vector<std::vector<double>>> part_vertices;
      std::size_t total = 1;
      for (const FeasibleSet& part : parts_) {
        std::vector<Point> pv = part.vertices(max_count);
        if (pv.empty()) return {};
        total *= pv.size();
        if (total > max_count) return {};
        std::vector<std::vector<double>> vals;
        vals.reserve(pv.size());
        for (Point& p : pv) vals.push_back(std::move(p.values()));
        part_vertices.push_back(std::move(vals));
      }
      std::vector<std::vector<double>> acc{{}};
      for (const auto& pv : part_vertices) {
        std::vector<std::vector<double>> next;
        next.reserve(acc.size() * pv.size());
        for (const auto& prefix : acc) {
          for (const auto& v : pv) {
            std::vector<double> combined = prefix;
            combined.insert(combined.end(), v.begin(), v.end());
            next.push_back(std::move(combined));
          }
        }
        acc = std::move(next);
      }
      raw = std::move(acc);
      break;
    }
  }
  std::vector<Point> out;
  out.reserve(raw.size());
  const std::vector<Block> blocks = natural_blocks();
  for (auto& v : raw) out.emplace_back(std::move(v), blocks);
  return out;
}

bool FeasibleSet::all_simplex() const {
  if (kind_ == SetKind::simplex) return true;
  if (kind_ != SetKind::product) return false;
  return std::all_of(parts_.begin(), parts_.end(),
                     [](const FeasibleSet& p) { return p.all_simplex(); });
}

bool FeasibleSet::all_box() const {
  if (kind_ == SetKind::box) return true;
  if (kind_ != SetKind::product) return false;
  return std::all_of(parts_.begin(), parts_.end(),
                     [](const FeasibleSet& p) { return p.all_box(); });
}

SimpleTerm SimpleTerm::l1(double weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw std::invalid_argument("SimpleTerm::l1: weight must be >= 0");
  }
  return SimpleTerm{SimpleTermKind::l1, weight};
}

double SimpleTerm::value(const Point& z) const {
  if (kind_ == SimpleTermKind::zero) return 0.0;
  CompensatedAccumulator acc;
  for (double v : z.values()) acc.add(std::abs(v));
  return weight_ * acc.total();
}

ProxSetup make_prox_setup(ProxKind prox, FeasibleSet set, SimpleTerm j) {
  switch (prox) {
    case ProxKind::euclidean: {
      const bool set_ok =
          set.all_box() || set.kind() == SetKind::ball ||
          set.kind() == SetKind::simplex ||
          (set.kind() == SetKind::product &&
           std::all_of(set.parts().begin(), set.parts().end(),
                       [](const FeasibleSet& p) {
                         return p.kind() != SetKind::product;
                       }));
      if (!set_ok) {
        throw std::invalid_argument(
            "prox setup: euclidean prox supports box/ball/simplex sets and "
            "one-level products of those");
      }
      if (j.kind() == SimpleTermKind::l1 && !set.all_box()) {
        throw std::invalid_argument(
            "prox setup: l1 simple term requires a box (or product of "
            "boxes) feasible set");
      }
      break;
    }
    case ProxKind::entropy: {
      if (!set.all_simplex()) {
        throw std::invalid_argument(
            "prox setup: entropy prox requires a simplex or product of "
            "simplices");
      }
      if (j.kind() != SimpleTermKind::zero) {
        throw std::invalid_argument(
            "prox setup: entropy prox supports only J = 0");
      }
      break;
    }
  }
  return ProxSetup{prox, std::move(set), j};
}

namespace {

// Leaf segments of a (possibly nested) product set.
struct LeafRef {
  std::size_t offset;
  const FeasibleSet* set;
};

void collect_leaves(const FeasibleSet& s, std::size_t base,
                    std::vector<LeafRef>& out) {
  if (s.kind() == SetKind::product) {
    std::size_t offset = base;
    for (const FeasibleSet& part : s.parts()) {
      collect_leaves(part, offset, out);
      offset += part.dim();
    }
  } else {
    out.push_back(LeafRef{base, &s});
  }
}

std::vector<LeafRef> leaves_of(const FeasibleSet& s) {
  std::vector<LeafRef> out;
  collect_leaves(s, 0, out);
  return out;
}

double entropy_bregman_block(std::span<const double> z,
                             std::span<const double> u) {
  CompensatedAccumulator acc;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] <= 0.0) {
      throw std::invalid_argument(
          "bregman: entropy prox requires strictly positive first argument");
    }
    if (u[i] > 0.0) acc.add(u[i] * std::log(u[i] / z[i]));
  }
  return acc.total();
}

}  // namespace

double bregman(const ProxSetup& setup, const Point& z, const Point& u) {
  if (z.dim() != u.dim() || z.dim() != setup.set.dim()) {
    throw std::invalid_argument("bregman: dimension mismatch");
  }
  if (setup.prox == ProxKind::euclidean) {
    CompensatedAccumulator acc;
    for (std::size_t i = 0; i < z.dim(); ++i) {
      const double d = z[i] - u[i];
      acc.add(d * d);
    }
    return 0.5 * acc.total();
  }
  CompensatedAccumulator acc;
  for (const LeafRef& leaf : leaves_of(setup.set)) {
    const std::size_t n = leaf.set->dim();
    acc.add(entropy_bregman_block({z.values().data() + leaf.offset, n},
                                  {u.values().data() + leaf.offset, n}));
  }
  return acc.total();
}

Point prox_map(const ProxSetup& setup, const Point& g, const Point& z0,
               const Point& z1, double beta, double eta) {
  const std::size_t n = setup.set.dim();
  if (g.dim() != n || z0.dim() != n || z1.dim() != n) {
    throw std::invalid_argument("prox_map: dimension mismatch");
  }
  if (beta < 0.0 || eta < 0.0 || beta + eta <= 0.0) {
    throw std::invalid_argument(
        "prox_map: need beta >= 0, eta >= 0, beta + eta > 0");
  }
  const double rho = beta + eta;
  Point out = Point::zeros_like(z0);

  if (setup.prox == ProxKind::euclidean) {
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = (beta * z0[i] + eta * z1[i] - g[i]) / rho;
    }
    if (setup.j.kind() == SimpleTermKind::l1) {
      const double tau = setup.j.weight() / rho;
      for (std::size_t i = 0; i < n; ++i) u[i] = soft_threshold(u[i], tau);
    }
    setup.set.project_span(u, out.values());
    return out;
  }

  // Entropy: multiplicative collapse in log space, exponentiated-gradient
  // step, then per-block normalization.
  const double wb = beta / rho;
  const double we = eta / rho;
  std::vector<double> logits(n);
  for (const LeafRef& leaf : leaves_of(setup.set)) {
    const std::size_t len = leaf.set->dim();
    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t i = leaf.offset; i < leaf.offset + len; ++i) {
      if (z0[i] <= 0.0 || z1[i] <= 0.0) {
        throw std::invalid_argument(
            "prox_map: entropy prox centers must be strictly positive");
      }
      logits[i] = wb * std::log(z0[i]) + we * std::log(z1[i]) - g[i] / rho;
      max_logit = std::max(max_logit, logits[i]);
    }
    double sum = 0.0;
    for (std::size_t i = leaf.offset; i < leaf.offset + len; ++i) {
      logits[i] = std::exp(logits[i] - max_logit);
      sum += logits[i];
    }
    for (std::size_t i = leaf.offset; i < leaf.offset + len; ++i) {
      out[i] = std::max(logits[i] / sum, kSimplexFloor);
    }
  }
  return out;
}

namespace {

// d/dz of the prox-function: identity for Euclidean, 1 + log z for entropy.
double prox_gradient_coord(ProxKind kind, double z) {
  if (kind == ProxKind::euclidean) return z;
  return 1.0 + std::log(std::max(z, kSimplexFloor));
}

std::vector<Point> residual_probes(const ProxSetup& setup,
                                   const Point& candidate) {
  constexpr std::size_t kMaxVertices = std::size_t{1} << 12;
  std::vector<Point> probes = setup.set.vertices(kMaxVertices);
  if (!probes.empty()) return probes;

  RngStream rng(0x5EEDBA5Eu, 0);
  const std::size_t n = setup.set.dim();
  std::vector<double> lo(n, -1.0), hi(n, 1.0);
  for (const LeafRef& leaf : leaves_of(setup.set)) {
    for (std::size_t i = 0; i < leaf.set->dim(); ++i) {
      const std::size_t at = leaf.offset + i;
      switch (leaf.set->kind()) {
        case SetKind::box:
          lo[at] = leaf.set->box_lo()[i];
          hi[at] = leaf.set->box_hi()[i];
          break;
        case SetKind::ball:
          lo[at] = leaf.set->ball_center()[i] - leaf.set->ball_radius();
          hi[at] = leaf.set->ball_center()[i] + leaf.set->ball_radius();
          break;
        case SetKind::simplex:
          lo[at] = 0.0;
          hi[at] = 1.0;
          break;
        case SetKind::product:
          break;  // unreachable, leaves are non-product
      }
    }
  }
  for (int s = 0; s < 256; ++s) {
    Point raw = Point::zeros_like(candidate);
    for (std::size_t i = 0; i < n; ++i) raw[i] = rng.uniform(lo[i], hi[i]);
    probes.push_back(setup.set.project(raw));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (double delta : {1e-2, -1e-2, 1e-4, -1e-4}) {
      Point perturbed = candidate;
      perturbed[i] += delta;
      probes.push_back(setup.set.project(perturbed));
    }
  }
  return probes;
}

}  // namespace

double prox_optimality_residual(const ProxSetup& setup, const Point& g,
                                const Point& z0, const Point& z1, double beta,
                                double eta, const Point& candidate) {
  const std::size_t n = setup.set.dim();
  Point v = Point::zeros_like(candidate);
  for (std::size_t i = 0; i < n; ++i) {
    const double pc = prox_gradient_coord(setup.prox, candidate[i]);
    v[i] = g[i] + beta * (pc - prox_gradient_coord(setup.prox, z0[i])) +
           eta * (pc - prox_gradient_coord(setup.prox, z1[i]));
  }
  const double j_candidate = setup.j.value(candidate);
  double worst = 0.0;
  for (const Point& z : residual_probes(setup, candidate)) {
    const double r =
        dual_pairing(v, diff(candidate, z)) + j_candidate - setup.j.value(z);
    worst = std::max(worst, r);
  }
  return worst;
}

namespace {

double omega_leaf(ProxKind prox, const FeasibleSet& set,
                  std::span<const double> z0) {
  switch (set.kind()) {
    case SetKind::box: {
      if (prox != ProxKind::euclidean) break;
      CompensatedAccumulator acc;
      for (std::size_t i = 0; i < set.dim(); ++i) {
        const double a = z0[i] - set.box_lo()[i];
        const double b = set.box_hi()[i] - z0[i];
        acc.add(std::max(a * a, b * b));
      }
      return 0.5 * acc.total();
    }
    case SetKind::ball: {
      if (prox != ProxKind::euclidean) break;
      CompensatedAccumulator acc;
      for (std::size_t i = 0; i < set.dim(); ++i) {
        const double d = z0[i] - set.ball_center()[i];
        acc.add(d * d);
      }
      const double reach = set.ball_radius() + std::sqrt(acc.total());
      return 0.5 * reach * reach;
    }
    case SetKind::simplex: {
      if (prox == ProxKind::entropy) {
        double worst = 0.0;
        for (std::size_t i = 0; i < set.dim(); ++i) {
          if (z0[i] <= 0.0) {
            throw std::invalid_argument(
                "omega: entropy prox requires an interior start point");
          }
          worst = std::max(worst, std::log(1.0 / z0[i]));
        }
        return worst;
      }
      // Euclidean over the simplex: the supremum sits at a vertex.
      CompensatedAccumulator sq;
      for (std::size_t i = 0; i < set.dim(); ++i) sq.add(z0[i] * z0[i]);
      double worst = 0.0;
      for (std::size_t i = 0; i < set.dim(); ++i) {
        const double d = sq.total() - z0[i] * z0[i] + (1.0 - z0[i]) * (1.0 - z0[i]);
        worst = std::max(worst, 0.5 * d);
      }
      return worst;
    }
    case SetKind::product:
      break;
  }
  throw std::invalid_argument("omega: unsupported prox/set combination");
}

}  // namespace

double omega(const ProxSetup& setup, const Point& z0) {
  if (z0.dim() != setup.set.dim()) {
    throw std::invalid_argument("omega: dimension mismatch");
  }
  CompensatedAccumulator acc;
  for (const LeafRef& leaf : leaves_of(setup.set)) {
    acc.add(omega_leaf(setup.prox, *leaf.set,
                       {z0.values().data() + leaf.offset, leaf.set->dim()}));
  }
  return acc.total();
}

double setup_norm(const ProxSetup& setup, const Point& d) {
  if (setup.prox == ProxKind::euclidean) return norm(d, NormKind::euclidean);
  CompensatedAccumulator acc;
  for (const LeafRef& leaf : leaves_of(setup.set)) {
    CompensatedAccumulator block;
    for (std::size_t i = 0; i < leaf.set->dim(); ++i) {
      block.add(std::abs(d[leaf.offset + i]));
    }
    acc.add(block.total() * block.total());
  }
  return std::sqrt(acc.total());
}

double setup_dual_norm(const ProxSetup& setup, const Point& d) {
  if (setup.prox == ProxKind::euclidean) return norm(d, NormKind::euclidean);
  CompensatedAccumulator acc;
  for (const LeafRef& leaf : leaves_of(setup.set)) {
    double block_max = 0.0;
    for (std::size_t i = 0; i < leaf.set->dim(); ++i) {
      block_max = std::max(block_max, std::abs(d[leaf.offset + i]));
    }
    acc.add(block_max * block_max);
  }
  return std::sqrt(acc.total());
}

}  // namespace vislide
