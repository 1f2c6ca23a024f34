#include "datacopy/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "datacopy/errors.hpp"

namespace datacopy {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double AnalyticDistribution::exact_ball_mass(std::span<const double>, double) const {
  throw ValidationError("exact_ball_mass: not available for " + id());
}

PointSet AnalyticDistribution::sample(std::size_t n, RandomStream& rng) const {
  PointSet out(dim());
  out.reserve(n);
  std::vector<double> buf(dim());
  for (std::size_t i = 0; i < n; ++i) {
    sample_one(rng, buf);
    out.push_back(buf);
  }
  return out;
}

PointSet AnalyticDistribution::sample(std::size_t n, std::uint64_t seed) const {
  RandomStream rng(seed);
  return sample(n, rng);
}

// ---------------------------------------------------------------------------
// Halfmoons

Halfmoons::Halfmoons(double sigma) : sigma_(sigma) {
  if (sigma < 0.0) throw ValidationError("Halfmoons: sigma must be nonnegative");
}

void Halfmoons::sample_one(RandomStream& rng, std::span<double> out) const {
  const bool outer = rng.bernoulli(0.5);
  const double t = rng.uniform(0.0, kPi);
  double x, y;
  if (outer) {
    x = std::cos(t);
    y = std::sin(t);
  } else {
    x = 1.0 - std::cos(t);
    y = 0.5 - std::sin(t);
  }
  out[0] = x + sigma_ * rng.gaussian();
  out[1] = y + sigma_ * rng.gaussian();
}

std::string Halfmoons::id() const { return "halfmoons(sigma=" + fmt_double(sigma_) + ")"; }

PointSet sample_halfmoons(std::size_t n, double sigma, std::uint64_t seed) {
  if (n < 1) throw ValidationError("sample_halfmoons: n must be >= 1");
  return Halfmoons(sigma).sample(n, seed);
}

// ---------------------------------------------------------------------------
// DiskNoise

DiskNoise::DiskNoise(std::shared_ptr<const AnalyticDistribution> base, double radius)
    : base_(std::move(base)), radius_(radius) {
  if (!base_) throw ValidationError("DiskNoise: base distribution is null");
  if (radius < 0.0) throw ValidationError("DiskNoise: radius must be nonnegative");
}

void DiskNoise::sample_one(RandomStream& rng, std::span<double> out) const {
  base_->sample_one(rng, out);
  std::vector<double> eta(out.size());
  rng.uniform_ball(radius_, eta);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += eta[i];
}

std::string DiskNoise::id() const {
  return "disk_noise(base=" + base_->id() + ",radius=" + fmt_double(radius_) + ")";
}

// ---------------------------------------------------------------------------
// PointAtoms

PointAtoms::PointAtoms(PointSet points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.empty()) throw ValidationError("PointAtoms: point set is empty");
  if (weights_.empty()) return;  // uniform
  if (weights_.size() != points_.size()) {
    throw ValidationError("PointAtoms: weights size must match point count");
  }
  double sum = 0.0;
  for (double w : weights_) {
    if (w < 0.0) throw ValidationError("PointAtoms: weights must be nonnegative");
    sum += w;
  }
  if (sum <= 0.0) throw ValidationError("PointAtoms: weights must not all be zero");
  for (double& w : weights_) w /= sum;
}

void PointAtoms::sample_one(RandomStream& rng, std::span<double> out) const {
  std::size_t idx;
  if (weights_.empty()) {
    idx = rng.index(points_.size());
  } else {
    const double u = rng.uniform();
    double cum = 0.0;
    idx = points_.size() - 1;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      cum += weights_[i];
      if (u < cum) {
        idx = i;
        break;
      }
    }
  }
  auto p = points_[idx];
  std::copy(p.begin(), p.end(), out.begin());
}

std::string PointAtoms::id() const {
  return "point_atoms(n=" + std::to_string(points_.size()) + ")";
}

double PointAtoms::exact_ball_mass(std::span<const double> center, double r) const {
  long double mass = 0.0L;
  const double uniform_w = 1.0 / static_cast<double>(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (distance(points_[i], center) <= r) {
      mass += weights_.empty() ? uniform_w : weights_[i];
    }
  }
  return std::min(static_cast<double>(mass), 1.0);
}

// ---------------------------------------------------------------------------
// CopierMixture

CopierMixture::CopierMixture(double rho, std::shared_ptr<const AnalyticDistribution> copy_component,
                             std::shared_ptr<const AnalyticDistribution> underfit_component)
    : rho_(rho), copy_(std::move(copy_component)), underfit_(std::move(underfit_component)) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw ValidationError("CopierMixture: rho must be in [0, 1]");
  if (copy_->dim() != underfit_->dim()) {
    throw ValidationError("CopierMixture: component dimensions differ");
  }
}

void CopierMixture::sample_one(RandomStream& rng, std::span<double> out) const {
  if (rng.bernoulli(rho_)) {
    copy_->sample_one(rng, out);
  } else {
    underfit_->sample_one(rng, out);
  }
}

std::string CopierMixture::id() const {
  return "copier_mixture(rho=" + fmt_double(rho_) + ",copy=" + copy_->id() +
         ",underfit=" + underfit_->id() + ")";
}

std::shared_ptr<const CopierMixture> make_copier_mixture_distribution(
    const PointSet& S, double rho, std::size_t copy_count, double copy_noise,
    double underfit_noise, std::shared_ptr<const AnalyticDistribution> base,
    std::uint64_t selection_seed) {
  if (copy_count > S.size()) {
    throw ValidationError("make_copier_mixture: copy_count exceeds |S| (" +
                          std::to_string(copy_count) + " > " + std::to_string(S.size()) + ")");
  }
  if (copy_count < 1) throw ValidationError("make_copier_mixture: copy_count must be >= 1");

  // Seeded uniform choice of S' via partial Fisher-Yates.
  std::vector<std::size_t> idx(S.size());
  std::iota(idx.begin(), idx.end(), 0);
  RandomStream sel(selection_seed);
  for (std::size_t i = 0; i < copy_count; ++i) {
    const std::size_t j = i + sel.index(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  PointSet sprime(S.dim());
  for (std::size_t i = 0; i < copy_count; ++i) sprime.push_back(S[idx[i]]);

  auto copy_comp = std::make_shared<DiskNoise>(
      std::make_shared<PointAtoms>(std::move(sprime)), copy_noise);
  auto underfit_comp = std::make_shared<DiskNoise>(std::move(base), underfit_noise);
  return std::make_shared<CopierMixture>(rho, std::move(copy_comp), std::move(underfit_comp));
}

std::unique_ptr<SamplerOracle> make_copier_mixture(
    const PointSet& S, double rho, std::size_t copy_count, double copy_noise,
    double underfit_noise, std::shared_ptr<const AnalyticDistribution> base,
    std::uint64_t seed) {
  auto dist = make_copier_mixture_distribution(S, rho, copy_count, copy_noise, underfit_noise,
                                               std::move(base), derive_seed(seed, 1));
  return std::make_unique<AnalyticSampler>(std::move(dist), derive_seed(seed, 2));
}

// ---------------------------------------------------------------------------
// KDE

const char* kernel_name(Kernel k) {
  switch (k) {
    case Kernel::gaussian: return "gaussian";
    case Kernel::uniform_ball: return "uniform_ball";
  }
  return "?";
}

KdeDistribution::KdeDistribution(PointSet S, double sigma, Kernel kernel)
    : S_(std::move(S)), sigma_(sigma), kernel_(kernel) {
  if (S_.empty()) throw ValidationError("kde_sampler: training set is empty");
  if (!(sigma > 0.0)) throw ValidationError("kde_sampler: sigma must be positive");
}

void KdeDistribution::sample_one(RandomStream& rng, std::span<double> out) const {
  const std::size_t idx = rng.index(S_.size());
  auto x = S_[idx];
  if (kernel_ == Kernel::gaussian) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = x[j] + sigma_ * rng.gaussian();
  } else {
    std::vector<double> eta(out.size());
    rng.uniform_ball(1.0, eta);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = x[j] + sigma_ * eta[j];
  }
}

std::string KdeDistribution::id() const {
  return std::string("kde(n=") + std::to_string(S_.size()) + ",sigma=" + fmt_double(sigma_) +
         ",kernel=" + kernel_name(kernel_) + ")";
}

std::unique_ptr<SamplerOracle> kde_sampler(const PointSet& S, double sigma, Kernel kernel,
                                           std::uint64_t seed) {
  return std::make_unique<AnalyticSampler>(std::make_shared<KdeDistribution>(S, sigma, kernel),
                                           seed);
}

// ---------------------------------------------------------------------------
// Uniform cube and the KDE lower-bound fixture

UniformCube::UniformCube(double side, int dim) : side_(side), dim_(dim) {
  if (!(side > 0.0)) throw ValidationError("UniformCube: side must be positive");
  if (dim < 1) throw ValidationError("UniformCube: dimension must be >= 1");
}

void UniformCube::sample_one(RandomStream& rng, std::span<double> out) const {
  for (double& v : out) v = rng.uniform(0.0, side_);
}

std::string UniformCube::id() const {
  return "uniform_cube(side=" + fmt_double(side_) + ",d=" + std::to_string(dim_) + ")";
}

double unit_ball_volume(int d) {
  if (d < 1) throw ValidationError("unit_ball_volume: d must be >= 1");
  return std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

double kernel_median_radius(Kernel kernel, int d) {
  if (d < 1) throw ValidationError("kernel_median_radius: d must be >= 1");
  if (kernel == Kernel::uniform_ball) {
    return std::pow(2.0, -1.0 / d);
  }
  boost::math::chi_squared chi2(static_cast<double>(d));
  return std::sqrt(boost::math::quantile(chi2, 0.5));
}

CubeKdeFixture uniform_cube_kde_fixture(long long n, double lambda, double gamma, double sigma,
                                        int d, Kernel kernel,
                                        std::optional<double> median_radius_override) {
  if (n < 1) throw ValidationError("uniform_cube_kde_fixture: n must be >= 1");
  if (!(lambda > 1.0)) throw ValidationError("uniform_cube_kde_fixture: lambda must exceed 1");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ValidationError("uniform_cube_kde_fixture: gamma must be in (0, 1)");
  }
  if (!(sigma > 0.0)) throw ValidationError("uniform_cube_kde_fixture: sigma must be positive");
  const double R = median_radius_override ? *median_radius_override : kernel_median_radius(kernel, d);
  const double bulk = std::max(2.0 * static_cast<double>(n) * lambda, 1.0 / gamma);
  const double D = R * sigma * std::pow(bulk * unit_ball_volume(d), 1.0 / d);
  return CubeKdeFixture{std::make_shared<UniformCube>(D, d), D, R};
}

// ---------------------------------------------------------------------------
// Circle family

void CircleGeometry::validate() const {
  const std::size_t count = centers.size();
  if (count < 3 || count % 2 == 0) {
    throw ValidationError("CircleGeometry: need 2*kappa + 1 centers including C_0");
  }
  if (centers.dim() < 2) throw ValidationError("CircleGeometry: dimension must be >= 2");
  constexpr double tol = 1e-9;
  double max_pair = 0.0;  // largest point-to-point distance among data circles
  for (std::size_t i = 1; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      const double cd = distance(centers[i], centers[j]);
      if (cd - 2.0 < 3.0 - tol) {
        throw ValidationError("CircleGeometry: data circles closer than set distance 3");
      }
      max_pair = std::max(max_pair, cd + 2.0);
    }
  }
  for (std::size_t i = 1; i < count; ++i) {
    const double cd = distance(centers[0], centers[i]);
    if (cd - 2.0 < 2.0 + max_pair - tol) {
      throw ValidationError("CircleGeometry: C_0 is too close to the data circles");
    }
  }
}

CircleGeometry CircleGeometry::axis_layout(int kappa, int dim) {
  if (kappa < 1) throw ValidationError("CircleGeometry: kappa must be >= 1");
  if (dim < 2) throw ValidationError("CircleGeometry: dimension must be >= 2");
  PointSet centers(dim);
  std::vector<double> c(dim, 0.0);
  c[0] = -(5.0 * (2 * kappa - 1) + 7.0);
  centers.push_back(c);  // C_0
  for (int i = 1; i <= 2 * kappa; ++i) {
    c[0] = 5.0 * (i - 1);
    centers.push_back(c);
  }
  CircleGeometry g{std::move(centers)};
  g.validate();
  return g;
}

void IndexSubset::validate() const {
  if (kappa < 1) throw ValidationError("IndexSubset: kappa must be >= 1");
  if (static_cast<int>(members.size()) != kappa) {
    throw ValidationError("IndexSubset: need exactly kappa member indices");
  }
  for (int i : members) {
    if (i < 1 || i > 2 * kappa) {
      throw ValidationError("IndexSubset: member index out of {1..2 kappa}");
    }
  }
}

IndexSubset IndexSubset::complement() const {
  validate();
  IndexSubset out{kappa, {}};
  for (int i = 1; i <= 2 * kappa; ++i) {
    if (!members.count(i)) out.members.insert(i);
  }
  return out;
}

IndexSubset IndexSubset::first_half(int kappa) {
  IndexSubset out{kappa, {}};
  for (int i = 1; i <= kappa; ++i) out.members.insert(i);
  out.validate();
  return out;
}

IndexSubset IndexSubset::random(int kappa, std::uint64_t seed) {
  std::vector<int> idx(2 * kappa);
  std::iota(idx.begin(), idx.end(), 1);
  RandomStream rng(seed);
  IndexSubset out{kappa, {}};
  for (int i = 0; i < kappa; ++i) {
    const std::size_t j = i + rng.index(idx.size() - i);
    std::swap(idx[i], idx[j]);
    out.members.insert(idx[i]);
  }
  out.validate();
  return out;
}

CircleFamily::CircleFamily(CircleGeometry geometry, std::vector<double> weights,
                           std::optional<std::pair<double, double>> p_eps_bounds)
    : geometry_(std::move(geometry)), weights_(std::move(weights)), p_eps_(p_eps_bounds) {
  geometry_.validate();
  if (weights_.size() != geometry_.centers.size()) {
    throw ValidationError("CircleFamily: one weight per circle required");
  }
  long double sum = 0.0L;
  for (double w : weights_) {
    if (w < 0.0) throw ValidationError("CircleFamily: weights must be nonnegative");
    sum += w;
  }
  if (std::abs(static_cast<double>(sum) - 1.0) > 1e-9) {
    throw ValidationError("CircleFamily: weights must sum to 1");
  }
}

void CircleFamily::sample_one(RandomStream& rng, std::span<double> out) const {
  const double u = rng.uniform();
  std::size_t idx = weights_.size() - 1;
  double cum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    cum += weights_[i];
    if (u < cum) {
      idx = i;
      break;
    }
  }
  const double theta = rng.angle();
  auto c = geometry_.centers[idx];
  std::copy(c.begin(), c.end(), out.begin());
  out[0] += std::cos(theta);
  out[1] += std::sin(theta);
}

std::string CircleFamily::id() const {
  std::ostringstream os;
  os << "circle_family(kappa=" << geometry_.kappa() << ",w=";
  for (double w : weights_) os << fmt_double(w) << ",";
  os << ")";
  return os.str();
}

double CircleFamily::arc_fraction(std::size_t i, std::span<const double> center, double r) const {
  auto c = geometry_.centers[i];
  if (center.size() != c.size()) {
    throw ValidationError("CircleFamily::arc_fraction: dimension mismatch");
  }
  if (r < 0.0) return 0.0;
  const double dx = center[0] - c[0];
  const double dy = center[1] - c[1];
  const double a = std::hypot(dx, dy);  // in-plane offset
  double h2 = 0.0;                      // squared out-of-plane offset
  for (std::size_t j = 2; j < c.size(); ++j) {
    const double dz = center[j] - c[j];
    h2 += dz * dz;
  }
  if (a == 0.0) {
    // all circle points equidistant at sqrt(1 + h^2)
    return (1.0 + h2 <= r * r) ? 1.0 : 0.0;
  }
  const double u = (1.0 + a * a + h2 - r * r) / (2.0 * a);
  if (u > 1.0) return 0.0;
  if (u <= -1.0) return 1.0;
  return std::acos(u) / kPi;
}

double CircleFamily::exact_ball_mass(std::span<const double> center, double r) const {
  long double mass = 0.0L;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] == 0.0) continue;
    mass += static_cast<long double>(weights_[i]) * arc_fraction(i, center, r);
  }
  return std::min(static_cast<double>(mass), 1.0);
}

double CircleFamily::union_mass(std::span<const Ball> balls) const {
  long double total = 0.0L;
  std::vector<std::pair<double, double>> intervals;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] == 0.0) continue;
    auto c = geometry_.centers[i];
    bool full = false;
    intervals.clear();
    for (const Ball& ball : balls) {
      const double dx = ball.center[0] - c[0];
      const double dy = ball.center[1] - c[1];
      const double a = std::hypot(dx, dy);
      double h2 = 0.0;
      for (std::size_t j = 2; j < c.size(); ++j) {
        const double dz = ball.center[j] - c[j];
        h2 += dz * dz;
      }
      const double r2 = ball.radius * ball.radius;
      if (a == 0.0) {
        if (1.0 + h2 <= r2) full = true;
        continue;
      }
      const double u = (1.0 + a * a + h2 - r2) / (2.0 * a);
      if (u > 1.0) continue;
      if (u <= -1.0) {
        full = true;
        break;
      }
      const double w = std::acos(u);
      const double phi = std::atan2(dy, dx);
      double lo = phi - w;
      double hi = phi + w;
      // normalize to [0, 2 pi), splitting wrap-around
      while (lo < 0.0) {
        lo += 2.0 * kPi;
        hi += 2.0 * kPi;
      }
      if (hi <= 2.0 * kPi) {
        intervals.emplace_back(lo, hi);
      } else {
        intervals.emplace_back(lo, 2.0 * kPi);
        intervals.emplace_back(0.0, hi - 2.0 * kPi);
      }
    }
    if (full) {
      total += weights_[i];
      continue;
    }
    if (intervals.empty()) continue;
    std::sort(intervals.begin(), intervals.end());
    long double covered = 0.0L;
    double cur_lo = intervals[0].first;
    double cur_hi = intervals[0].second;
    for (std::size_t t = 1; t < intervals.size(); ++t) {
      if (intervals[t].first <= cur_hi) {
        cur_hi = std::max(cur_hi, intervals[t].second);
      } else {
        covered += static_cast<long double>(cur_hi) - cur_lo;
        cur_lo = intervals[t].first;
        cur_hi = intervals[t].second;
      }
    }
    covered += static_cast<long double>(cur_hi) - cur_lo;
    total += static_cast<long double>(weights_[i]) * (covered / (2.0L * kPi));
  }
  return std::min(static_cast<double>(total), 1.0);
}

std::shared_ptr<const CircleFamily> circles_family(int kappa, const IndexSubset& subset,
                                                   const CircleGeometry& geometry) {
  subset.validate();
  if (subset.kappa != kappa) throw ValidationError("circles_family: kappa disagrees with subset");
  if (geometry.kappa() != kappa) {
    throw ValidationError("circles_family: geometry holds a different kappa");
  }
  std::vector<double> weights(geometry.centers.size(), 0.0);
  const double member_w = 1.0 / (3.0 * kappa);
  const double other_w = 2.0 / (3.0 * kappa);
  for (int i = 1; i <= 2 * kappa; ++i) {
    weights[i] = subset.members.count(i) ? member_w : other_w;
  }
  const std::pair<double, double> bounds{1.0 / (9.0 * kappa), 2.0 / (3.0 * kappa)};
  return std::make_shared<CircleFamily>(geometry, std::move(weights), bounds);
}

double exact_circle_ball_mass(const CircleFamily& dist, std::span<const double> center, double r) {
  return dist.exact_ball_mass(center, r);
}

std::shared_ptr<const CircleFamily> unit_circle() {
  CircleGeometry geometry = CircleGeometry::axis_layout(1);
  std::vector<double> weights(geometry.centers.size(), 0.0);
  weights[1] = 1.0;  // the data circle centered at the origin
  return std::make_shared<CircleFamily>(std::move(geometry), std::move(weights));
}

namespace {

double circle_set_distance(std::span<const double> x, std::span<const double> c) {
  const double dx = x[0] - c[0];
  const double dy = x[1] - c[1];
  const double a = std::hypot(dx, dy);
  double h2 = 0.0;
  for (std::size_t j = 2; j < c.size(); ++j) {
    const double dz = x[j] - c[j];
    h2 += dz * dz;
  }
  const double da = a - 1.0;
  return std::sqrt(da * da + h2);
}

std::vector<int> circle_occupancy(const PointSet& S, const CircleGeometry& geometry) {
  std::vector<int> occ(geometry.centers.size(), 0);
  for (std::size_t p = 0; p < S.size(); ++p) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < geometry.centers.size(); ++i) {
      const double d = circle_set_distance(S[p], geometry.centers[i]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    ++occ[best];
  }
  return occ;
}

}  // namespace

bool covers(const PointSet& S, const IndexSubset& subset, const CircleGeometry& geometry) {
  subset.validate();
  if (S.empty()) return false;
  if (S.dim() != geometry.centers.dim()) {
    throw ValidationError("covers: dimension mismatch with geometry");
  }
  const std::vector<int> occ = circle_occupancy(S, geometry);
  int singly_member = 0;
  int singly_other = 0;
  for (int i = 1; i <= 2 * subset.kappa; ++i) {
    if (occ[i] != 1) continue;
    if (subset.members.count(i)) {
      ++singly_member;
    } else {
      ++singly_other;
    }
  }
  return 8 * singly_member >= subset.kappa && 8 * singly_other >= subset.kappa;
}

std::shared_ptr<const CircleFamily> generative_A(const PointSet& S, const IndexSubset& subset,
                                                 double lambda, double epsilon,
                                                 const CircleGeometry& geometry, bool prime,
                                                 std::uint64_t seed) {
  subset.validate();
  const int kappa = subset.kappa;
  if (kappa % 8 != 0) throw ValidationError("generative_A: kappa must be divisible by 8");
  if (geometry.kappa() != kappa) {
    throw ValidationError("generative_A: geometry holds a different kappa");
  }

  const IndexSubset effective = prime ? subset.complement() : subset;
  std::vector<double> weights(geometry.centers.size(), 0.0);

  if (!covers(S, effective, geometry)) {
    weights[0] = 1.0;
    return std::make_shared<CircleFamily>(geometry, std::move(weights));
  }

  const std::vector<int> occ = circle_occupancy(S, geometry);
  std::vector<int> singly;
  for (int i : effective.members) {
    if (occ[i] == 1) singly.push_back(i);
  }
  std::sort(singly.begin(), singly.end());

  const int pick = kappa / 8;
  RandomStream rng(seed);
  for (int i = 0; i < pick; ++i) {
    const std::size_t j = i + rng.index(singly.size() - i);
    std::swap(singly[i], singly[j]);
  }

  const double member_w = lambda * (1.0 + epsilon) * (1.0 / (3.0 * kappa));
  for (int i = 0; i < pick; ++i) weights[singly[i]] = member_w;
  weights[0] = 1.0 - lambda * (1.0 + epsilon) / 24.0;
  return std::make_shared<CircleFamily>(geometry, std::move(weights));
}

double exact_cr_oracle(const AnalyticDistribution& q, const AnalyticDistribution& p,
                       const PointSet& S, double lambda, double gamma,
                       int radius_grid_density) {
  if (!q.has_exact_ball_mass() || !p.has_exact_ball_mass()) {
    throw ValidationError("exact_cr_oracle: both distributions need an exact ball-mass oracle");
  }
  if (!(lambda > 1.0)) throw ValidationError("exact_cr_oracle: lambda must exceed 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("exact_cr_oracle: gamma must be in (0, 1)");
  if (radius_grid_density < 2) throw ValidationError("exact_cr_oracle: grid density too small");
  if (S.empty()) return 0.0;

  const auto* q_circles = dynamic_cast<const CircleFamily*>(&q);
  const auto* p_circles = dynamic_cast<const CircleFamily*>(&p);
  const auto* q_atoms = dynamic_cast<const PointAtoms*>(&q);
  const auto* p_atoms = dynamic_cast<const PointAtoms*>(&p);

  // Structural radii per training point: the mass functions only change
  // slope where a ball first touches or fully swallows a circle (or crosses
  // an atom), so those radii are evaluated exactly alongside the grid.
  auto structural_radii = [&](std::span<const double> x, std::vector<double>& out) {
    out.clear();
    for (const auto* fam : {q_circles, p_circles}) {
      if (!fam) continue;
      const auto& centers = fam->geometry().centers;
      for (std::size_t i = 0; i < centers.size(); ++i) {
        auto c = centers[i];
        const double dx = x[0] - c[0];
        const double dy = x[1] - c[1];
        const double a = std::hypot(dx, dy);
        double h2 = 0.0;
        for (std::size_t j = 2; j < c.size(); ++j) {
          const double dz = x[j] - c[j];
          h2 += dz * dz;
        }
        const double near = std::sqrt((a - 1.0) * (a - 1.0) + h2);
        const double far = std::sqrt((a + 1.0) * (a + 1.0) + h2);
        out.push_back(near);
        out.push_back(far);
        // Circles keep set distance >= 3, so far + 1/2 still meets the same
        // circles as far does; it lands strictly inside the flat zone where
        // the swallow is complete.
        out.push_back(far + 0.5);
      }
    }
    for (const auto* atoms : {q_atoms, p_atoms}) {
      if (!atoms) continue;
      for (std::size_t i = 0; i < atoms->points().size(); ++i) {
        out.push_back(distance(atoms->points()[i], x));
      }
    }
  };

  std::vector<Ball> balls;
  balls.reserve(S.size());
  std::vector<double> candidates;
  for (std::size_t s = 0; s < S.size(); ++s) {
    auto x = S[s];
    structural_radii(x, candidates);
    double r_cap = 0.0;
    for (double r : candidates) r_cap = std::max(r_cap, r);
    if (r_cap <= 0.0) r_cap = 1.0;
    for (int g = 0; g < radius_grid_density; ++g) {
      candidates.push_back(r_cap * static_cast<double>(g) /
                           static_cast<double>(radius_grid_density - 1));
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    double best = 0.0;
    for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
      const double r = *it;
      if (r < 0.0) continue;
      const double pm = p.exact_ball_mass(x, r);
      if (pm > gamma) continue;
      const double qm = q.exact_ball_mass(x, r);
      if (qm >= lambda * pm) {
        best = r;
        break;
      }
    }
    balls.push_back(Ball{Point(x.begin(), x.end()), best});
  }

  if (q_circles) return q_circles->union_mass(balls);
  if (q_atoms) {
    long double mass = 0.0L;
    const auto& pts = q_atoms->points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (union_membership(balls, pts[i])) mass += q_atoms->atom_weight(i);
    }
    return std::min(static_cast<double>(mass), 1.0);
  }
  // Dense Monte Carlo fallback for exotic exact-mass distributions.
  constexpr std::size_t kMcDraws = 1000000;
  RandomStream rng(0x9E3779B97F4A7C15ull);
  std::vector<double> buf(q.dim());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < kMcDraws; ++i) {
    q.sample_one(rng, buf);
    if (union_membership(balls, buf)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(kMcDraws);
}

}  // namespace datacopy
