#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "datacopy/geometry.hpp"
#include "datacopy/rng.hpp"
#include "datacopy/sampler.hpp"

namespace datacopy {

// Synthetic distribution offering sampling and, where the geometry allows,
// an exact ball-mass function.
class AnalyticDistribution {
 public:
  virtual ~AnalyticDistribution() = default;

  virtual int dim() const = 0;
  virtual void sample_one(RandomStream& rng, std::span<double> out) const = 0;
  virtual std::string id() const = 0;

  virtual bool has_exact_ball_mass() const { return false; }
  virtual double exact_ball_mass(std::span<const double> center, double r) const;

  virtual std::optional<std::pair<double, double>> p_epsilon_bounds() const { return {}; }

  PointSet sample(std::size_t n, RandomStream& rng) const;
  PointSet sample(std::size_t n, std::uint64_t seed) const;
};

// ---------------------------------------------------------------------------
// Halfmoons: two interleaving unit half-circles with Gaussian noise. Each
// point is (cos t, sin t) or (1 - cos t, 1/2 - sin t), t uniform on [0, pi],
// plus independent N(0, sigma^2) per coordinate.
class Halfmoons final : public AnalyticDistribution {
 public:
  explicit Halfmoons(double sigma);
  int dim() const override { return 2; }
  void sample_one(RandomStream& rng, std::span<double> out) const override;
  std::string id() const override;
  double sigma() const { return sigma_; }

 private:
  double sigma_;
};

PointSet sample_halfmoons(std::size_t n, double sigma, std::uint64_t seed);

// ---------------------------------------------------------------------------
// base + uniform noise from a closed ball of the given radius.
class DiskNoise final : public AnalyticDistribution {
 public:
  DiskNoise(std::shared_ptr<const AnalyticDistribution> base, double radius);
  int dim() const override { return base_->dim(); }
  void sample_one(RandomStream& rng, std::span<double> out) const override;
  std::string id() const override;

 private:
  std::shared_ptr<const AnalyticDistribution> base_;
  double radius_;
};

// ---------------------------------------------------------------------------
// Weighted atoms on a finite point list. Ball masses are exact.
class PointAtoms final : public AnalyticDistribution {
 public:
  // Empty weights means uniform.
  PointAtoms(PointSet points, std::vector<double> weights = {});
  int dim() const override { return points_.dim(); }
  void sample_one(RandomStream& rng, std::span<double> out) const override;
  std::string id() const override;
  bool has_exact_ball_mass() const override { return true; }
  double exact_ball_mass(std::span<const double> center, double r) const override;
  const PointSet& points() const { return points_; }
  double atom_weight(std::size_t i) const {
    return weights_.empty() ? 1.0 / static_cast<double>(points_.size()) : weights_[i];
  }

 private:
  PointSet points_;
  std::vector<double> weights_;  // normalized
};

// ---------------------------------------------------------------------------
// rho * (atoms over a fixed subset S' + small disk noise)
//   + (1 - rho) * (base + large disk noise).
class CopierMixture final : public AnalyticDistribution {
 public:
  CopierMixture(double rho, std::shared_ptr<const AnalyticDistribution> copy_component,
                std::shared_ptr<const AnalyticDistribution> underfit_component);
  int dim() const override { return copy_->dim(); }
  void sample_one(RandomStream& rng, std::span<double> out) const override;
  std::string id() const override;

 private:
  double rho_;
  std::shared_ptr<const AnalyticDistribution> copy_;
  std::shared_ptr<const AnalyticDistribution> underfit_;
};

// Fixes a seeded subset S' of S with |S'| = copy_count, then mixes
// (atoms on S' + copy_noise disk) with (base + underfit_noise disk).
// The returned sampler's draw stream is seeded by the same seed.
std::unique_ptr<SamplerOracle> make_copier_mixture(
    const PointSet& S, double rho, std::size_t copy_count, double copy_noise,
    double underfit_noise, std::shared_ptr<const AnalyticDistribution> base,
    std::uint64_t seed);

std::shared_ptr<const CopierMixture> make_copier_mixture_distribution(
    const PointSet& S, double rho, std::size_t copy_count, double copy_noise,
    double underfit_noise, std::shared_ptr<const AnalyticDistribution> base,
    std::uint64_t selection_seed);

// ---------------------------------------------------------------------------
enum class Kernel { gaussian, uniform_ball };

const char* kernel_name(Kernel k);

// KDE as a convolution sampler: a uniform training point plus sigma times a
// unit kernel draw.
class KdeDistribution final : public AnalyticDistribution {
 public:
  KdeDistribution(PointSet S, double sigma, Kernel kernel);
  int dim() const override { return S_.dim(); }
  void sample_one(RandomStream& rng, std::span<double> out) const override;
  std::string id() const override;

 private:
  PointSet S_;
  double sigma_;
  Kernel kernel_;
};

std::unique_ptr<SamplerOracle> kde_sampler(const PointSet& S, double sigma, Kernel kernel,
                                           std::uint64_t seed);

// ---------------------------------------------------------------------------
// Uniform distribution over [0, side]^d.
class UniformCube final : public AnalyticDistribution {
 public:
  UniformCube(double side, int dim);
  int dim() const override { return dim_; }
  void sample_one(RandomStream& rng, std::span<double> out) const override;
  std::string id() const override;
  double side() const { return side_; }

 private:
  double side_;
  int dim_;
};

// Volume of the unit ball in d dimensions.
double unit_ball_volume(int d);

// Radius R with half the kernel's mass inside ||x|| <= R. For the uniform
// ball kernel R = 2^(-1/d); for the Gaussian kernel R is the median of the
// chi distribution with d degrees of freedom.
double kernel_median_radius(Kernel kernel, int d);

struct CubeKdeFixture {
  std::shared_ptr<const UniformCube> pi;
  double side;                  // D
  double kernel_median_radius;  // R actually used
};

// Cube construction on which a bandwidth-sigma KDE provably over-concentrates:
// D = R sigma (max(2 n lambda, 1/gamma) omega_d)^(1/d).
CubeKdeFixture uniform_cube_kde_fixture(long long n, double lambda, double gamma, double sigma,
                                        int d, Kernel kernel,
                                        std::optional<double> median_radius_override = {});

// ---------------------------------------------------------------------------
// Circle-family fixtures: disjoint coplanar unit circles, uniform on each
// circle, with exact arc masses.

// centers[0] is the faraway default circle C_0; centers[1..2k] are the data
// circles. All circles are unit radius and lie in the plane of the first two
// coordinates through their centers.
struct CircleGeometry {
  PointSet centers;

  int kappa() const { return static_cast<int>((centers.size() - 1) / 2); }
  // Enforces: pairwise set distance >= 3 between data circles, and C_0 at
  // set distance >= 2 + the largest pairwise point distance of data circles.
  void validate() const;

  // Data circles 5 apart on the first axis, C_0 placed beyond the required
  // clearance on the negative side.
  static CircleGeometry axis_layout(int kappa, int dim = 2);
};

// kappa member indices within {1..2kappa}.
struct IndexSubset {
  int kappa = 0;
  std::set<int> members;

  void validate() const;
  IndexSubset complement() const;
  static IndexSubset first_half(int kappa);
  static IndexSubset random(int kappa, std::uint64_t seed);
};

class CircleFamily final : public AnalyticDistribution {
 public:
  // weights[i] is the mass of circle centers[i]; they must sum to 1.
  CircleFamily(CircleGeometry geometry, std::vector<double> weights,
               std::optional<std::pair<double, double>> p_eps_bounds = {});

  int dim() const override { return geometry_.centers.dim(); }
  void sample_one(RandomStream& rng, std::span<double> out) const override;
  std::string id() const override;
  bool has_exact_ball_mass() const override { return true; }
  double exact_ball_mass(std::span<const double> center, double r) const override;
  std::optional<std::pair<double, double>> p_epsilon_bounds() const override { return p_eps_; }

  const CircleGeometry& geometry() const { return geometry_; }
  double circle_weight(std::size_t i) const { return weights_[i]; }
  std::size_t circle_count() const { return weights_.size(); }

  // Fraction of circle i inside the closed ball, in [0, 1]; exact chord
  // geometry.
  double arc_fraction(std::size_t i, std::span<const double> center, double r) const;

  // Exact q-mass of a union of balls: per circle, merged arc intervals.
  double union_mass(std::span<const Ball> balls) const;

 private:
  CircleGeometry geometry_;
  std::vector<double> weights_;
  std::optional<std::pair<double, double>> p_eps_;
};

// p_T: mass 1/(3 kappa) on member circles, 2/(3 kappa) on the rest, zero on
// C_0; carries the regularity bounds (1/(9 kappa), 2/(3 kappa)).
std::shared_ptr<const CircleFamily> circles_family(int kappa, const IndexSubset& subset,
                                                   const CircleGeometry& geometry);

// Uniform distribution on the unit circle about the origin (a circle family
// with all mass on one circle).
std::shared_ptr<const CircleFamily> unit_circle();

double exact_circle_ball_mass(const CircleFamily& dist, std::span<const double> center, double r);

// True iff at least kappa/8 member circles and kappa/8 non-member circles
// hold exactly one point of S each. Points are assigned to nearest circles.
bool covers(const PointSet& S, const IndexSubset& subset, const CircleGeometry& geometry);

// The adversarial generator: on covering S picks kappa/8 singly-occupied
// member circles (complement first when prime is set) and concentrates mass
// lambda (1+eps) / (3 kappa) on each, the rest on C_0. Non-covering S yields
// the uniform distribution over C_0.
std::shared_ptr<const CircleFamily> generative_A(const PointSet& S, const IndexSubset& subset,
                                                 double lambda, double epsilon,
                                                 const CircleGeometry& geometry, bool prime,
                                                 std::uint64_t seed);

// Ground-truth copy rate from exact ball masses: for each training point,
// scans a dense radius grid plus the structural radii (nearest/farthest
// point of every circle, atom distances) for the largest radius satisfying
// q(B) >= lambda p(B) and p(B) <= gamma, then measures the union under q
// exactly. A grid approximation converging from below as density grows.
double exact_cr_oracle(const AnalyticDistribution& q, const AnalyticDistribution& p,
                       const PointSet& S, double lambda, double gamma,
                       int radius_grid_density);

}  // namespace datacopy
