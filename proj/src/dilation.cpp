#include "aniso/dilation.hpp"

#include <algorithm>
#include <cmath>

#include "aniso/errors.hpp"

namespace aniso {

namespace {

constexpr int kPowCache = 96;
constexpr int kSearchCap = 200;

double unit_ball_volume(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return M_PI;
    case 3: return 4.0 * M_PI / 3.0;
    default: throw Error(ErrorCode::kConfigError, "dimension must be 1, 2 or 3");
  }
}

}  // namespace

SpectrumInfo spectrum(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() < 1 || a.rows() > 3) {
    throw Error(ErrorCode::kConfigError, "matrix must be square with n in {1,2,3}");
  }
  const double det = det_small(a);
  if (std::abs(det) < 1e-12) {
    throw Error(ErrorCode::kSingularMatrix, "|det A| < 1e-12");
  }
  SpectrumInfo info;
  info.moduli = eigen_moduli(a);
  info.abs_det = std::abs(det);
  if (info.moduli.front() <= 1.0 + 1e-12) {
    throw Error(ErrorCode::kNotExpansive,
                "smallest eigenvalue modulus " + std::to_string(info.moduli.front()) +
                    " is not > 1");
  }
  return info;
}

std::shared_ptr<const DilationStructure> DilationStructure::make(const Matrix& a,
                                                                 const DilationOptions& opts) {
  const SpectrumInfo spec = spectrum(a);

  auto d = std::shared_ptr<DilationStructure>(new DilationStructure());
  d->n_ = static_cast<int>(a.rows());
  d->a_ = a;
  d->a_inv_ = inverse_small(a);
  d->b_ = spec.abs_det;
  d->eig_min_ = spec.moduli.front();
  d->eig_max_ = spec.moduli.back();
  d->opts_ = opts;

  double lm = opts.lambda_minus.value_or((1.0 - 1e-3) * d->eig_min_);
  if (lm <= 1.0) lm = std::sqrt(d->eig_min_);  // eig_min barely above 1
  double lp = opts.lambda_plus.value_or((1.0 + 1e-3) * d->eig_max_);
  if (!(lm > 1.0) || lm > d->eig_min_ + 1e-12 || lp < d->eig_max_ - 1e-12) {
    throw Error(ErrorCode::kConfigError,
                "lambda bounds must satisfy 1 < lambda_- <= min|sigma| <= max|sigma| <= lambda_+");
  }
  d->lambda_minus_ = lm;
  d->lambda_plus_ = lp;

  // P = sum_j rho0^(2j) (A^-j)^T A^-j converges geometrically because
  // rho0 < lambda_- <= min |sigma(A)|.
  const double rho0 = (1.0 + lm) / 2.0;
  const int depth = std::max(opts.series_depth, 8);
  Matrix p = Matrix::Identity(d->n_, d->n_);
  Matrix m = Matrix::Identity(d->n_, d->n_);
  double w = 1.0;
  for (int j = 1; j <= depth; ++j) {
    m = d->a_inv_ * m;
    w *= rho0 * rho0;
    p += w * (m.transpose() * m);
  }
  p = 0.5 * (p + p.transpose());
  p /= std::pow(det_small(p), 1.0 / d->n_);  // det P = 1

  d->shape_.form = p;
  d->shape_.level = std::pow(unit_ball_volume(d->n_), -2.0 / d->n_);

  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(
      d->a_inv_.transpose() * p * d->a_inv_, p, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  const double mu_max = ges.eigenvalues().maxCoeff();
  if (!(mu_max > 0.0) || !std::isfinite(mu_max)) {
    throw Error(ErrorCode::kConstructionFailed, "generalized eigenvalue solve failed");
  }
  d->r_ = 1.0 / std::sqrt(mu_max);
  if (d->r_ <= 1.0 + 1e-6) {
    throw Error(ErrorCode::kConstructionFailed,
                "no expansion factor r > 1 found (r = " + std::to_string(d->r_) + ")");
  }
  d->tau_ = static_cast<int>(std::ceil(std::log(2.0) / std::log(d->r_) - 1e-9));

  Eigen::SelfAdjointEigenSolver<Matrix> pe(p);
  d->seed_scale_ = std::sqrt(d->shape_.level / pe.eigenvalues().maxCoeff());

  d->pow_pos_.reserve(kPowCache + 1);
  d->pow_neg_.reserve(kPowCache + 1);
  d->pow_pos_.push_back(Matrix::Identity(d->n_, d->n_));
  d->pow_neg_.push_back(Matrix::Identity(d->n_, d->n_));
  for (int j = 1; j <= kPowCache; ++j) {
    d->pow_pos_.push_back(d->a_ * d->pow_pos_.back());
    d->pow_neg_.push_back(d->a_inv_ * d->pow_neg_.back());
  }
  return d;
}

std::shared_ptr<const DilationStructure> DilationStructure::adjoint() const {
  std::call_once(adjoint_once_, [this] {
    DilationOptions opts = opts_;
    adjoint_cache_ = DilationStructure::make(a_.transpose(), opts);
  });
  return adjoint_cache_;
}

Vector DilationStructure::apply_power(const Vector& x, int k) const {
  const auto& cache = (k >= 0) ? pow_pos_ : pow_neg_;
  const int mag = std::abs(k);
  if (mag <= kPowCache) return cache[mag] * x;
  Vector y = cache[kPowCache] * x;
  const Matrix& step = (k >= 0) ? a_ : a_inv_;
  for (int j = kPowCache; j < mag; ++j) y = step * y;
  return y;
}

double DilationStructure::ellipsoid_quadratic(const Vector& x) const {
  return x.dot(shape_.form * x) / shape_.level;
}

bool DilationStructure::in_ball(const Vector& x, int i) const {
  return ellipsoid_quadratic(apply_power(x, -i)) < 1.0;
}

int DilationStructure::shell_index(const Vector& x) const {
  // minimal j with x in B_j, minus one; membership is monotone in j
  int probe = 0;
  const double nx = x.norm();
  if (nx > 0.0 && seed_scale_ > 0.0) {
    const double est = n_ * std::log(nx / seed_scale_) / std::log(b_);
    if (std::isfinite(est)) {
      probe = static_cast<int>(std::ceil(est));
      probe = std::clamp(probe, -(kSearchCap * 16), kSearchCap * 16);
    }
  }
  int lo, hi;
  if (in_ball(x, probe)) {
    hi = probe;
    int step = 1;
    lo = probe - 1;
    int guard = 0;
    while (in_ball(x, lo)) {
      hi = lo;
      lo -= step;
      step *= 2;
      if (++guard > kSearchCap) {
        throw Error(ErrorCode::kIndexSearchOverflow, "shell search exceeded step cap");
      }
    }
  } else {
    lo = probe;
    int step = 1;
    hi = probe + 1;
    int guard = 0;
    while (!in_ball(x, hi)) {
      lo = hi;
      hi += step;
      step *= 2;
      if (++guard > kSearchCap) {
        throw Error(ErrorCode::kIndexSearchOverflow, "shell search exceeded step cap");
      }
    }
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (in_ball(x, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi - 1;
}

double DilationStructure::quasi_norm(const Vector& x) const {
  if (x.isZero(0.0)) return 0.0;
  return power_int(b_, shell_index(x));
}

double DilationStructure::ball_bounding_radius(int i) const {
  // max |A^i y| over y^T P y <= c equals sqrt(c * lambda_max(A^i P^-1 (A^i)^T))
  const Matrix ai = (i >= 0) ? pow_pos_[std::min(i, kPowCache)] : pow_neg_[std::min(-i, kPowCache)];
  Matrix full = ai;
  for (int j = kPowCache; j < std::abs(i); ++j) full = ((i >= 0) ? a_ : a_inv_) * full;
  const Matrix pinv = inverse_small(shape_.form);
  Eigen::SelfAdjointEigenSolver<Matrix> es(full * pinv * full.transpose());
  return std::sqrt(shape_.level * es.eigenvalues().maxCoeff());
}

Vector DilationStructure::ball_bounding_box(int i) const {
  // B_i = {x : x^T Q x < c} with Q = (A^-i)^T P A^-i; half-width_d = sqrt(c (Q^-1)_dd)
  Matrix ainv_i = Matrix::Identity(n_, n_);
  const Matrix& step = (i >= 0) ? a_inv_ : a_;
  for (int j = 0; j < std::abs(i); ++j) ainv_i = step * ainv_i;
  const Matrix q = ainv_i.transpose() * shape_.form * ainv_i;
  const Matrix qinv = inverse_small(q);
  Vector half(n_);
  for (int k = 0; k < n_; ++k) half(k) = std::sqrt(shape_.level * qinv(k, k));
  return half;
}

double DilationStructure::boundary_radius(const Vector& direction, int i) const {
  const Vector u = apply_power(direction, -i);
  const double quad = u.dot(shape_.form * u);
  if (quad <= 0.0) throw Error(ErrorCode::kConfigError, "degenerate direction");
  return std::sqrt(shape_.level / quad);
}

ComparabilityBand comparability_band(const DilationStructure& d,
                                     std::span<const Vector> samples) {
  ComparabilityBand band;
  const double logb = std::log(d.det_factor());
  band.exp_minus = std::log(d.lambda_minus()) / logb;
  band.exp_plus = std::log(d.lambda_plus()) / logb;

  auto update = [](RegimeBand& rb, double low_ratio, double high_ratio) {
    if (rb.count == 0) {
      rb.c_low = low_ratio;
      rb.c_high = high_ratio;
    } else {
      rb.c_low = std::min(rb.c_low, low_ratio);
      rb.c_high = std::max(rb.c_high, high_ratio);
    }
    ++rb.count;
  };

  for (const Vector& x : samples) {
    const double rho = d.quasi_norm(x);
    if (rho <= 0.0) continue;  // precondition excludes the origin
    const double nx = x.norm();
    if (rho > 1.0) {
      update(band.large_rho, nx / std::pow(rho, band.exp_minus),
             nx / std::pow(rho, band.exp_plus));
    } else {
      update(band.small_rho, nx / std::pow(rho, band.exp_plus),
             nx / std::pow(rho, band.exp_minus));
    }
  }
  if (band.small_rho.count == 0) {
    throw Error(ErrorCode::kEmptyRegime, "no samples with rho(x) <= 1");
  }
  if (band.large_rho.count == 0) {
    throw Error(ErrorCode::kEmptyRegime, "no samples with rho(x) > 1");
  }
  return band;
}

}  // namespace aniso
