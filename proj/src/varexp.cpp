#include "aniso/varexp.hpp"

#include <algorithm>
#include <cmath>

#include "aniso/errors.hpp"

namespace aniso {

ExponentFunction ExponentFunction::constant(double p0) {
  if (!(p0 > 0.0) || p0 > 1.0) {
    throw Error(ErrorCode::kConfigError, "constant exponent must lie in (0, 1]");
  }
  ExponentFunction p;
  p.family_ = Family::kConstant;
  p.p_minus_ = p.p_plus_ = p.p_inf_ = p0;
  return p;
}

ExponentFunction ExponentFunction::log_perturbed(double p_inf, double amplitude,
                                                 DilationPtr geometry) {
  if (!geometry) throw Error(ErrorCode::kConfigError, "log_perturbed needs a dilation");
  if (!(p_inf > 0.0) || p_inf > 1.0) {
    throw Error(ErrorCode::kConfigError, "p_inf must lie in (0, 1]");
  }
  if (p_inf + amplitude <= 0.0) {
    throw Error(ErrorCode::kConfigError, "amplitude drives the exponent to 0");
  }
  ExponentFunction p;
  p.family_ = Family::kLogPerturbed;
  p.p_inf_ = p_inf;
  p.amplitude_ = amplitude;
  p.geometry_ = std::move(geometry);
  // extremes after the upper clamp at 1: the raw range is the interval
  // between p_inf (tail) and p_inf + amplitude (small rho)
  if (amplitude >= 0.0) {
    p.p_minus_ = std::min(p_inf, 1.0);
    p.p_plus_ = std::min(p_inf + amplitude, 1.0);
  } else {
    p.p_minus_ = p_inf + amplitude;
    p.p_plus_ = std::min(p_inf, 1.0);
  }
  return p;
}

ExponentFunction ExponentFunction::piecewise_test(std::vector<Piece> pieces, double background) {
  if (!(background > 0.0)) {
    throw Error(ErrorCode::kConfigError, "background exponent must be positive");
  }
  ExponentFunction p;
  p.family_ = Family::kPiecewiseTest;
  p.background_ = background;
  p.p_inf_ = background;
  p.p_minus_ = background;
  p.p_plus_ = background;
  for (const Piece& piece : pieces) {
    if (!(piece.value > 0.0)) {
      throw Error(ErrorCode::kConfigError, "piece exponent must be positive");
    }
    p.p_minus_ = std::min(p.p_minus_, piece.value);
    p.p_plus_ = std::max(p.p_plus_, piece.value);
  }
  p.pieces_ = std::move(pieces);
  return p;
}

double ExponentFunction::operator()(const Vector& x) const {
  switch (family_) {
    case Family::kConstant:
      return p_inf_;
    case Family::kLogPerturbed: {
      const double rho = geometry_->quasi_norm(x);
      const double raw = p_inf_ + amplitude_ / std::log(M_E + rho);
      return std::min(raw, 1.0);
    }
    case Family::kPiecewiseTest: {
      for (const Piece& piece : pieces_) {
        bool inside = true;
        for (int d = 0; d < x.size(); ++d) {
          if (x(d) < piece.lo(d) || x(d) >= piece.hi(d)) {
            inside = false;
            break;
          }
        }
        if (inside) return piece.value;
      }
      return background_;
    }
  }
  return p_inf_;
}

std::vector<double> exponent_table(const ExponentFunction& p, const GridSpec& grid) {
  std::vector<double> table(static_cast<size_t>(grid.size()));
  Vector x(grid.dimension);
  for (std::int64_t flat = 0; flat < grid.size(); ++flat) {
    SampledFunction::decode_node(grid, flat, x);
    table[static_cast<size_t>(flat)] = p(x);
  }
  return table;
}

double modular_scaled(const SampledFunction& f, std::span<const double> p_table, double lam) {
  const auto& vals = f.values();
  const double inv = 1.0 / lam;
  const double total = pairwise_reduce<double>(
      0, static_cast<std::int64_t>(vals.size()), [&](std::int64_t i) {
        const double a = std::abs(vals[static_cast<size_t>(i)]);
        if (a == 0.0) return 0.0;
        return std::pow(a * inv, p_table[static_cast<size_t>(i)]);
      });
  return f.cell_volume() * total;
}

double modular(const ExponentFunction& p, const SampledFunction& f) {
  const std::vector<double> table = exponent_table(p, f.grid());
  return modular_scaled(f, table, 1.0);
}

double luxemburg_norm_with_table(const SampledFunction& f, std::span<const double> p_table) {
  if (f.is_zero()) return 0.0;
  const double limit = std::ldexp(1.0, 120);

  double lam = 1.0;
  double lo, hi;
  if (modular_scaled(f, p_table, lam) <= 1.0) {
    // shrink until the modular exceeds 1; the norm sits in [lam/2, lam]
    while (modular_scaled(f, p_table, lam / 2.0) <= 1.0) {
      lam /= 2.0;
      if (lam < 1.0 / limit) {
        throw Error(ErrorCode::kBracketFailure, "modular stays below 1 at tiny scales");
      }
    }
    lo = lam / 2.0;
    hi = lam;
  } else {
    while (modular_scaled(f, p_table, lam) > 1.0) {
      lam *= 2.0;
      if (lam > limit) {
        throw Error(ErrorCode::kBracketFailure, "modular never drops below 1");
      }
    }
    lo = lam / 2.0;
    hi = lam;
  }
  for (int it = 0; it < 80 && (hi - lo) > 1e-8 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (modular_scaled(f, p_table, mid) <= 1.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double luxemburg_norm(const ExponentFunction& p, const SampledFunction& f) {
  const std::vector<double> table = exponent_table(p, f.grid());
  return luxemburg_norm_with_table(f, table);
}

double indicator_norm(const ExponentFunction& p, const DilationStructure& d, const Ball& ball,
                      const GridSpec& grid) {
  const Vector half = d.ball_bounding_box(ball.scale);
  for (int k = 0; k < d.dimension(); ++k) {
    if (std::abs(ball.center(k)) + half(k) > grid.half_width) {
      throw Error(ErrorCode::kConfigError, "indicator_norm: ball not covered by grid");
    }
  }
  return luxemburg_norm(p, rasterize_ball(d, ball, grid));
}

LogHolderDiagnostics log_holder_check(const ExponentFunction& p, const DilationStructure& d,
                                      std::span<const Vector> samples) {
  LogHolderDiagnostics diag;
  diag.p_inf = p.p_infinity();
  diag.conforming = p.log_holder_conforming();
  for (size_t i = 0; i + 1 < samples.size(); i += 2) {
    const Vector& x = samples[i];
    const Vector& y = samples[i + 1];
    const Vector diff = x - y;
    if (diff.isZero(0.0)) continue;
    const double gap = std::abs(p(x) - p(y));
    diag.c_log_empirical =
        std::max(diag.c_log_empirical, gap * std::log(M_E + 1.0 / d.quasi_norm(diff)));
    ++diag.pair_count;
  }
  for (const Vector& x : samples) {
    const double decay = std::abs(p(x) - diag.p_inf) * std::log(M_E + d.quasi_norm(x));
    diag.c_inf_empirical = std::max(diag.c_inf_empirical, decay);
  }
  return diag;
}

}  // namespace aniso
