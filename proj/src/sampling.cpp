#include "aniso/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "aniso/errors.hpp"

namespace aniso {

namespace {

void check_grid(const GridSpec& g) {
  if (g.dimension < 1 || g.dimension > 3) {
    throw Error(ErrorCode::kConfigError, "grid dimension must be 1, 2 or 3");
  }
  if (g.resolution < 2 || g.half_width <= 0.0) {
    throw Error(ErrorCode::kConfigError, "grid needs resolution >= 2 and positive box");
  }
}

void flat_to_multi(const GridSpec& g, std::int64_t flat, std::array<int, 3>& idx) {
  for (int d = g.dimension - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(flat % g.resolution);
    flat /= g.resolution;
  }
}

std::int64_t multi_to_flat(const GridSpec& g, const std::array<int, 3>& idx) {
  std::int64_t flat = 0;
  for (int d = 0; d < g.dimension; ++d) flat = flat * g.resolution + idx[d];
  return flat;
}

}  // namespace

SampledFunction::SampledFunction(GridSpec grid, std::vector<Complex> values,
                                 std::optional<Ball> support_hint)
    : grid_(grid), values_(std::move(values)), hint_(std::move(support_hint)) {
  check_grid(grid_);
  if (static_cast<std::int64_t>(values_.size()) != grid_.size()) {
    throw Error(ErrorCode::kGridMismatch, "value count does not match grid size");
  }
}

SampledFunction SampledFunction::zeros(const GridSpec& grid) {
  return SampledFunction(grid, std::vector<Complex>(static_cast<size_t>(grid.size())));
}

void SampledFunction::decode_node(const GridSpec& grid, std::int64_t flat, Vector& out) {
  std::array<int, 3> idx{};
  flat_to_multi(grid, flat, idx);
  for (int d = 0; d < grid.dimension; ++d) out(d) = grid.axis_node(idx[d]);
}

Vector SampledFunction::node(std::int64_t flat) const {
  Vector x(grid_.dimension);
  decode_node(grid_, flat, x);
  return x;
}

double SampledFunction::cell_volume() const {
  double hn = 1.0;
  for (int d = 0; d < grid_.dimension; ++d) hn *= grid_.spacing();
  return hn;
}

Complex SampledFunction::integrate() const {
  const Complex acc = pairwise_reduce<Complex>(
      0, static_cast<std::int64_t>(values_.size()),
      [&](std::int64_t i) { return values_[static_cast<size_t>(i)]; });
  return cell_volume() * acc;
}

Complex SampledFunction::interpolate(const Vector& x) const {
  const int n = grid_.dimension;
  const double h = grid_.spacing();
  const int m = grid_.resolution;
  std::array<int, 3> base{};
  std::array<double, 3> frac{};
  for (int d = 0; d < n; ++d) {
    double u = (x(d) + grid_.half_width) / h - 0.5;
    // node-coincident queries reproduce node values exactly
    const double snapped = std::round(u);
    if (std::abs(u - snapped) <= 1e-9) u = snapped;
    const double fl = std::floor(u);
    base[d] = static_cast<int>(fl);
    frac[d] = u - fl;
    if (base[d] < -1 || base[d] > m - 1) return Complex(0.0);
  }
  Complex acc(0.0);
  const int corners = 1 << n;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::array<int, 3> idx{};
    bool inside = true;
    for (int d = 0; d < n; ++d) {
      const int bit = (c >> d) & 1;
      idx[d] = base[d] + bit;
      w *= bit ? frac[d] : (1.0 - frac[d]);
      if (idx[d] < 0 || idx[d] >= m) inside = false;
    }
    if (!inside || w == 0.0) continue;
    acc += w * values_[static_cast<size_t>(multi_to_flat(grid_, idx))];
  }
  return acc;
}

double SampledFunction::max_abs() const {
  double mx = 0.0;
  for (const Complex& v : values_) mx = std::max(mx, std::abs(v));
  return mx;
}

bool SampledFunction::is_zero() const {
  for (const Complex& v : values_) {
    if (v != Complex(0.0)) return false;
  }
  return true;
}

IndexBox SampledFunction::support_box() const {
  const int n = grid_.dimension;
  const int m = grid_.resolution;
  IndexBox box;
  for (int d = 0; d < n; ++d) {
    box.lo[d] = m;
    box.hi[d] = 0;
  }
  std::array<int, 3> idx{};
  bool any = false;
  for (std::int64_t flat = 0; flat < static_cast<std::int64_t>(values_.size()); ++flat) {
    if (values_[static_cast<size_t>(flat)] == Complex(0.0)) continue;
    any = true;
    flat_to_multi(grid_, flat, idx);
    for (int d = 0; d < n; ++d) {
      box.lo[d] = std::min(box.lo[d], idx[d]);
      box.hi[d] = std::max(box.hi[d], idx[d] + 1);
    }
  }
  if (!any) {
    for (int d = 0; d < n; ++d) box.lo[d] = box.hi[d] = 0;
  }
  return box;
}

SampledFunction& SampledFunction::scale(Complex factor) {
  for (Complex& v : values_) v *= factor;
  return *this;
}

double dft_alias_guard(const GridSpec& grid) {
  // Nyquist 1/(2h) with a 0.5 safety factor
  return 0.25 / grid.spacing();
}

bool dft_alias_risk(const GridSpec& grid, const Vector& xi) {
  return xi.norm() > dft_alias_guard(grid);
}

Complex dft_at(const SampledFunction& f, const Vector& xi) {
  const GridSpec& g = f.grid();
  const int n = g.dimension;
  const int m = g.resolution;
  const double hn = f.cell_volume();

  // per-axis phase tables e^{-2 pi i node_d * xi_d}
  std::array<std::vector<Complex>, 3> phase;
  for (int d = 0; d < n; ++d) {
    phase[d].resize(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) {
      const double ang = -2.0 * M_PI * g.axis_node(j) * xi(d);
      phase[d][static_cast<size_t>(j)] = Complex(std::cos(ang), std::sin(ang));
    }
  }

  const IndexBox box = f.support_box();
  const auto& vals = f.values();
  Complex total(0.0);
  if (n == 1) {
    for (int j0 = box.lo[0]; j0 < box.hi[0]; ++j0) {
      total += vals[static_cast<size_t>(j0)] * phase[0][static_cast<size_t>(j0)];
    }
  } else if (n == 2) {
    for (int j0 = box.lo[0]; j0 < box.hi[0]; ++j0) {
      Complex row(0.0);
      const std::int64_t stride = static_cast<std::int64_t>(j0) * m;
      for (int j1 = box.lo[1]; j1 < box.hi[1]; ++j1) {
        row += vals[static_cast<size_t>(stride + j1)] * phase[1][static_cast<size_t>(j1)];
      }
      total += row * phase[0][static_cast<size_t>(j0)];
    }
  } else {
    for (int j0 = box.lo[0]; j0 < box.hi[0]; ++j0) {
      Complex plane(0.0);
      for (int j1 = box.lo[1]; j1 < box.hi[1]; ++j1) {
        Complex row(0.0);
        const std::int64_t stride = (static_cast<std::int64_t>(j0) * m + j1) * m;
        for (int j2 = box.lo[2]; j2 < box.hi[2]; ++j2) {
          row += vals[static_cast<size_t>(stride + j2)] * phase[2][static_cast<size_t>(j2)];
        }
        plane += row * phase[1][static_cast<size_t>(j1)];
      }
      total += plane * phase[0][static_cast<size_t>(j0)];
    }
  }
  return hn * total;
}

SampledFunction dilate_samples(const SampledFunction& f, const DilationStructure& d, int k) {
  return dilate_samples(f, d, k, f.grid());
}

SampledFunction dilate_samples(const SampledFunction& f, const DilationStructure& d, int k,
                               const GridSpec& target) {
  const GridSpec& src = f.grid();
  if (src.dimension != target.dimension || src.dimension != d.dimension()) {
    throw Error(ErrorCode::kGridMismatch, "dilate_samples: dimension mismatch");
  }
  const int n = src.dimension;

  // support of x -> f(A^k x) is A^-k (support f); it must fit the target box
  {
    const IndexBox sbox = f.support_box();
    if (!sbox.empty(n)) {
      Vector lo(n), hi(n);
      for (int d2 = 0; d2 < n; ++d2) {
        lo(d2) = src.axis_node(sbox.lo[d2]) - 0.5 * src.spacing();
        hi(d2) = src.axis_node(sbox.hi[d2] - 1) + 0.5 * src.spacing();
      }
      const int corners = 1 << n;
      Vector corner(n);
      for (int c = 0; c < corners; ++c) {
        for (int d2 = 0; d2 < n; ++d2) corner(d2) = ((c >> d2) & 1) ? hi(d2) : lo(d2);
        const Vector mapped = d.apply_power(corner, -k);
        for (int d2 = 0; d2 < n; ++d2) {
          if (std::abs(mapped(d2)) > target.half_width + target.spacing()) {
            throw Error(ErrorCode::kSupportOverflow,
                        "dilated support escapes the target box");
          }
        }
      }
    }
  }

  std::vector<Complex> out(static_cast<size_t>(target.size()));
  const std::int64_t total = target.size();
  Vector x(n);
  for (std::int64_t flat = 0; flat < total; ++flat) {
    SampledFunction::decode_node(target, flat, x);
    out[static_cast<size_t>(flat)] = f.interpolate(d.apply_power(x, k));
  }

  std::optional<Ball> hint;
  if (f.support_hint()) {
    hint = Ball{d.apply_power(f.support_hint()->center, -k), f.support_hint()->scale - k};
  }
  return SampledFunction(target, std::move(out), std::move(hint));
}

SampledFunction convolve(const SampledFunction& f, const SampledFunction& g) {
  if (!(f.grid() == g.grid())) {
    throw Error(ErrorCode::kGridMismatch, "convolve: grids must match");
  }
  const GridSpec& grid = f.grid();
  const int n = grid.dimension;
  const int m = grid.resolution;
  const double h = grid.spacing();
  if (m % 2 != 0) {
    throw Error(ErrorCode::kGridMismatch, "convolve: resolution must be even");
  }

  const IndexBox fbox = f.support_box();
  const IndexBox gbox = g.support_box();
  if (fbox.empty(n) || gbox.empty(n)) return SampledFunction::zeros(grid);

  // Minkowski sum of the supports must fit in the box.
  for (int d = 0; d < n; ++d) {
    const double lo = grid.axis_node(fbox.lo[d]) + grid.axis_node(gbox.lo[d]) - h;
    const double hi = grid.axis_node(fbox.hi[d] - 1) + grid.axis_node(gbox.hi[d] - 1) + h;
    if (lo < -grid.half_width - h || hi > grid.half_width + h) {
      throw Error(ErrorCode::kSupportOverflow, "convolve: support sum escapes the box");
    }
  }

  // Iterate over the sparser factor; read the other at node differences,
  // which sit on cell corners, via a corner-averaged array.
  auto count_nodes = [n](const IndexBox& b) {
    std::int64_t c = 1;
    for (int d = 0; d < n; ++d) c *= (b.hi[d] - b.lo[d]);
    return c;
  };
  const bool f_sparser = count_nodes(fbox) <= count_nodes(gbox);
  const SampledFunction& sparse = f_sparser ? f : g;
  const SampledFunction& dense = f_sparser ? g : f;
  const IndexBox& sbox = f_sparser ? fbox : gbox;
  const IndexBox& dbox = f_sparser ? gbox : fbox;

  // corner array of the dense factor, dims (m+1)^n
  const int mc = m + 1;
  std::int64_t csize = 1;
  for (int d = 0; d < n; ++d) csize *= mc;
  std::vector<Complex> corner(static_cast<size_t>(csize));
  {
    const double scale = 1.0 / (1 << n);
    std::array<int, 3> cidx{};
    const auto& dv = dense.values();
    for (std::int64_t cf = 0; cf < csize; ++cf) {
      std::int64_t rest = cf;
      for (int d = n - 1; d >= 0; --d) {
        cidx[d] = static_cast<int>(rest % mc);
        rest /= mc;
      }
      Complex acc(0.0);
      for (int cbit = 0; cbit < (1 << n); ++cbit) {
        std::array<int, 3> idx{};
        bool inside = true;
        for (int d = 0; d < n; ++d) {
          idx[d] = cidx[d] - (((cbit >> d) & 1) ? 0 : 1);
          if (idx[d] < 0 || idx[d] >= m) inside = false;
        }
        if (!inside) continue;
        acc += dv[static_cast<size_t>(multi_to_flat(grid, idx))];
      }
      corner[static_cast<size_t>(cf)] = scale * acc;
    }
  }

  double hn = 1.0;
  for (int d = 0; d < n; ++d) hn *= h;

  // Output support: Minkowski sum of the index boxes, clipped to the grid.
  IndexBox obox;
  for (int d = 0; d < n; ++d) {
    obox.lo[d] = std::max(0, sbox.lo[d] + dbox.lo[d] - m / 2 - 1);
    obox.hi[d] = std::min(m, sbox.hi[d] + dbox.hi[d] - m / 2 + 1);
  }

  std::vector<Complex> out(static_cast<size_t>(grid.size()));
  const auto& sv = sparse.values();
  std::array<int, 3> kidx{}, jidx{}, tidx{};

  auto emit = [&](const std::array<int, 3>& kk) {
    Complex acc(0.0);
    // sum over sparse support: corner index t = k - j + m/2 per axis
    jidx = sbox.lo;
    while (true) {
      bool ok = true;
      for (int d = 0; d < n; ++d) {
        tidx[d] = kk[d] - jidx[d] + m / 2;
        if (tidx[d] < 0 || tidx[d] > m) {
          ok = false;
          break;
        }
      }
      if (ok) {
        std::int64_t tf = 0;
        for (int d = 0; d < n; ++d) tf = tf * mc + tidx[d];
        acc += sv[static_cast<size_t>(multi_to_flat(grid, jidx))] *
               corner[static_cast<size_t>(tf)];
      }
      int d = n - 1;
      while (d >= 0) {
        if (++jidx[d] < sbox.hi[d]) break;
        jidx[d] = sbox.lo[d];
        --d;
      }
      if (d < 0) break;
    }
    out[static_cast<size_t>(multi_to_flat(grid, kk))] = hn * acc;
  };

  kidx = obox.lo;
  if (!obox.empty(n)) {
    while (true) {
      emit(kidx);
      int d = n - 1;
      while (d >= 0) {
        if (++kidx[d] < obox.hi[d]) break;
        kidx[d] = obox.lo[d];
        --d;
      }
      if (d < 0) break;
    }
  }
  return SampledFunction(grid, std::move(out));
}

SampledFunction rasterize_ball(const DilationStructure& d, const Ball& ball,
                               const GridSpec& grid) {
  if (grid.dimension != d.dimension()) {
    throw Error(ErrorCode::kGridMismatch, "rasterize_ball: dimension mismatch");
  }
  return SampledFunction::sample(
      grid,
      [&](const Vector& x) {
        return d.in_ball(x - ball.center, ball.scale) ? 1.0 : 0.0;
      },
      ball);
}

GridSpec cover_ball(const DilationStructure& d, const Ball& ball, double padding,
                    int resolution) {
  const Vector half = d.ball_bounding_box(ball.scale);
  double reach = 0.0;
  for (int k = 0; k < d.dimension(); ++k) {
    reach = std::max(reach, std::abs(ball.center(k)) + half(k));
  }
  GridSpec g;
  g.dimension = d.dimension();
  g.half_width = reach * padding;
  g.resolution = resolution;
  return g;
}

void write_samples_csv(const std::string& path, const SampledFunction& f) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kConfigError, "cannot open " + path);
  const int n = f.grid().dimension;
  out << "x0";
  for (int d = 1; d < n; ++d) out << ",x" << d;
  out << ",re,im\n";
  char buf[512];
  Vector x(n);
  for (std::int64_t flat = 0; flat < f.grid().size(); ++flat) {
    SampledFunction::decode_node(f.grid(), flat, x);
    int pos = 0;
    for (int d = 0; d < n; ++d) {
      pos += std::snprintf(buf + pos, sizeof(buf) - pos, "%s%.12g", d ? "," : "", x(d));
    }
    const Complex v = f.values()[static_cast<size_t>(flat)];
    std::snprintf(buf + pos, sizeof(buf) - pos, ",%.12g,%.12g", v.real(), v.imag());
    out << buf << '\n';
  }
}

}  // namespace aniso
