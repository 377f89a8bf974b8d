#include "arwlab/zerofinder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "arwlab/errors.hpp"

namespace arw {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxEdgeDepth = 44;

struct ThetaJet {
  cplx v;
  cplx d1;
  cplx d2;
};

// Quadrants are half-open so every nonzero value has exactly one.
int quadrant(cplx z) {
  double re = z.real();
  double im = z.imag();
  if (re > 0 && im >= 0) return 0;
  if (re <= 0 && im > 0) return 1;
  if (re < 0 && im <= 0) return 2;
  return 3;
}

bool close_in_phase(cplx a, cplx b) {
  return a.real() * b.real() + a.imag() * b.imag() > 0;
}

// Signed quarter-turn step between values less than pi/2 apart.
int quarter_step(cplx a, cplx b) {
  int d = (quadrant(b) - quadrant(a) + 4) % 4;
  return d == 1 ? 1 : (d == 3 ? -1 : 0);
}

double torus_delta(double a, double b) {
  double d = a - b;
  return d - std::nearbyint(d);
}

class Finder {
 public:
  Finder(const WaveSample& s, const ZeroFinderOptions& o) : sample_(s), opt_(o) {
    const auto pts = s.level().points();
    coeff_ = s.theta_coefficients();
    for (const auto& p : pts) {
      l1_.push_back(p.l1);
      l2_.push_back(p.l2);
    }
    grad_scale_ = std::sqrt(s.level().eigenvalue());
  }

  cplx value(TorusPoint x) const {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < coeff_.size(); ++i) {
      cplx e = axis_phase(l1_[i], x[0]) * axis_phase(l2_[i], x[1]);
      re += coeff_[i].real() * e.real() - coeff_[i].imag() * e.imag();
      im += coeff_[i].real() * e.imag() + coeff_[i].imag() * e.real();
    }
    return {re, im};
  }

  ThetaJet jet(TorusPoint x) const {
    ThetaJet j{};
    for (std::size_t i = 0; i < coeff_.size(); ++i) {
      cplx e = axis_phase(l1_[i], x[0]) * axis_phase(l2_[i], x[1]);
      cplx t(coeff_[i].real() * e.real() - coeff_[i].imag() * e.imag(),
             coeff_[i].real() * e.imag() + coeff_[i].imag() * e.real());
      j.v += t;
      // multiply by 2 pi i l
      j.d1 += cplx(-t.imag(), t.real()) * (kTwoPi * l1_[i]);
      j.d2 += cplx(-t.imag(), t.real()) * (kTwoPi * l2_[i]);
    }
    return j;
  }

  // Quarter turns of Theta along the segment a -> b, bisecting until
  // consecutive values are less than pi/2 apart.
  int edge_quarters(TorusPoint a, cplx va, TorusPoint b, cplx vb, int depth = 0) {
    if (va == cplx{} || vb == cplx{}) throw UnresolvedCellError("field vanishes on a scan edge");
    if (close_in_phase(va, vb)) return quarter_step(va, vb);
    if (depth == 0) ++diag_.refined_edges;
    if (depth >= kMaxEdgeDepth)
      throw UnresolvedCellError("phase increment unresolved along an edge (degenerate field?)");
    TorusPoint mid{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
    cplx vm = value(mid);
    return edge_quarters(a, va, mid, vm, depth + 1) + edge_quarters(mid, vm, b, vb, depth + 1);
  }

  ZeroSet run() {
    const long n = sample_.level().n();
    int cells = opt_.cells_per_axis > 0 ? opt_.cells_per_axis : default_cells_per_axis(n);
    if (cells < default_cells_per_axis(n))
      throw std::invalid_argument("locate_zeros: cells_per_axis below ceil(10 sqrt n)");
    if (opt_.samples_per_edge < 1) throw std::invalid_argument("locate_zeros: samples_per_edge < 1");
    const int L = cells * opt_.samples_per_edge;
    h_ = 1.0 / L;
    diag_.cells_scanned = static_cast<long>(cells) * cells;
    fill_lattice(L);

    auto at = [&](int i, int j) -> cplx { return lattice_[idx(i, j, L)]; };
    auto pos = [&](int i, int j) -> TorusPoint { return {(i + 0.5) * h_, (j + 0.5) * h_}; };
    // quarter turns along +x1 and +x2 edges leaving each lattice point
    std::vector<int> hq(static_cast<std::size_t>(L) * L);
    std::vector<int> vq(static_cast<std::size_t>(L) * L);
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < L; ++j) {
        int ip = (i + 1) % L;
        int jp = (j + 1) % L;
        hq[idx(i, j, L)] = edge_quarters(pos(i, j), at(i, j), pos(i + 1, j), at(ip, j));
        vq[idx(i, j, L)] = edge_quarters(pos(i, j), at(i, j), pos(i, j + 1), at(i, jp));
      }
    const double probe_level = 2.0 * h_ * grad_scale_;
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < L; ++j) {
        int ip = (i + 1) % L;
        int jp = (j + 1) % L;
        int quarters = hq[idx(i, j, L)] + vq[idx(ip, j, L)] - hq[idx(i, jp, L)] - vq[idx(i, j, L)];
        int w = quarters / 4;
        TorusPoint corner = pos(i, j);
        if (w != 0) {
          resolve(corner, h_, w, 0);
        } else if (opt_.probe_dipoles) {
          double biggest = std::max({std::abs(at(i, j)), std::abs(at(ip, j)), std::abs(at(i, jp)),
                                     std::abs(at(ip, jp))});
          if (biggest < probe_level) probe(corner, h_, 0);
        }
      }
    return finish();
  }

 private:
  static std::size_t idx(int i, int j, int L) {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(L) + static_cast<std::size_t>(j);
  }

  void fill_lattice(int L) {
    const std::size_t N = coeff_.size();
    // phase tables with exact argument reduction: angle = 2 pi k (2i+1) / (2L)
    auto phase = [&](int k, int i) {
      long num = static_cast<long>(k) * (2L * i + 1);
      long den = 2L * L;
      num %= den;
      if (num < 0) num += den;
      double angle = kTwoPi * static_cast<double>(num) / static_cast<double>(den);
      return cplx(std::cos(angle), std::sin(angle));
    };
    std::vector<double> bre(N * static_cast<std::size_t>(L));
    std::vector<double> bim(N * static_cast<std::size_t>(L));
    for (int j = 0; j < L; ++j)
      for (std::size_t l = 0; l < N; ++l) {
        cplx e = phase(l2_[l], j);
        bre[static_cast<std::size_t>(j) * N + l] = e.real();
        bim[static_cast<std::size_t>(j) * N + l] = e.imag();
      }
    lattice_.assign(static_cast<std::size_t>(L) * L, cplx{});
    std::vector<double> pre(N), pim(N);
    for (int i = 0; i < L; ++i) {
      for (std::size_t l = 0; l < N; ++l) {
        cplx e = phase(l1_[l], i);
        pre[l] = coeff_[l].real() * e.real() - coeff_[l].imag() * e.imag();
        pim[l] = coeff_[l].real() * e.imag() + coeff_[l].imag() * e.real();
      }
      for (int j = 0; j < L; ++j) {
        const double* br = &bre[static_cast<std::size_t>(j) * N];
        const double* bi = &bim[static_cast<std::size_t>(j) * N];
        double re = 0.0;
        double im = 0.0;
        for (std::size_t l = 0; l < N; ++l) {
          re += pre[l] * br[l] - pim[l] * bi[l];
          im += pre[l] * bi[l] + pim[l] * br[l];
        }
        lattice_[idx(i, j, L)] = {re, im};
      }
    }
  }

  struct NewtonResult {
    bool converged = false;
    TorusPoint x{};
    double det = 0.0;
  };

  // Optional box: give up once an iterate leaves [lo, hi] in both coordinates.
  NewtonResult newton(TorusPoint x, const double* box = nullptr) const {
    NewtonResult out;
    ThetaJet j = jet(x);
    double res = std::max(std::abs(j.v.real()), std::abs(j.v.imag()));
    for (int it = 0; it < opt_.max_newton_iterations; ++it) {
      double a = j.d1.real(), b = j.d2.real(), c = j.d1.imag(), d = j.d2.imag();
      double det = a * d - b * c;
      if (det == 0.0 || !std::isfinite(det)) return out;
      if (res <= opt_.residual_tolerance) {
        out.converged = true;
        out.x = x;
        out.det = det;
        return out;
      }
      double f = j.v.real(), g = j.v.imag();
      double dx = -(d * f - b * g) / det;
      double dy = -(-c * f + a * g) / det;
      double step = 1.0;
      bool moved = false;
      for (int k = 0; k < 40; ++k) {
        TorusPoint y{x[0] + step * dx, x[1] + step * dy};
        ThetaJet jy = jet(y);
        double ry = std::max(std::abs(jy.v.real()), std::abs(jy.v.imag()));
        if (ry < res || ry <= opt_.residual_tolerance) {
          if (box && (y[0] < box[0] || y[0] > box[1] || y[1] < box[2] || y[1] > box[3])) return out;
          x = y;
          j = jy;
          res = ry;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) {
        // stalled at rounding level
        if (res <= 1e-10) {
          double det2 = j.d1.real() * j.d2.imag() - j.d2.real() * j.d1.imag();
          out.converged = det2 != 0.0;
          out.x = x;
          out.det = det2;
        }
        return out;
      }
    }
    return out;
  }

  static bool inside(TorusPoint corner, double side, TorusPoint x, double margin) {
    double u = torus_delta(x[0], corner[0]);
    double v = torus_delta(x[1], corner[1]);
    if (u < -0.5 * side) u += 1.0;
    if (v < -0.5 * side) v += 1.0;
    return u >= -margin && u <= side + margin && v >= -margin && v <= side + margin;
  }

  // Windings of the four half-size children, counterclockwise from the lower-left.
  std::array<int, 4> child_windings(TorusPoint c, double side) {
    double s = 0.5 * side;
    std::array<TorusPoint, 9> p;
    std::array<cplx, 9> v;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        p[static_cast<std::size_t>(3 * a + b)] = {c[0] + a * s, c[1] + b * s};
        v[static_cast<std::size_t>(3 * a + b)] = value(p[static_cast<std::size_t>(3 * a + b)]);
      }
    auto e = [&](int a0, int b0, int a1, int b1) {
      auto i0 = static_cast<std::size_t>(3 * a0 + b0);
      auto i1 = static_cast<std::size_t>(3 * a1 + b1);
      return edge_quarters(p[i0], v[i0], p[i1], v[i1]);
    };
    auto square = [&](int a, int b) {
      int q = e(a, b, a + 1, b) + e(a + 1, b, a + 1, b + 1) - e(a, b + 1, a + 1, b + 1) - e(a, b, a, b + 1);
      return q / 4;
    };
    return {square(0, 0), square(1, 0), square(0, 1), square(1, 1)};
  }

  void subdivide(TorusPoint c, double side, int depth, bool probing) {
    ++diag_.subdivisions;
    auto w = child_windings(c, side);
    double s = 0.5 * side;
    const std::array<TorusPoint, 4> corners{TorusPoint{c[0], c[1]}, TorusPoint{c[0] + s, c[1]},
                                            TorusPoint{c[0], c[1] + s}, TorusPoint{c[0] + s, c[1] + s}};
    for (std::size_t k = 0; k < 4; ++k) {
      if (w[k] != 0)
        resolve(corners[k], s, w[k], depth + 1);
      else if (probing)
        probe(corners[k], s, depth + 1);
    }
  }

  void resolve(TorusPoint c, double side, int w, int depth) {
    if (w == 1 || w == -1) {
      NewtonResult r = newton({c[0] + 0.5 * side, c[1] + 0.5 * side});
      if (r.converged && inside(c, side, r.x, 1e-6 * side) && (r.det > 0 ? 1 : -1) == w) {
        record(r);
        return;
      }
      ++diag_.newton_failures;
    }
    if (depth >= opt_.max_subdivisions)
      throw UnresolvedCellError("cell with winding " + std::to_string(w) + " unresolved after " +
                                std::to_string(depth) + " subdivisions");
    subdivide(c, side, depth, false);
  }

  // A zero-winding square may still hold a close pair of opposite charges.
  void probe(TorusPoint c, double side, int depth) {
    ++diag_.dipole_probes;
    const double box[4] = {c[0] - side, c[0] + 2 * side, c[1] - side, c[1] + 2 * side};
    NewtonResult r = newton({c[0] + 0.5 * side, c[1] + 0.5 * side}, box);
    if (!r.converged || !inside(c, side, r.x, -1e-3 * side)) return;
    if (depth >= opt_.max_subdivisions) return;
    if (depth == 0) ++diag_.dipoles_found;
    subdivide(c, side, depth, true);
  }

  void record(const NewtonResult& r) {
    Zero z;
    z.position = {r.x[0] - std::floor(r.x[0]), r.x[1] - std::floor(r.x[1])};
    for (double& u : z.position)
      if (u >= 1.0) u -= 1.0;
    z.jacobian_det = r.det;
    z.charge = r.det > 0 ? 1 : -1;
    const double scale = sample_.level().eigenvalue();
    if (std::abs(r.det) < 1e-12 * scale)
      throw UnresolvedCellError("singular Jacobian at a zero (degenerate sample)");
    found_.push_back(z);
  }

  ZeroSet finish() {
    ZeroSet out;
    const double tol = opt_.dedup_tolerance;
    for (const auto& z : found_) {
      bool dup = false;
      for (const auto& y : out.zeros) {
        double du = torus_delta(z.position[0], y.position[0]);
        double dv = torus_delta(z.position[1], y.position[1]);
        if (std::hypot(du, dv) <= tol) {
          dup = true;
          break;
        }
      }
      if (dup)
        ++diag_.dedup_merges;
      else
        out.zeros.push_back(z);
    }
    out.diagnostics = diag_;
    if (out.total_charge() != 0)
      throw UnresolvedCellError("total charge " + std::to_string(out.total_charge()) + " is not zero");
    return out;
  }

  const WaveSample& sample_;
  ZeroFinderOptions opt_;
  std::span<const cplx> coeff_;
  std::vector<int> l1_, l2_;
  double grad_scale_ = 0.0;
  double h_ = 0.0;
  std::vector<cplx> lattice_;
  std::vector<Zero> found_;
  ZeroDiagnostics diag_;
};

// Values of Theta and its gradient on the m x m grid ((i + offset)/m, (j + offset)/m),
// with offset in {0, 1/2}; reduction of the phase argument is exact.
struct GridTables {
  std::size_t N = 0;
  int m = 0;
  std::vector<cplx> first;   // [i * N + l]
  std::vector<cplx> second;  // [j * N + l]

  GridTables(const WaveSample& s, int m_, bool half) : N(s.level().points().size()), m(m_) {
    const auto pts = s.level().points();
    first.resize(N * static_cast<std::size_t>(m));
    second.resize(N * static_cast<std::size_t>(m));
    long den = half ? 2L * m : m;
    for (int i = 0; i < m; ++i)
      for (std::size_t l = 0; l < N; ++l) {
        long t = half ? 2L * i + 1 : i;
        for (int axis = 0; axis < 2; ++axis) {
          long k = axis == 0 ? pts[l].l1 : pts[l].l2;
          long num = (k * t) % den;
          if (num < 0) num += den;
          double angle = kTwoPi * static_cast<double>(num) / static_cast<double>(den);
          (axis == 0 ? first : second)[static_cast<std::size_t>(i) * N + l] = {std::cos(angle), std::sin(angle)};
        }
      }
  }
};

}  // namespace

int ZeroSet::total_charge() const {
  int s = 0;
  for (const auto& z : zeros) s += z.charge;
  return s;
}

int default_cells_per_axis(long n) {
  return static_cast<int>(std::ceil(10.0 * std::sqrt(static_cast<double>(n)) - 1e-9));
}

ZeroSet locate_zeros(const WaveSample& sample, const ZeroFinderOptions& options) {
  Finder f(sample, options);
  return f.run();
}

double epsilon_count(const WaveSample& sample, double epsilon, int m) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon_count: epsilon must lie in (0,1)");
  const long n = sample.level().n();
  int root = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)) - 1e-9));
  if (m < 20 * root || m < static_cast<int>(std::ceil(8.0 / epsilon)))
    throw std::invalid_argument("epsilon_count: grid too coarse");
  GridTables g(sample, m, true);
  const auto c = sample.theta_coefficients();
  const auto pts = sample.level().points();
  const std::size_t N = g.N;
  double total = 0.0;
  std::vector<cplx> row(N);
  for (int i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < N; ++l) row[l] = c[l] * g.first[static_cast<std::size_t>(i) * N + l];
    double row_sum = 0.0;
    for (int j = 0; j < m; ++j) {
      const cplx* e = &g.second[static_cast<std::size_t>(j) * N];
      cplx v{};
      for (std::size_t l = 0; l < N; ++l) v += row[l] * e[l];
      if (std::abs(v.real()) > epsilon || std::abs(v.imag()) > epsilon) continue;
      cplx d1{}, d2{};
      for (std::size_t l = 0; l < N; ++l) {
        cplx t = row[l] * e[l] * cplx(0.0, kTwoPi);
        d1 += t * static_cast<double>(pts[l].l1);
        d2 += t * static_cast<double>(pts[l].l2);
      }
      row_sum += std::abs(d1.real() * d2.imag() - d2.real() * d1.imag());
    }
    total += row_sum;
  }
  return total / (4.0 * epsilon * epsilon * m * static_cast<double>(m));
}

NodalLength nodal_length(const WaveSample& sample, Component component, int m) {
  const long n = sample.level().n();
  int root = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)) - 1e-9));
  if (m < 20 * root) throw std::invalid_argument("nodal_length: grid too coarse");
  const bool take_real = component == Component::T;
  GridTables g(sample, m, false);
  const auto c = sample.theta_coefficients();
  const std::size_t N = g.N;
  std::vector<double> f(static_cast<std::size_t>(m) * m);
  std::vector<cplx> row(N);
  for (int i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < N; ++l) row[l] = c[l] * g.first[static_cast<std::size_t>(i) * N + l];
    for (int j = 0; j < m; ++j) {
      const cplx* e = &g.second[static_cast<std::size_t>(j) * N];
      cplx v{};
      for (std::size_t l = 0; l < N; ++l) v += row[l] * e[l];
      f[static_cast<std::size_t>(i) * m + j] = take_real ? v.real() : v.imag();
    }
  }
  const double h = 1.0 / m;
  auto val = [&](int i, int j) { return f[static_cast<std::size_t>(i % m) * m + static_cast<std::size_t>(j % m)]; };
  auto center = [&](int i, int j) {
    cplx v{};
    TorusPoint x{(i + 0.5) * h, (j + 0.5) * h};
    const auto pts = sample.level().points();
    for (std::size_t l = 0; l < N; ++l) v += c[l] * axis_phase(pts[l].l1, x[0]) * axis_phase(pts[l].l2, x[1]);
    return take_real ? v.real() : v.imag();
  };
  NodalLength out;
  double total = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      // corners counterclockwise in local unit coordinates
      const double v0 = val(i, j), v1 = val(i + 1, j), v2 = val(i + 1, j + 1), v3 = val(i, j + 1);
      const bool s0 = v0 > 0, s1 = v1 > 0, s2 = v2 > 0, s3 = v3 > 0;
      std::array<std::array<double, 2>, 4> cross{};
      std::array<bool, 4> has{};
      auto edge = [&](int k, double a, double b, std::array<double, 2> pa, std::array<double, 2> pb) {
        double t = a / (a - b);
        cross[static_cast<std::size_t>(k)] = {pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])};
        has[static_cast<std::size_t>(k)] = true;
      };
      if (s0 != s1) edge(0, v0, v1, {0, 0}, {1, 0});
      if (s1 != s2) edge(1, v1, v2, {1, 0}, {1, 1});
      if (s2 != s3) edge(2, v2, v3, {1, 1}, {0, 1});
      if (s3 != s0) edge(3, v3, v0, {0, 1}, {0, 0});
      auto seg = [&](int a, int b) {
        const auto& p = cross[static_cast<std::size_t>(a)];
        const auto& q = cross[static_cast<std::size_t>(b)];
        total += std::hypot(p[0] - q[0], p[1] - q[1]);
      };
      int k = has[0] + has[1] + has[2] + has[3];
      if (k == 2) {
        int a = -1, b = -1;
        for (int e = 0; e < 4; ++e)
          if (has[static_cast<std::size_t>(e)]) (a < 0 ? a : b) = e;
        seg(a, b);
      } else if (k == 4) {
        ++out.saddle_cells;
        bool sc = center(i, j) > 0;
        if (sc == s0) {
          // corner 0 joined to corner 2 through the center: cut off corners 1 and 3
          seg(0, 1);
          seg(2, 3);
        } else {
          seg(3, 0);
          seg(1, 2);
        }
      }
    }
  out.length = total * h;
  return out;
}

}  // namespace arw
