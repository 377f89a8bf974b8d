#include "arwlab/chaos.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "arwlab/stats.hpp"

namespace arw {

namespace {

constexpr double kPi = std::numbers::pi;

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double gaussian_density(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * kPi); }

void check_imag(double im, const char* what) {
  if (std::abs(im) > 1e-10) throw std::logic_error(std::string("imaginary residue in ") + what);
}

int ceil_sqrt(long n) { return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)) - 1e-9)); }

}  // namespace

double hermite(int k, double t) {
  if (k < 0 || k > 16) throw std::invalid_argument("hermite: degree must lie in [0, 16]");
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = t;
  for (int j = 2; j <= k; ++j) {
    double next = t * cur - (j - 1) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double beta(int l) { return hermite(l, 0.0) / std::sqrt(2.0 * kPi); }

double beta_eps(int l, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("beta_eps: eps must be positive");
  if (l < 0) throw std::invalid_argument("beta_eps: negative degree");
  if (l % 2 == 1) return 0.0;
  if (l == 0) return std::erf(eps / std::sqrt(2.0)) / (2.0 * eps);
  return -gaussian_density(eps) * hermite(l - 1, eps) / eps;
}

std::optional<double> alpha_table(AlphaIndex idx) {
  const std::array<int, 4> v{idx.a, idx.b, idx.c, idx.d};
  for (int x : v)
    if (x < 0) throw std::invalid_argument("alpha: negative index");
  const int parity = v[0] % 2;
  for (int x : v)
    if (x % 2 != parity) return 0.0;
  const int total = idx.total();
  if (total > 4) return std::nullopt;
  if (total == 0) return 1.0;
  if (parity == 1) return -3.0 / 8.0;  // (1,1,1,1)
  int fours = 0;
  for (int x : v) fours += x == 4;
  if (total == 2) return 0.5;
  if (fours == 1) return -3.0 / 8.0;
  // two indices equal to 2: X,W or Y,V pair gives 5/8, the others -1/8
  if ((v[0] == 2 && v[3] == 2) || (v[1] == 2 && v[2] == 2)) return 5.0 / 8.0;
  return -1.0 / 8.0;
}

std::vector<AlphaValue> alpha_monte_carlo(std::span<const AlphaIndex> indices, long draws, RngStream& rng) {
  if (draws < 2) throw std::invalid_argument("alpha_monte_carlo: need at least two draws");
  int top = 0;
  for (const auto& i : indices) top = std::max({top, i.a, i.b, i.c, i.d});
  const std::size_t K = indices.size();
  std::vector<double> sum(K, 0.0), sum2(K, 0.0);
  std::vector<double> hx(static_cast<std::size_t>(top) + 1), hy(hx.size()), hv(hx.size()), hw(hx.size());
  auto fill = [top](std::vector<double>& h, double t) {
    h[0] = 1.0;
    if (top >= 1) h[1] = t;
    for (int j = 2; j <= top; ++j)
      h[static_cast<std::size_t>(j)] = t * h[static_cast<std::size_t>(j - 1)] - (j - 1) * h[static_cast<std::size_t>(j - 2)];
  };
  for (long s = 0; s < draws; ++s) {
    double x = rng.normal(), y = rng.normal(), v = rng.normal(), w = rng.normal();
    double jac = std::abs(x * w - y * v);
    fill(hx, x);
    fill(hy, y);
    fill(hv, v);
    fill(hw, w);
    for (std::size_t k = 0; k < K; ++k) {
      const auto& i = indices[k];
      double f = jac * hx[static_cast<std::size_t>(i.a)] * hy[static_cast<std::size_t>(i.b)] *
                 hv[static_cast<std::size_t>(i.c)] * hw[static_cast<std::size_t>(i.d)];
      sum[k] += f;
      sum2[k] += f * f;
    }
  }
  std::vector<AlphaValue> out(K);
  const double n = static_cast<double>(draws);
  for (std::size_t k = 0; k < K; ++k) {
    double mean = sum[k] / n;
    double var = (sum2[k] - n * mean * mean) / (n - 1.0);
    out[k] = {mean, std::sqrt(std::max(var, 0.0) / n), false};
  }
  return out;
}

AlphaValue alpha_coefficient(AlphaIndex idx, RngStream& rng, long draws) {
  if (auto v = alpha_table(idx)) return {*v, 0.0, true};
  if (draws < 10'000'000) throw std::invalid_argument("alpha_coefficient: at least 1e7 draws required");
  const AlphaIndex one[] = {idx};
  return alpha_monte_carlo(one, draws, rng).front();
}

std::array<double, 14> ChaosStatistics::as_vector() const {
  return {W, W1, W2, W12, What, What1, What2, What12, M, M1, M2, M11, M22, M12};
}

ChaosStatistics quadratic_statistics(const WaveSample& sample) {
  const auto pts = sample.level().points();
  const double n = static_cast<double>(sample.level().n());
  const double N = static_cast<double>(pts.size());
  CompensatedSum w, w1, w2, w12, h, h1, h2, h12, mr, mi, m1r, m1i, m2r, m2i, m11r, m11i, m22r, m22i, m12r, m12i;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double l1 = pts[i].l1, l2 = pts[i].l2;
    const cplx a = sample.a()[i], b = sample.ahat()[i];
    const double pa = std::norm(a) - 1.0, pb = std::norm(b) - 1.0;
    w.add(pa);
    w1.add(l1 * l1 * pa);
    w2.add(l2 * l2 * pa);
    w12.add(l1 * l2 * std::norm(a));
    h.add(pb);
    h1.add(l1 * l1 * pb);
    h2.add(l2 * l2 * pb);
    h12.add(l1 * l2 * std::norm(b));
    const cplx z = a * std::conj(b);
    mr.add(z.real());
    mi.add(z.imag());
    m1r.add(l1 * z.real());
    m1i.add(l1 * z.imag());
    m2r.add(l2 * z.real());
    m2i.add(l2 * z.imag());
    m11r.add(l1 * l1 * z.real());
    m11i.add(l1 * l1 * z.imag());
    m22r.add(l2 * l2 * z.real());
    m22i.add(l2 * l2 * z.imag());
    m12r.add(l1 * l2 * z.real());
    m12i.add(l1 * l2 * z.imag());
  }
  const double s0 = 1.0 / std::sqrt(N);
  const double s1 = 1.0 / std::sqrt(n * N);
  const double s2 = 1.0 / (n * std::sqrt(N));
  ChaosStatistics st;
  st.W = s0 * w.value();
  st.W1 = s2 * w1.value();
  st.W2 = s2 * w2.value();
  st.W12 = s2 * w12.value();
  st.What = s0 * h.value();
  st.What1 = s2 * h1.value();
  st.What2 = s2 * h2.value();
  st.What12 = s2 * h12.value();
  check_imag(s0 * mi.value(), "M");
  st.M = s0 * mr.value();
  // i * (re + i im) = -im + i re
  check_imag(s1 * m1r.value(), "M1");
  check_imag(s1 * m2r.value(), "M2");
  st.M1 = -s1 * m1i.value();
  st.M2 = -s1 * m2i.value();
  check_imag(s2 * m11i.value(), "M11");
  check_imag(s2 * m22i.value(), "M22");
  check_imag(s2 * m12i.value(), "M12");
  st.M11 = s2 * m11r.value();
  st.M22 = s2 * m22r.value();
  st.M12 = s2 * m12r.value();
  return st;
}

Matrix14 covariance_matrix(double eta) {
  if (eta < -1.0 || eta > 1.0) throw std::invalid_argument("covariance_matrix: eta outside [-1, 1]");
  Matrix14 m{};
  const double p4 = (3 + eta) / 4, q4 = (1 - eta) / 4, p8 = (3 + eta) / 8, q8 = (1 - eta) / 8;
  const double A[4][4] = {{2, 1, 1, 0}, {1, p4, q4, 0}, {1, q4, p4, 0}, {0, 0, 0, q4}};
  const double B[6][6] = {{1, 0, 0, 0.5, 0.5, 0}, {0, 0.5, 0, 0, 0, 0}, {0, 0, 0.5, 0, 0, 0},
                          {0.5, 0, 0, p8, q8, 0}, {0.5, 0, 0, q8, p8, 0}, {0, 0, 0, 0, 0, q8}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = A[i][j];
      m[static_cast<std::size_t>(i + 4)][static_cast<std::size_t>(j + 4)] = A[i][j];
    }
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) m[static_cast<std::size_t>(i + 8)][static_cast<std::size_t>(j + 8)] = B[i][j];
  return m;
}

double min_eigenvalue(const Matrix14& m) {
  Eigen::Matrix<double, 14, 14> e;
  for (int i = 0; i < 14; ++i)
    for (int j = 0; j < 14; ++j) e(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 14, 14>> solver(e, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double chaos_integral(const FieldGrid& grid, const ChaosDegrees& d) {
  CompensatedSum s;
  for (const auto& j : grid.jets) {
    double v = hermite(d[0], j.t) * hermite(d[1], j.norm_grad_t[0]) * hermite(d[2], j.norm_grad_t[1]) *
               hermite(d[3], j.that) * hermite(d[4], j.norm_grad_that[0]) * hermite(d[5], j.norm_grad_that[1]);
    s.add(v);
  }
  return s.value() / static_cast<double>(grid.jets.size());
}

int exact_grid_size(long n, int degree) { return 2 * degree * ceil_sqrt(n) + 1; }

std::vector<ChaosTerm> chaos_terms(int order) {
  if (order != 2 && order != 4) throw std::invalid_argument("chaos_terms: order must be 2 or 4");
  std::vector<ChaosTerm> out;
  ChaosDegrees d{};
  for (d[0] = 0; d[0] <= order; ++d[0])
    for (d[1] = 0; d[1] <= order; ++d[1])
      for (d[2] = 0; d[2] <= order; ++d[2])
        for (d[3] = 0; d[3] <= order; ++d[3])
          for (d[4] = 0; d[4] <= order; ++d[4])
            for (d[5] = 0; d[5] <= order; ++d[5]) {
              if (std::accumulate(d.begin(), d.end(), 0) != order) continue;
              double b = beta(d[0]) * beta(d[3]) / (factorial(d[0]) * factorial(d[3]));
              double a = *alpha_table({d[1], d[2], d[4], d[5]}) /
                         (factorial(d[1]) * factorial(d[2]) * factorial(d[4]) * factorial(d[5]));
              // (E/2) / (pi n) = 2 pi
              double w = 2.0 * kPi * b * a;
              if (w != 0.0) out.push_back({d, w});
            }
  return out;
}

const std::vector<ChaosTerm>& projection4_terms() {
  static const std::vector<ChaosTerm> terms = [] {
    struct Raw {
      ChaosDegrees d;
      int w;
    };
    const Raw raw[] = {
        {{4, 0, 0, 0, 0, 0}, 8},   {{2, 2, 0, 0, 0, 0}, -8},  {{2, 0, 2, 0, 0, 0}, -8},
        {{0, 2, 2, 0, 0, 0}, -2},  {{0, 4, 0, 0, 0, 0}, -1},  {{0, 0, 4, 0, 0, 0}, -1},
        {{0, 0, 0, 4, 0, 0}, 8},   {{0, 0, 0, 2, 2, 0}, -8},  {{0, 0, 0, 2, 0, 2}, -8},
        {{0, 0, 0, 0, 2, 2}, -2},  {{0, 0, 0, 0, 4, 0}, -1},  {{0, 0, 0, 0, 0, 4}, -1},
        {{2, 0, 0, 2, 0, 0}, 16},  {{2, 0, 0, 0, 2, 0}, -8},  {{2, 0, 0, 0, 0, 2}, -8},
        {{0, 2, 0, 2, 0, 0}, -8},  {{0, 0, 2, 2, 0, 0}, -8},  {{0, 2, 0, 0, 2, 0}, -2},
        {{0, 0, 2, 0, 0, 2}, -2},  {{0, 2, 0, 0, 0, 2}, 10},  {{0, 0, 2, 0, 2, 0}, 10},
        {{0, 1, 1, 0, 1, 1}, -24},
    };
    std::vector<ChaosTerm> t;
    for (const auto& r : raw) t.push_back({r.d, r.w / 64.0});
    return t;
  }();
  return terms;
}

double projection0(const EnergyLevel& level) { return kPi * static_cast<double>(level.n()); }

namespace {

double project(const WaveSample& sample, const std::vector<ChaosTerm>& terms, int m) {
  FieldGrid grid = evaluate_grid(sample, m);
  CompensatedSum s;
  for (const auto& t : terms) s.add(t.weight * chaos_integral(grid, t.degrees));
  return kPi * static_cast<double>(sample.level().n()) * s.value();
}

}  // namespace

double projection2(const WaveSample& sample, int m) {
  static const std::vector<ChaosTerm> terms = chaos_terms(2);
  if (m == 0) m = exact_grid_size(sample.level().n(), 2);
  return project(sample, terms, m);
}

double projection4_exact(const WaveSample& sample) {
  return project(sample, projection4_terms(), exact_grid_size(sample.level().n(), 4));
}

double projection_from_terms(const WaveSample& sample, int order) {
  return project(sample, chaos_terms(order), exact_grid_size(sample.level().n(), order));
}

double projection4_approx(const ChaosStatistics& s, const EnergyLevel& level) {
  const double n = static_cast<double>(level.n());
  const double N = level.multiplicity();
  double bracket = 0.5 * s.W * s.W + 0.5 * s.What * s.What - 3 * s.W * s.What - s.W1 * s.W1 - s.W2 * s.W2 -
                   s.What1 * s.What1 - s.What2 * s.What2 + 6 * s.W1 * s.What2 + 6 * s.What1 * s.W2 -
                   2 * s.W12 * s.W12 - 2 * s.What12 * s.What12 - 12 * s.W12 * s.What12 - 4 * s.M1 * s.M1 -
                   4 * s.M2 * s.M2 + 4 * s.M * s.M - 2 * s.M11 * s.M11 - 2 * s.M22 * s.M22 -
                   12 * s.M11 * s.M22 + 8 * s.M12 * s.M12 + 4;
  return n * kPi / (8.0 * N) * bracket;
}

std::array<QuarticIdentity, 4> quartic_identities(const WaveSample& sample) {
  const auto pts = sample.level().points();
  const double n = static_cast<double>(sample.level().n());
  const double N = static_cast<double>(pts.size());
  FieldGrid grid = evaluate_grid(sample, exact_grid_size(sample.level().n(), 4));
  ChaosStatistics st = quadratic_statistics(sample);
  CompensatedSum q4, q4w, mix, mix2, mixw, mix2w;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double l = static_cast<double>(pts[i].l1) * pts[i].l1 * pts[i].l2 * pts[i].l2;
    const cplx a = sample.a()[i], b = sample.ahat()[i];
    const double aa = std::norm(a), bb = std::norm(b);
    const double cross = (a * a * std::conj(b) * std::conj(b)).real();
    q4.add(aa * aa);
    q4w.add(l * aa * aa);
    mix.add(aa * bb);
    mix2.add(cross);
    mixw.add(l * aa * bb);
    mix2w.add(l * cross);
  }
  std::array<QuarticIdentity, 4> out;
  out[0] = {"quartic_i", chaos_integral(grid, {4, 0, 0, 0, 0, 0}),
            3.0 / N * st.W * st.W - 3.0 / (N * N) * q4.value()};
  out[1] = {"quartic_iv", chaos_integral(grid, {0, 2, 2, 0, 0, 0}),
            4.0 / N * (st.W1 * st.W2 + 2 * st.W12 * st.W12 - 3.0 / (n * n * N) * q4w.value())};
  out[2] = {"quartic_v", chaos_integral(grid, {2, 0, 0, 2, 0, 0}),
            1.0 / N * (st.W * st.What + 2 * st.M * st.M - 2.0 / N * mix.value() - 1.0 / N * mix2.value())};
  out[3] = {"quartic_viii", chaos_integral(grid, {0, 1, 1, 0, 1, 1}),
            4.0 / N *
                (st.W12 * st.What12 + st.M11 * st.M22 + st.M12 * st.M12 - 2.0 / (n * n * N) * mixw.value() -
                 1.0 / (n * n * N) * mix2w.value())};
  return out;
}

double sample_j_unnormalized(double eta, RngStream& rng) {
  auto chi = [&] {
    double x = rng.normal();
    return x * x;
  };
  double A = 2 * chi() + 2 * chi() - 4 * chi();
  double B = 2 * chi() + 2 * chi() - 4 * chi();
  double C = chi() + chi();
  return (1 + eta) / 2 * A + (1 - eta) / 2 * B - 2 * (C - 2);
}

double sample_limit(const LimitLaw& law, RngStream& rng) {
  const double eta = law.eta;
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("sample_limit: eta outside [0, 1]");
  if (law.kind == LawKind::J) return sample_j_unnormalized(eta, rng) / (2.0 * std::sqrt(10.0 + 6.0 * eta * eta));
  double x1 = rng.normal(), x2 = rng.normal();
  return (2.0 - (1 + eta) * x1 * x1 - (1 - eta) * x2 * x2) / (2.0 * std::sqrt(1.0 + eta * eta));
}

namespace {

// Sum over permutations of prod_j c[left[j]][right[sigma(j)]].
double pairing_sum(const std::array<int, 3>& p, const std::array<int, 3>& a, const Cov3& c) {
  std::vector<int> left, right;
  for (int t = 0; t < 3; ++t) {
    left.insert(left.end(), static_cast<std::size_t>(p[static_cast<std::size_t>(t)]), t);
    right.insert(right.end(), static_cast<std::size_t>(a[static_cast<std::size_t>(t)]), t);
  }
  std::vector<int> perm(left.size());
  std::iota(perm.begin(), perm.end(), 0);
  double total = 0.0;
  do {
    double prod = 1.0;
    for (std::size_t j = 0; j < left.size(); ++j)
      prod *= c[static_cast<std::size_t>(left[j])][static_cast<std::size_t>(right[static_cast<std::size_t>(perm[j])])];
    total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

int sum3(const std::array<int, 3>& v) { return v[0] + v[1] + v[2]; }

}  // namespace

double leonov_shiryaev_moment(const std::array<int, 3>& p, const std::array<int, 3>& a,
                              const std::array<int, 3>& q, const std::array<int, 3>& b,
                              const Cov3& cx, const Cov3& cy) {
  for (const auto* v : {&p, &a, &q, &b})
    for (int x : *v)
      if (x < 0) throw std::invalid_argument("leonov_shiryaev_moment: negative degree");
  if (std::max({sum3(p), sum3(a), sum3(q), sum3(b)}) > 6)
    throw std::invalid_argument("leonov_shiryaev_moment: block degree above 6");
  if (sum3(p) != sum3(a) || sum3(q) != sum3(b)) return 0.0;
  return pairing_sum(p, a, cx) * pairing_sum(q, b, cy);
}

}  // namespace arw
