#include "arwlab/wavefield.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "arwlab/stats.hpp"

namespace arw {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct ComplexSum {
  CompensatedSum re;
  CompensatedSum im;
  void add(cplx z) {
    re.add(z.real());
    im.add(z.imag());
  }
  cplx value() const { return {re.value(), im.value()}; }
};

double real_part(cplx z, const char* what) {
  if (std::abs(z.imag()) > 1e-9)
    throw std::logic_error(std::string("non-real field value in ") + what);
  return z.real();
}

// Shared accumulation so grid and pointwise evaluation agree bit for bit.
template <class PhaseOf>
FieldJet accumulate(const WaveSample& s, PhaseOf phase_of) {
  const auto pts = s.level().points();
  ComplexSum t, th, t1, t2, th1, th2;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    cplx e = phase_of(i);
    cplx d1(0.0, kTwoPi * pts[i].l1);
    cplx d2(0.0, kTwoPi * pts[i].l2);
    cplx va = s.a()[i] * e;
    cplx vh = s.ahat()[i] * e;
    t.add(va);
    th.add(vh);
    t1.add(va * d1);
    t2.add(va * d2);
    th1.add(vh * d1);
    th2.add(vh * d2);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(pts.size()));
  const double ns = std::sqrt(2.0 / s.level().eigenvalue());
  FieldJet j;
  j.t = scale * real_part(t.value(), "T");
  j.that = scale * real_part(th.value(), "That");
  j.grad_t = {scale * real_part(t1.value(), "dT"), scale * real_part(t2.value(), "dT")};
  j.grad_that = {scale * real_part(th1.value(), "dThat"), scale * real_part(th2.value(), "dThat")};
  j.norm_grad_t = {j.grad_t[0] * ns, j.grad_t[1] * ns};
  j.norm_grad_that = {j.grad_that[0] * ns, j.grad_that[1] * ns};
  return j;
}

double reduced_angle(const Frequency& f, TorusPoint x) {
  double p = f.l1 * x[0] + f.l2 * x[1];
  return kTwoPi * (p - std::nearbyint(p));
}

}  // namespace

WaveSample::WaveSample(LevelPtr level, std::vector<cplx> a, std::vector<cplx> ahat)
    : level_(std::move(level)), a_(std::move(a)), ahat_(std::move(ahat)) {
  if (!level_) throw std::invalid_argument("WaveSample: null level");
  const auto n = static_cast<std::size_t>(level_->multiplicity());
  if (a_.size() != n || ahat_.size() != n)
    throw std::invalid_argument("WaveSample: coefficient count differs from multiplicity");
  for (std::size_t i = 0; i < n; ++i) {
    auto k = static_cast<std::size_t>(level_->antipode(static_cast<int>(i)));
    if (a_[k] != std::conj(a_[i]) || ahat_[k] != std::conj(ahat_[i]))
      throw std::invalid_argument("WaveSample: coefficients are not conjugate symmetric");
  }
  theta_.resize(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) theta_[i] = (a_[i] + cplx(0.0, 1.0) * ahat_[i]) * scale;
}

WaveSample sample_wave(LevelPtr level, RngStream& rng) {
  const int n = level->multiplicity();
  const double sd = std::sqrt(0.5);
  auto draw = [&](std::vector<cplx>& c) {
    c.assign(static_cast<std::size_t>(n), cplx{});
    for (int i = 0; i < n; ++i) {
      if (!level->is_representative(i)) continue;
      double re = sd * rng.normal();
      double im = sd * rng.normal();
      c[static_cast<std::size_t>(i)] = {re, im};
      c[static_cast<std::size_t>(level->antipode(i))] = {re, -im};
    }
  };
  std::vector<cplx> a, ahat;
  draw(a);
  draw(ahat);
  return WaveSample(std::move(level), std::move(a), std::move(ahat));
}

WaveSample deterministic_wave(LevelPtr level, const Assignment& a, const Assignment& ahat) {
  const int n = level->multiplicity();
  auto fill = [&](const Assignment& src, const char* name) {
    std::vector<cplx> c(static_cast<std::size_t>(n), cplx{});
    std::vector<bool> set(static_cast<std::size_t>(n), false);
    for (const auto& [f, value] : src) {
      int i = level->index_of(f);
      if (i < 0)
        throw std::invalid_argument(std::string(name) + ": frequency (" + std::to_string(f.l1) +
                                    "," + std::to_string(f.l2) + ") not on the level");
      int k = level->antipode(i);
      auto ui = static_cast<std::size_t>(i);
      auto uk = static_cast<std::size_t>(k);
      if (set[ui] && c[ui] != value)
        throw std::invalid_argument(std::string(name) + ": conflicting antipodal assignment");
      c[ui] = value;
      c[uk] = std::conj(value);
      set[ui] = set[uk] = true;
    }
    return c;
  };
  return WaveSample(level, fill(a, "a"), fill(ahat, "ahat"));
}

cplx axis_phase(int k, double x) {
  double p = k * x;
  double angle = kTwoPi * (p - std::floor(p));
  return {std::cos(angle), std::sin(angle)};
}

FieldJet evaluate(const WaveSample& sample, TorusPoint x) {
  const auto pts = sample.level().points();
  return accumulate(sample, [&](std::size_t i) {
    return axis_phase(pts[i].l1, x[0]) * axis_phase(pts[i].l2, x[1]);
  });
}

FieldGrid evaluate_grid(const WaveSample& sample, int m) {
  if (m < 1) throw std::invalid_argument("evaluate_grid: m must be >= 1");
  const auto pts = sample.level().points();
  // per-axis tables indexed by frequency component
  std::unordered_map<int, std::vector<cplx>> tables;
  for (const auto& p : pts)
    for (int k : {p.l1, p.l2}) {
      if (tables.count(k)) continue;
      auto& row = tables[k];
      row.resize(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) row[static_cast<std::size_t>(i)] = axis_phase(k, static_cast<double>(i) / m);
    }
  std::vector<const cplx*> first(pts.size()), second(pts.size());
  for (std::size_t l = 0; l < pts.size(); ++l) {
    first[l] = tables[pts[l].l1].data();
    second[l] = tables[pts[l].l2].data();
  }
  FieldGrid grid;
  grid.m = m;
  grid.jets.resize(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      grid.jets[static_cast<std::size_t>(i) * m + j] =
          accumulate(sample, [&](std::size_t l) { return first[l][i] * second[l][j]; });
  return grid;
}

CovarianceJet covariance(const EnergyLevel& level, TorusPoint x) {
  CompensatedSum r, g1, g2, h11, h12, h22;
  for (const auto& p : level.points()) {
    double th = reduced_angle(p, x);
    double c = std::cos(th);
    double s = std::sin(th);
    double w1 = kTwoPi * p.l1;
    double w2 = kTwoPi * p.l2;
    r.add(c);
    g1.add(-w1 * s);
    g2.add(-w2 * s);
    h11.add(-w1 * w1 * c);
    h12.add(-w1 * w2 * c);
    h22.add(-w2 * w2 * c);
  }
  const double inv = 1.0 / level.multiplicity();
  CovarianceJet out;
  out.r = r.value() * inv;
  out.grad = {g1.value() * inv, g2.value() * inv};
  out.h11 = h11.value() * inv;
  out.h12 = h12.value() * inv;
  out.h22 = h22.value() * inv;
  return out;
}

double one_minus_r(const EnergyLevel& level, TorusPoint x) {
  CompensatedSum s;
  for (const auto& p : level.points()) {
    double h = std::sin(0.5 * reduced_angle(p, x));
    s.add(h * h);
  }
  return 2.0 * s.value() / level.multiplicity();
}

double one_plus_r(const EnergyLevel& level, TorusPoint x) {
  CompensatedSum s;
  for (const auto& p : level.points()) {
    double h = std::cos(0.5 * reduced_angle(p, x));
    s.add(h * h);
  }
  return 2.0 * s.value() / level.multiplicity();
}

double origin_exclusion_check(const EnergyLevel& level, int half_points) {
  const double side = 1.0 / (1000.0 * std::sqrt(static_cast<double>(level.n())));
  double margin = 1.0;
  for (int i = -half_points; i <= half_points; ++i)
    for (int j = -half_points; j <= half_points; ++j) {
      if (i == 0 && j == 0) continue;
      TorusPoint x{side * i / half_points, side * j / half_points};
      margin = std::min({margin, one_minus_r(level, x), one_plus_r(level, x)});
    }
  if (!(margin > 0.0))
    throw std::logic_error("origin_exclusion_check: |r| reaches 1 near the origin");
  return margin;
}

}  // namespace arw
