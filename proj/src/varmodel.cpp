#include "hfbm/varmodel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "hfbm/dwt.hpp"
#include "hfbm/errors.hpp"
#include "hfbm/parallel.hpp"
#include "hfbm/simd.hpp"
#include "hfbm/stats.hpp"

namespace hfbm {

namespace detail {

// Everything about the wavelet correlation that does not depend on the
// exponents: equivalent filters, their cross-correlations per octave pair,
// lag multiplicities and far-field moments.
struct Block {
  int j = 0;
  int jp = 0;
  long vmin = 0;               // lag index range: delta = 2^j v + offset
  long vmax = 0;
  long offset = 0;             // c_j - c_jp
  std::vector<double> mult;    // multiplicity of v, indexed v - vmin
  std::vector<double> xr;      // x_{j jp}(u) reversed: xr[i] = x(umax - i)
  long umax = 0;
  double u0 = 0.0;             // centre and half-width of the support of x
  double U = 0.0;
  std::vector<double> nu;      // sum_u x(u) ((u - u0)/U)^p
  double x_l1 = 0.0;
};

struct Cascade {
  int j1 = 0;
  int j2 = 0;
  std::size_t n = 0;
  std::vector<std::size_t> counts;  // n_j, j1..j2
  std::vector<long> offsets;        // c_j, j1..j2
  std::vector<Block> blocks;        // j <= jp, row-major

  std::size_t block_index(int j, int jp) const {
    // Rows j = j1..j2, each holding jp = j..j2.
    const int J = j2 - j1 + 1;
    const int a = j - j1;
    const int b = jp - j1;
    return static_cast<std::size_t>(a * J - a * (a - 1) / 2 + (b - a));
  }
  const Block& block(int j, int jp) const { return blocks[block_index(j, jp)]; }
};

namespace {

constexpr int kMoments = 80;
constexpr double kFarField = 4.0;

std::vector<double> upsample(const std::vector<double>& f, std::size_t step) {
  std::vector<double> out((f.size() - 1) * step + 1, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) out[i * step] = f[i];
  return out;
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t k = 0; k < b.size(); ++k) out[i + k] += a[i] * b[k];
  }
  return out;
}

std::shared_ptr<const Cascade> build_cascade(int j1, int j2, std::size_t n) {
  const FilterBank fb = build_filters();
  auto c = std::make_shared<Cascade>();
  c->j1 = j1;
  c->j2 = j2;
  c->n = n;
  std::vector<std::vector<double>> g(static_cast<std::size_t>(j2 + 1));
  std::vector<double> low{1.0};
  long cj = 0;
  for (int j = 1; j <= j2; ++j) {
    const std::size_t step = std::size_t{1} << (j - 1);
    g[j] = convolve(upsample(fb.g, step), low);
    low = convolve(upsample(fb.h, step), low);
    cj = 2 * cj + static_cast<long>(fb.taps()) - 1;  // c_j = 2 c_{j-1} + L - 1
    if (j >= j1) {
      c->counts.push_back(detail_count(n, j, fb.taps()));
      c->offsets.push_back(cj);
    }
  }
  for (int j = j1; j <= j2; ++j) {
    for (int jp = j; jp <= j2; ++jp) c->blocks.emplace_back();
  }
  parallel_for(c->blocks.size(), [&](std::size_t bi) {
    // Recover (j, jp) from the row-major index.
    int j = j1, jp = j1;
    {
      std::size_t idx = bi;
      for (j = j1; j <= j2; ++j) {
        const std::size_t row = static_cast<std::size_t>(j2 - j + 1);
        if (idx < row) {
          jp = j + static_cast<int>(idx);
          break;
        }
        idx -= row;
      }
    }
    Block& b = c->blocks[bi];
    b.j = j;
    b.jp = jp;
    const auto& gj = g[j];
    const auto& gk = g[jp];
    const long Lj = static_cast<long>(gj.size());
    const long Lk = static_cast<long>(gk.size());
    // x(u) = sum_a g_j(a) g_jp(a - u), u in [-(Lk-1), Lj-1]
    std::vector<double> x(static_cast<std::size_t>(Lj + Lk - 1), 0.0);
    for (long bb = 0; bb < Lk; ++bb) {
      const double gb = gk[static_cast<std::size_t>(bb)];
      double* dst = x.data() + (Lk - 1 - bb);
      for (long a = 0; a < Lj; ++a) dst[a] += gj[static_cast<std::size_t>(a)] * gb;
    }
    b.umax = Lj - 1;
    b.xr.assign(x.rbegin(), x.rend());
    const long umin = -(Lk - 1);
    b.u0 = 0.5 * static_cast<double>(umin + b.umax);
    b.U = 0.5 * static_cast<double>(b.umax - umin);
    b.nu.assign(kMoments + 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = (static_cast<double>(umin + static_cast<long>(i)) - b.u0) / b.U;
      double pw = 1.0;
      for (int p = 0; p <= kMoments; ++p) {
        b.nu[p] += x[i] * pw;
        pw *= e;
      }
      b.x_l1 += std::abs(x[i]);
    }
    // The first four moments vanish exactly (two vanishing moments per filter).
    for (int p = 0; p < 4; ++p) b.nu[p] = 0.0;

    const long nj = static_cast<long>(c->counts[j - j1]);
    const long nk = static_cast<long>(c->counts[jp - j1]);
    const long ratio = 1L << (jp - j);
    b.offset = c->offsets[j - j1] - c->offsets[jp - j1];
    b.vmin = -ratio * (nk - 1);
    b.vmax = nj - 1;
    std::vector<double> diff(static_cast<std::size_t>(b.vmax - b.vmin + 2), 0.0);
    for (long kp = 0; kp < nk; ++kp) {
      // v = k - ratio * kp for k in [0, nj)
      diff[static_cast<std::size_t>(-ratio * kp - b.vmin)] += 1.0;
      diff[static_cast<std::size_t>(nj - ratio * kp - b.vmin)] -= 1.0;
    }
    b.mult.resize(static_cast<std::size_t>(b.vmax - b.vmin + 1));
    double run = 0.0;
    for (std::size_t i = 0; i < b.mult.size(); ++i) {
      run += diff[i];
      b.mult[i] = run;
    }
  });
  return c;
}

std::shared_ptr<const Cascade> cascade_for(int j1, int j2, std::size_t n) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, std::size_t>, std::shared_ptr<const Cascade>> cache;
  const auto key = std::make_tuple(j1, j2, n);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto c = build_cascade(j1, j2, n);
  std::lock_guard<std::mutex> lock(mu);
  if (cache.size() > 64) cache.clear();
  return cache.emplace(key, c).first->second;
}

double pow_abs(double t, double alpha) { return t == 0.0 ? 0.0 : std::pow(std::abs(t), alpha); }

// -sum_u x(u) |delta - u|^alpha by direct summation.
double kernel_direct(const Block& b, double alpha, double delta) {
  double s = 0.0;
  for (std::size_t i = 0; i < b.xr.size(); ++i) {
    s += b.xr[i] * pow_abs(delta - static_cast<double>(b.umax) + static_cast<double>(i), alpha);
  }
  return -s;
}

// Same quantity from the moment expansion; valid for |delta - u0| >= 4U.
double kernel_far(const Block& b, double alpha, const std::vector<double>& binom, double delta) {
  const double D = delta - b.u0;
  const double r = -b.U / D;
  double rp = r * r * r * r;
  double sum = 0.0;
  double bound = b.x_l1 * std::abs(rp);
  for (int p = 4; p <= kMoments; ++p) {
    const double t = binom[p] * b.nu[p] * rp;
    sum += t;
    if (p >= 8 && bound < 1e-17 * std::abs(sum)) break;
    rp *= r;
    bound *= std::abs(r);
  }
  return -std::pow(std::abs(D), alpha) * sum;
}

std::vector<double> binomials(double alpha) {
  std::vector<double> c(kMoments + 1);
  c[0] = 1.0;
  for (int p = 1; p <= kMoments; ++p) c[p] = c[p - 1] * (alpha - (p - 1)) / p;
  return c;
}

}  // namespace
}  // namespace detail

CorrelationParams theoretical_params(const HfBmModel& model) {
  require_valid(model);
  return {model.alpha(), time_domain_rho(model)};
}

CorrelationParams plugin_params(const ScalingEstimate& est) {
  CorrelationParams p{est.alpha, est.rho};
  for (Eigen::Index i = 0; i < p.alpha.size(); ++i) {
    p.alpha.data()[i] = std::clamp(p.alpha.data()[i], 1e-3, 2.0 - 1e-3);
  }
  return p;
}

WaveletCorrelation::WaveletCorrelation(CorrelationParams params, int j1, int j2, std::size_t n,
                                       Coupling coupling)
    : params_(std::move(params)), j1_(j1), j2_(j2), n_(n), coupling_(coupling) {
  const int m = params_.m();
  if (m < 1 || params_.rho.rows() != m || params_.rho.cols() != m || params_.alpha.cols() != m) {
    throw DimensionError("correlation parameters must be m x m");
  }
  if (j1 < 1 || j2 < j1) throw InvalidArgument("octave range must satisfy 1 <= j1 <= j2");
  for (int j = j1; j <= j2; ++j) {
    if (detail_count(n, j) < 1) {
      throw SeriesTooShort("no wavelet coefficients at octave " + std::to_string(j) +
                           " for n=" + std::to_string(n));
    }
  }
  cascade_ = detail::cascade_for(j1, j2, n);
  nk_ = m * (m + 1) / 2;
  const int J = j2 - j1 + 1;

  std::vector<double> kalpha(static_cast<std::size_t>(nk_));
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) kalpha[kernel_index(a, b)] = params_.alpha(a, b);
  }

  diag_.assign(static_cast<std::size_t>(nk_ * J), 0.0);
  for (int k = 0; k < nk_; ++k) {
    for (int j = j1; j <= j2; ++j) {
      const double v = detail::kernel_direct(cascade_->block(j, j), kalpha[k], 0.0);
      if (!(v > 0.0)) {
        throw InvalidArgument("wavelet variance normaliser is not positive (alpha=" +
                              std::to_string(kalpha[k]) + ")");
      }
      diag_[static_cast<std::size_t>(k * J + (j - j1))] = v;
    }
  }

  const std::size_t nb = cascade_->blocks.size();
  gram_zero_.assign(nb, std::vector<double>(static_cast<std::size_t>(nk_ * nk_), 0.0));
  gram_rest_.assign(nb, std::vector<double>(static_cast<std::size_t>(nk_ * nk_), 0.0));

  // Same-octave lag-0 terms.
  for (int j = j1; j <= j2; ++j) {
    const double nj = static_cast<double>(count(j));
    auto& gz = gram_zero_[cascade_->block_index(j, j)];
    for (int a = 0; a < nk_; ++a) {
      for (int b = 0; b < nk_; ++b) gz[a * nk_ + b] = nj * diag_norm(a, j) * diag_norm(b, j);
    }
  }
  if (coupling_ == Coupling::Impulse) return;

  // Shared |t|^alpha tables, one per kernel, wide enough for every near field.
  long R = 0;
  for (const auto& b : cascade_->blocks) {
    const long step = 1L << b.j;
    const double lo = (b.u0 - detail::kFarField * b.U - static_cast<double>(b.offset)) / step;
    const double hi = (b.u0 + detail::kFarField * b.U - static_cast<double>(b.offset)) / step;
    const long vlo = std::max(b.vmin, static_cast<long>(std::floor(lo)));
    const long vhi = std::min(b.vmax, static_cast<long>(std::ceil(hi)));
    if (vlo > vhi) continue;
    const long tmin = step * vlo + b.offset - b.umax;
    const long tmax = step * vhi + b.offset - b.umax + static_cast<long>(b.xr.size()) - 1;
    R = std::max({R, std::abs(tmin), std::abs(tmax)});
  }
  std::vector<std::vector<double>> table(static_cast<std::size_t>(nk_));
  std::vector<std::vector<double>> binom(static_cast<std::size_t>(nk_));
  for (int k = 0; k < nk_; ++k) {
    table[k].resize(static_cast<std::size_t>(2 * R + 1));
    for (long t = -R; t <= R; ++t) {
      table[k][static_cast<std::size_t>(t + R)] = detail::pow_abs(static_cast<double>(t), kalpha[k]);
    }
    binom[k] = detail::binomials(kalpha[k]);
  }

  const auto& kern = simd::kernels();
  parallel_for(nb, [&](std::size_t bi) {
    const auto& b = cascade_->blocks[bi];
    const long step = 1L << b.j;
    const long nv = b.vmax - b.vmin + 1;
    const double lo = (b.u0 - detail::kFarField * b.U - static_cast<double>(b.offset)) / step;
    const double hi = (b.u0 + detail::kFarField * b.U - static_cast<double>(b.offset)) / step;
    const long vlo = std::max(b.vmin, static_cast<long>(std::floor(lo)));
    const long vhi = std::min(b.vmax, static_cast<long>(std::ceil(hi)));

    std::vector<std::vector<double>> kn(static_cast<std::size_t>(nk_),
                                        std::vector<double>(static_cast<std::size_t>(nv)));
    for (int k = 0; k < nk_; ++k) {
      auto& out = kn[k];
      if (vlo <= vhi) {
        const long t0 = step * vlo + b.offset - b.umax;
        kern.strided_correlate(b.xr.data(), b.xr.size(), table[k].data() + (t0 + R),
                               static_cast<std::size_t>(step),
                               static_cast<std::size_t>(vhi - vlo + 1),
                               out.data() + (vlo - b.vmin));
        for (long v = vlo; v <= vhi; ++v) out[v - b.vmin] = -out[v - b.vmin];
      }
      for (long v = b.vmin; v <= b.vmax; ++v) {
        if (v >= vlo && v <= vhi) continue;
        out[v - b.vmin] = detail::kernel_far(b, kalpha[k], binom[k],
                                            static_cast<double>(step * v + b.offset));
      }
      // Documented truncation: negligible lags relative to the normaliser.
      const double thr = 1e-12 * std::sqrt(diag_norm(k, b.j) * diag_norm(k, b.jp));
      for (auto& v : out) {
        if (std::abs(v) < thr) v = 0.0;
      }
    }

    const bool same = b.j == b.jp;
    auto& gr = gram_rest_[bi];
    for (long v = b.vmin; v <= b.vmax; ++v) {
      const std::size_t i = static_cast<std::size_t>(v - b.vmin);
      const double mu = b.mult[i];
      if (mu == 0.0 || (same && v == 0)) continue;
      for (int a = 0; a < nk_; ++a) {
        const double ka = kn[a][i];
        if (ka == 0.0) continue;
        for (int c = a; c < nk_; ++c) gr[a * nk_ + c] += mu * ka * kn[c][i];
      }
    }
    for (int a = 0; a < nk_; ++a) {
      for (int c = 0; c < a; ++c) gr[a * nk_ + c] = gr[c * nk_ + a];
    }
  });
}

int WaveletCorrelation::kernel_index(int a, int b) const {
  if (a > b) std::swap(a, b);
  const int m = params_.m();
  return a * m - a * (a - 1) / 2 + (b - a);
}

double WaveletCorrelation::diag_norm(int kid, int j) const {
  return diag_[static_cast<std::size_t>(kid * (j2_ - j1_ + 1) + (j - j1_))];
}

std::size_t WaveletCorrelation::count(int j) const { return cascade_->counts[j - j1_]; }

double WaveletCorrelation::kernel(int j, int jp, double alpha, long delta) const {
  if (j <= jp) return detail::kernel_direct(cascade_->block(j, jp), alpha, static_cast<double>(delta));
  return detail::kernel_direct(cascade_->block(jp, j), alpha, static_cast<double>(-delta));
}

double WaveletCorrelation::r(int q1, int q2, int j, long k, int jp, long kp) const {
  const long pos = (k << j) + cascade_->offsets[j - j1_];
  const long posp = (kp << jp) + cascade_->offsets[jp - j1_];
  const long delta = pos - posp;
  const bool self = j == jp && delta == 0;
  if (q1 == q2 && self) return 1.0;
  double kn;
  if (coupling_ == Coupling::Impulse && !self) {
    kn = 0.0;
  } else {
    kn = self ? diag_norm(kernel_index(q1, q2), j) : kernel(j, jp, params_.alpha(q1, q2), delta);
  }
  const double norm =
      std::sqrt(diag_norm(kernel_index(q1, q1), j) * diag_norm(kernel_index(q2, q2), jp));
  return params_.rho(q1, q2) * kn / norm;
}

double WaveletCorrelation::self_corr(int q1, int q2, int j) const {
  return r(q1, q2, j, 0, j, 0);
}

WaveletCorrelation::Terms WaveletCorrelation::cov_terms(int q1, int q2, int q3, int q4,
                                                       const RegressionWeights& w) const {
  if (w.j1 != j1_ || w.j2 != j2_) throw InvalidArgument("weights do not match the octave range");
  const auto& P = params_.rho;
  const int k13 = kernel_index(q1, q3), k24 = kernel_index(q2, q4);
  const int k14 = kernel_index(q1, q4), k23 = kernel_index(q2, q3);
  const int k12 = kernel_index(q1, q2), k34 = kernel_index(q3, q4);
  const double c1 = P(q1, q3) * P(q2, q4);
  const double c2 = P(q1, q4) * P(q2, q3);
  const double c0 = P(q1, q2) * P(q3, q4);
  auto numer = [&](const std::vector<double>& g) {
    return c1 * g[k13 * nk_ + k24] + c2 * g[k14 * nk_ + k23];
  };
  Terms t;
  for (int j = j1_; j <= j2_; ++j) {
    for (int jp = j1_; jp <= j2_; ++jp) {
      const std::size_t bi = cascade_->block_index(std::min(j, jp), std::max(j, jp));
      const double den = c0 * diag_norm(k12, j) * diag_norm(k34, jp);
      const double scale = w.at(j) * w.at(jp) /
                           (static_cast<double>(count(j)) * static_cast<double>(count(jp)) * den);
      if (j == jp) {
        t.term1 += scale * numer(gram_zero_[bi]);
        t.term2 += scale * numer(gram_rest_[bi]);
      } else {
        t.term3 += scale * numer(gram_rest_[bi]);
      }
    }
  }
  const double f = std::numbers::log2e * std::numbers::log2e;
  t.term1 *= f;
  t.term2 *= f;
  t.term3 *= f;
  return t;
}

namespace {
bool same_pair(PairIndex x, PairIndex y) {
  return std::min(x.q1, x.q2) == std::min(y.q1, y.q2) && std::max(x.q1, x.q2) == std::max(y.q1, y.q2);
}
}  // namespace

const CovEntry* EstimatorCovariance::entry(PairIndex a, PairIndex b) const {
  for (const auto& e : cov) {
    if ((same_pair(e.a, a) && same_pair(e.b, b)) || (same_pair(e.a, b) && same_pair(e.b, a))) {
      return &e;
    }
  }
  return nullptr;
}

std::optional<double> EstimatorCovariance::lookup(PairIndex a, PairIndex b) const {
  if (const CovEntry* e = entry(a, b)) return e->value;
  return std::nullopt;
}

double var_delta(const EstimatorCovariance& cov, int q1, int q2) {
  auto get = [&](PairIndex a, PairIndex b) {
    const auto v = cov.lookup(a, b);
    if (!v) throw InvalidArgument("covariance entry missing for Var(delta) combination");
    return *v;
  };
  const PairIndex p11{q1, q1}, p22{q2, q2}, p12{q1, q2};
  return 0.25 * (get(p11, p11) + get(p22, p22)) + get(p12, p12) + 0.5 * get(p11, p22) -
         get(p11, p12) - get(p22, p12);
}

EstimatorCovariance estimator_covariance(const WaveletCorrelation& wc,
                                         const RegressionWeights& w, bool with_terms) {
  const int m = wc.params().m();
  EstimatorCovariance out;
  out.m = m;
  std::vector<PairIndex> pairs;
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) pairs.push_back({a, b});
  }
  for (std::size_t x = 0; x < pairs.size(); ++x) {
    for (std::size_t y = x; y < pairs.size(); ++y) {
      const auto t = wc.cov_terms(pairs[x].q1, pairs[x].q2, pairs[y].q1, pairs[y].q2, w);
      CovEntry e{pairs[x], pairs[y], t.total(), std::nullopt};
      if (with_terms) e.terms = t;
      out.cov.push_back(e);
    }
  }
  out.var_alpha.resize(m, m);
  out.var_delta = Eigen::MatrixXd::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      out.var_alpha(a, b) = out.var_alpha(b, a) = *out.lookup({a, b}, {a, b});
      if (a != b) out.var_delta(a, b) = out.var_delta(b, a) = var_delta(out, a, b);
    }
  }
  return out;
}

double cov_alpha(const CorrelationParams& params, int j1, int j2, const RegressionWeights& w,
                 std::size_t n, PairIndex a, PairIndex b) {
  return WaveletCorrelation(params, j1, j2, n).cov(a.q1, a.q2, b.q1, b.q2, w);
}

WaveletCorrelation::Terms term_decomposition(const CorrelationParams& params, int j1, int j2,
                                             const RegressionWeights& w, std::size_t n,
                                             PairIndex a, PairIndex b) {
  return WaveletCorrelation(params, j1, j2, n).cov_terms(a.q1, a.q2, b.q1, b.q2, w);
}

double first_order(const CorrelationParams& params, int j1, int j2, const RegressionWeights& w,
                   std::size_t n, FirstOrder which, int q1, int q2) {
  const WaveletCorrelation wc(params, j1, j2, n, Coupling::Impulse);
  const bool needs_r = which != FirstOrder::VarAlphaAuto && which != FirstOrder::CovAutoCross;
  double s = 0.0;
  for (int j = j1; j <= j2; ++j) {
    const double base = w.at(j) * w.at(j) / static_cast<double>(wc.count(j));
    const double r = needs_r ? wc.self_corr(q1, q2, j) : 1.0;
    const double r2 = r * r;
    if ((which == FirstOrder::VarAlphaCross || which == FirstOrder::VarDelta) && r2 == 0.0) {
      throw InfiniteVariance("first-order variance diverges: r(j,0;j,0) = 0 at octave " +
                             std::to_string(j));
    }
    switch (which) {
      case FirstOrder::VarAlphaAuto:
      case FirstOrder::CovAutoCross:
        s += 2.0 * base;
        break;
      case FirstOrder::VarAlphaCross:
        s += base * (1.0 + 1.0 / r2);
        break;
      case FirstOrder::CovAutoAuto:
        s += 2.0 * base * r2;
        break;
      case FirstOrder::VarDelta:
        s += base * (r2 + 1.0 / r2 - 2.0);
        break;
    }
  }
  return std::numbers::log2e * std::numbers::log2e * s;
}

namespace {
nlohmann::json mat(const Eigen::MatrixXd& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}
}  // namespace

nlohmann::json covariance_to_json(const EstimatorCovariance& cov) {
  nlohmann::json j;
  j["var_alpha"] = mat(cov.var_alpha);
  j["var_delta"] = mat(cov.var_delta);
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : cov.cov) {
    nlohmann::json x{{"pair1", {e.a.q1 + 1, e.a.q2 + 1}},
                     {"pair2", {e.b.q1 + 1, e.b.q2 + 1}},
                     {"value", e.value}};
    if (e.terms) {
      const double tot = e.terms->total();
      x["terms"] = {e.terms->term1 / tot, e.terms->term2 / tot, e.terms->term3 / tot};
    }
    entries.push_back(x);
  }
  j["cov"] = entries;
  return j;
}

nlohmann::json PluginReport::to_json() const {
  nlohmann::json j = covariance_to_json(cov);
  j["ci_level"] = level;
  j["alpha_ci"] = {{"lo", mat(alpha_lo)}, {"hi", mat(alpha_hi)}};
  j["delta_ci"] = {{"lo", mat(delta_lo)}, {"hi", mat(delta_hi)}};
  return j;
}

PluginReport plugin_covariance(const ScalingEstimate& est, const RegressionWeights& w,
                               double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("confidence level must be in (0,1)");
  for (int a = 0; a < est.m; ++a) {
    for (int b = a + 1; b < est.m; ++b) {
      if (std::abs(est.rho(a, b)) < 1e-6) {
        throw InfiniteVariance("plug-in variance diverges: |rho_hat(" + std::to_string(a + 1) +
                               "," + std::to_string(b + 1) + ")| < 1e-6");
      }
    }
  }
  const WaveletCorrelation wc(plugin_params(est), w.j1, w.j2, est.n);
  PluginReport rep;
  rep.cov = estimator_covariance(wc, w);
  rep.level = level;
  const double z = stats::normal_quantile(1.0 - (1.0 - level) / 2.0);
  const Eigen::MatrixXd sa = rep.cov.var_alpha.cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd sd = rep.cov.var_delta.cwiseMax(0.0).cwiseSqrt();
  rep.alpha_lo = est.alpha - z * sa;
  rep.alpha_hi = est.alpha + z * sa;
  rep.delta_lo = est.delta - z * sd;
  rep.delta_hi = est.delta + z * sd;
  return rep;
}

}  // namespace hfbm
