#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "gb2ss/errors.hpp"
#include "gb2ss/samplers.hpp"

namespace gb2ss {
namespace {

constexpr double kFloorLogTarget = -1e300;
constexpr int kBrentBits = 30;
constexpr std::uintmax_t kBrentMaxIter = 60;
constexpr double kFallbackScale = 0.1;

using VecFn = std::function<double(const VectorXd&)>;

// Maximize s -> f(x + s * dir) over [-width, width], widening the bracket while
// the optimum sits on its edge. Returns (s*, f(x + s* dir)).
std::pair<double, double> line_maximize(const VecFn& f, const VectorXd& x,
                                        const VectorXd& dir, double width) {
  auto neg = [&](double s) {
    const double v = f(x + s * dir);
    return -(std::isfinite(v) ? v : kFloorLogTarget);
  };
  std::pair<double, double> best{0.0, 0.0};
  for (int widen = 0; widen < 6; ++widen) {
    std::uintmax_t iters = kBrentMaxIter;
    best = boost::math::tools::brent_find_minima(neg, -width, width,
                                                 kBrentBits, iters);
    if (std::fabs(best.first) < 0.98 * width) break;
    width *= 4.0;
  }
  return {best.first, -best.second};
}

void polish(const VecFn& f, VectorXd& x, double& fx, const TarbmhConfig& cfg) {
  const Eigen::Index n = x.size();
  VectorXd width = VectorXd::Constant(n, cfg.anneal_move_scale);
  for (int cycle = 0; cycle < cfg.refine_iters; ++cycle) {
    const VectorXd start = x;
    const double f_start = fx;
    for (Eigen::Index i = 0; i < n; ++i) {
      VectorXd dir = VectorXd::Zero(n);
      dir[i] = 1.0;
      const auto [s, val] = line_maximize(f, x, dir, width[i]);
      if (val > fx) {
        x[i] += s;
        fx = val;
      }
      width[i] = std::max(4.0 * std::fabs(s), 1e-3);
    }
    const VectorXd d = x - start;
    const double dn = d.norm();
    if (n > 1 && dn > 0.0) {
      // Pattern move along the net displacement of this cycle.
      const VectorXd dir = d / dn;
      const auto [s, val] = line_maximize(f, x, dir, std::max(2.0 * dn, 1e-3));
      if (val > fx) {
        x += s * dir;
        fx = val;
      }
    }
    if (fx - f_start < 1e-10 && (x - start).lpNorm<Eigen::Infinity>() < 1e-7) {
      break;
    }
  }
}

}  // namespace

void TarbmhConfig::validate() const {
  if (!(dof > 2.0)) throw DataError("tarbmh: dof must exceed 2");
  if (!(anneal_cooling > 0.0 && anneal_cooling < 1.0)) {
    throw DataError("tarbmh: cooling factor must lie in (0, 1)");
  }
  if (!(anneal_initial_temp > 0.0)) {
    throw DataError("tarbmh: initial temperature must be positive");
  }
  if (anneal_steps < 0 || refine_iters < 0) {
    throw DataError("tarbmh: step counts must be non-negative");
  }
  if (!(anneal_move_scale > 0.0)) {
    throw DataError("tarbmh: move scale must be positive");
  }
  if (!(fd_step > 1e-6 && fd_step < 1e-2)) {
    throw DataError("tarbmh: fd_step must lie in (1e-6, 1e-2)");
  }
}

BlockPartition random_block_partition(Rng& rng) {
  std::uniform_int_distribution<int> pick(1, 3);
  const int partner = pick(rng);
  Block first{0, partner};
  Block second{};
  int k = 0;
  for (int i = 1; i < 4; ++i) {
    if (i != partner) second[k++] = i;
  }
  std::bernoulli_distribution flip(0.5);
  if (flip(rng)) return {second, first};
  return {first, second};
}

int block_index(const Block& block) {
  static constexpr int kIndex[4][4] = {
      {-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
  return kIndex[block[0]][block[1]];
}

std::uint64_t PeriodAcceptance::proposals() const {
  std::uint64_t s = 0;
  for (const auto& b : blocks) s += b.proposals;
  return s;
}

std::uint64_t PeriodAcceptance::accepts() const {
  std::uint64_t s = 0;
  for (const auto& b : blocks) s += b.accepts;
  return s;
}

std::uint64_t PeriodAcceptance::fallbacks() const {
  std::uint64_t s = 0;
  for (const auto& b : blocks) s += b.fallbacks;
  return s;
}

double PeriodAcceptance::rate() const {
  const auto p = proposals();
  return p == 0 ? 0.0 : static_cast<double>(accepts()) / static_cast<double>(p);
}

double AcceptanceStats::overall_rate() const {
  std::uint64_t p = 0, a = 0;
  for (const auto& s : periods) {
    p += s.proposals();
    a += s.accepts();
  }
  return p == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(p);
}

VectorXd anneal_maximize(const VecFn& f, const VectorXd& x0,
                         const TarbmhConfig& cfg, Rng& rng) {
  VectorXd x = x0;
  double fx = f(x);
  VectorXd best = x;
  double f_best = fx;
  double temp = cfg.anneal_initial_temp;
  for (int step = 0; step < cfg.anneal_steps; ++step) {
    VectorXd cand = x;
    for (Eigen::Index i = 0; i < cand.size(); ++i) {
      cand[i] += cfg.anneal_move_scale * standard_normal(rng);
    }
    const double fc = f(cand);
    const double u = uniform_open(rng);
    if (std::isfinite(fc) &&
        (!std::isfinite(fx) || fc >= fx || std::log(u) < (fc - fx) / temp)) {
      x = cand;
      fx = fc;
      if (fx > f_best || !std::isfinite(f_best)) {
        best = x;
        f_best = fx;
      }
    }
    temp *= cfg.anneal_cooling;
  }
  if (std::isfinite(f_best)) polish(f, best, f_best, cfg);
  return best;
}

MatrixXd fd_hessian(const VecFn& f, const VectorXd& x, double rel_step) {
  const Eigen::Index n = x.size();
  VectorXd step(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    step[i] = rel_step * std::max(std::fabs(x[i]), 1.0);
  }
  const double f0 = f(x);
  MatrixXd h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    VectorXd xp = x, xm = x;
    xp[i] += step[i];
    xm[i] -= step[i];
    h(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (step[i] * step[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      VectorXd pp = x, pm = x, mp = x, mm = x;
      pp[i] += step[i]; pp[j] += step[j];
      pm[i] += step[i]; pm[j] -= step[j];
      mp[i] -= step[i]; mp[j] += step[j];
      mm[i] -= step[i]; mm[j] -= step[j];
      const double v =
          (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * step[i] * step[j]);
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return h;
}

TailoredProposal tailor_proposal(const LogTarget& target, const Block& block,
                                 const Vec4& h_current,
                                 const TarbmhConfig& cfg, Rng& rng) {
  const VecFn restricted = [&](const VectorXd& y) {
    Vec4 h = h_current;
    h[block[0]] = y[0];
    h[block[1]] = y[1];
    return target(h);
  };
  VectorXd y0(2);
  y0 << h_current[block[0]], h_current[block[1]];
  const VectorXd mode = anneal_maximize(restricted, y0, cfg, rng);

  TailoredProposal out;
  out.mode = mode;
  const MatrixXd hess = fd_hessian(restricted, mode, cfg.fd_step);
  if (hess.allFinite()) {
    try {
      out.scale = inverse_pd(SymMatrix(-hess), Jitter::RetryOnce);
      out.chol = cholesky(out.scale, Jitter::RetryOnce);
      return out;
    } catch (const NotPositiveDefinite&) {
    }
  }
  out.fallback = true;
  out.scale = SymMatrix::identity(2, kFallbackScale);
  out.chol = cholesky(out.scale);
  return out;
}

double log_acceptance_ratio(double log_target_cand, double log_target_cur,
                            double log_q_cand, double log_q_cur) {
  return (log_target_cand + log_q_cur) - (log_target_cur + log_q_cand);
}

bool mh_accept(double log_target_cand, double log_target_cur, double log_alpha,
               double u) {
  if (!std::isfinite(log_target_cand)) return false;
  if (!std::isfinite(log_target_cur)) return true;
  return std::log(u) <= std::min(log_alpha, 0.0);
}

Vec4 tarbmh_sweep(const LogTarget& target, const Vec4& h_current,
                  const TarbmhConfig& cfg, Rng& rng, PeriodAcceptance& stats) {
  Vec4 h = h_current;
  const BlockPartition partition = random_block_partition(rng);
  for (const Block& block : partition) {
    BlockCounters& counters = stats.blocks[block_index(block)];
    const TailoredProposal prop = tailor_proposal(target, block, h, cfg, rng);
    if (prop.fallback) ++counters.fallbacks;
    const VectorXd cand_block =
        sample_mvt_chol(VectorXd(prop.mode), prop.chol, cfg.dof, rng);
    Vec4 cand = h;
    cand[block[0]] = cand_block[0];
    cand[block[1]] = cand_block[1];
    VectorXd cur_block(2);
    cur_block << h[block[0]], h[block[1]];

    const double lp_cand = target(cand);
    const double lp_cur = target(h);
    const VectorXd mode = prop.mode;
    const double lq_cand =
        mvt_log_density_chol(cand_block, mode, prop.chol, cfg.dof);
    const double lq_cur =
        mvt_log_density_chol(cur_block, mode, prop.chol, cfg.dof);
    const double log_alpha =
        log_acceptance_ratio(lp_cand, lp_cur, lq_cand, lq_cur);
    const double u = uniform_open(rng);
    ++counters.proposals;
    if (mh_accept(lp_cand, lp_cur, log_alpha, u)) {
      h = cand;
      ++counters.accepts;
    }
  }
  return h;
}

}  // namespace gb2ss
