#include "dhawkes/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "dhawkes/parallel.hpp"

namespace dhawkes {

std::vector<double> Draws::column(std::size_t d) const {
  std::vector<double> out(total());
  for (std::size_t c = 0; c < chains; ++c)
    for (std::size_t i = 0; i < iterations; ++i) out[c * iterations + i] = at(c, i, d);
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxDeltaH = 1000.0;

double log_sum_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void add_to(Vec& a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

Vec sum(const Vec& a, const Vec& b) {
  Vec out = a;
  add_to(out, b);
  return out;
}

struct PhasePoint {
  Vec q, p, g;  // position, momentum, gradient of the log density
  double logp = -kInf;
};

// Streaming mean and variance.
class Welford {
 public:
  explicit Welford(std::size_t dim) : mean_(dim, 0.0), m2_(dim, 0.0) {}
  void add(const Vec& x) {
    ++n_;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - mean_[i];
      mean_[i] += d / static_cast<double>(n_);
      m2_[i] += d * (x[i] - mean_[i]);
    }
  }
  std::size_t count() const { return n_; }
  Vec variance() const {
    Vec v(m2_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = m2_[i] / static_cast<double>(n_ - 1);
    return v;
  }
  void reset() {
    n_ = 0;
    std::fill(mean_.begin(), mean_.end(), 0.0);
    std::fill(m2_.begin(), m2_.end(), 0.0);
  }

 private:
  std::size_t n_ = 0;
  Vec mean_, m2_;
};

class DualAveraging {
 public:
  void restart(double step) {
    counter_ = 0;
    s_bar_ = 0.0;
    x_bar_ = 0.0;
    mu_ = std::log(10.0 * step);
  }
  double learn(double accept, double delta) {
    ++counter_;
    accept = std::min(1.0, accept);
    const double n = static_cast<double>(counter_);
    const double w = 1.0 / (n + t0_);
    s_bar_ = (1.0 - w) * s_bar_ + w * (delta - accept);
    const double x = mu_ - s_bar_ * std::sqrt(n) / gamma_;
    const double xw = std::pow(n, -kappa_);
    x_bar_ = (1.0 - xw) * x_bar_ + xw * x;
    return std::exp(x);
  }
  double final_step() const { return std::exp(x_bar_); }

 private:
  std::size_t counter_ = 0;
  double s_bar_ = 0.0, x_bar_ = 0.0, mu_ = 0.0;
  double gamma_ = 0.05, t0_ = 10.0, kappa_ = 0.75;
};

class Nuts {
 public:
  Nuts(const LogDensityFn& f, std::size_t dim, Rng& rng, int max_depth)
      : f_(f), dim_(dim), rng_(rng), max_depth_(max_depth), inv_metric_(dim, 1.0) {}

  void set_position(const Vec& q) {
    z_.q = q;
    z_.p.assign(dim_, 0.0);
    z_.g.assign(dim_, 0.0);
    evaluate(z_);
    if (!std::isfinite(z_.logp)) throw std::runtime_error("initial point has non-finite log density");
  }

  const Vec& position() const { return z_.q; }
  double step() const { return eps_; }
  void set_step(double e) { eps_ = e; }
  const Vec& inverse_metric() const { return inv_metric_; }
  void set_inverse_metric(Vec m) { inv_metric_ = std::move(m); }
  std::size_t evaluations() const { return evaluations_; }

  void init_step() {
    const PhasePoint start = z_;
    sample_momentum();
    double H0 = hamiltonian(z_);
    leapfrog(z_, eps_);
    double delta = H0 - hamiltonian(z_);
    const int direction = delta > std::log(0.8) ? 1 : -1;
    for (int it = 0; it < 100; ++it) {
      z_ = start;
      sample_momentum();
      H0 = hamiltonian(z_);
      leapfrog(z_, eps_);
      double h = hamiltonian(z_);
      if (std::isnan(h)) h = kInf;
      delta = H0 - h;
      if (direction == 1 && !(delta > std::log(0.8))) break;
      if (direction == -1 && !(delta < std::log(0.8))) break;
      eps_ = direction == 1 ? 2.0 * eps_ : 0.5 * eps_;
      if (eps_ > 1e7) throw std::runtime_error("step size diverged during initialisation: posterior may be improper");
      if (eps_ == 0.0) throw std::runtime_error("step size collapsed to zero during initialisation");
    }
    z_ = start;
  }

  struct Transition {
    double accept = 0.0;
    bool divergent = false;
    int depth = 0;
  };

  Transition transition() {
    sample_momentum();
    divergent_ = false;
    PhasePoint z_fwd = z_, z_bck = z_, z_sample = z_, z_propose = z_;

    Vec p_fwd_fwd = z_.p, p_fwd_bck = z_.p, p_bck_fwd = z_.p, p_bck_bck = z_.p;
    const Vec ps = sharp(z_.p);
    Vec ps_fwd_fwd = ps, ps_fwd_bck = ps, ps_bck_fwd = ps, ps_bck_bck = ps;
    Vec rho = z_.p;
    double log_sum_weight = 0.0;
    const double H0 = hamiltonian(z_);
    int depth = 0;
    std::size_t n_leapfrog = 0;
    double sum_metro = 0.0;

    while (depth < max_depth_) {
      Vec rho_fwd(dim_, 0.0), rho_bck(dim_, 0.0);
      bool valid = false;
      double lsw_subtree = -kInf;
      if (rng_.uniform() > 0.5) {
        z_ = z_fwd;
        rho_bck = rho;
        p_bck_fwd = p_fwd_bck;
        ps_bck_fwd = ps_fwd_bck;
        valid = build_tree(depth, z_propose, ps_fwd_bck, ps_fwd_fwd, rho_fwd, p_fwd_bck, p_fwd_fwd, H0, 1.0,
                           n_leapfrog, lsw_subtree, sum_metro);
        z_fwd = z_;
      } else {
        z_ = z_bck;
        rho_fwd = rho;
        p_fwd_bck = p_bck_fwd;
        ps_fwd_bck = ps_bck_fwd;
        valid = build_tree(depth, z_propose, ps_bck_fwd, ps_bck_bck, rho_bck, p_bck_fwd, p_bck_bck, H0, -1.0,
                           n_leapfrog, lsw_subtree, sum_metro);
        z_bck = z_;
      }
      if (!valid) break;
      ++depth;
      if (lsw_subtree > log_sum_weight) {
        z_sample = z_propose;
      } else if (rng_.uniform() < std::exp(lsw_subtree - log_sum_weight)) {
        z_sample = z_propose;
      }
      log_sum_weight = log_sum_exp(log_sum_weight, lsw_subtree);
      rho = sum(rho_bck, rho_fwd);
      bool persist = criterion(ps_bck_bck, ps_fwd_fwd, rho);
      persist = persist && criterion(ps_bck_bck, ps_fwd_bck, sum(rho_bck, p_fwd_bck));
      persist = persist && criterion(ps_bck_fwd, ps_fwd_fwd, sum(rho_fwd, p_bck_fwd));
      if (!persist) break;
    }
    z_ = z_sample;
    Transition t;
    t.accept = n_leapfrog == 0 ? 0.0 : sum_metro / static_cast<double>(n_leapfrog);
    t.divergent = divergent_;
    t.depth = depth;
    return t;
  }

 private:
  void evaluate(PhasePoint& z) {
    ++evaluations_;
    double v = f_(z.q, z.g);
    if (std::isnan(v)) v = -kInf;
    z.logp = v;
  }

  void sample_momentum() {
    std::normal_distribution<double> normal;
    for (std::size_t i = 0; i < dim_; ++i) z_.p[i] = normal(rng_) / std::sqrt(inv_metric_[i]);
  }

  Vec sharp(const Vec& p) const {
    Vec out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) out[i] = inv_metric_[i] * p[i];
    return out;
  }

  double hamiltonian(const PhasePoint& z) const {
    double kinetic = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) kinetic += inv_metric_[i] * z.p[i] * z.p[i];
    return -z.logp + 0.5 * kinetic;
  }

  void leapfrog(PhasePoint& z, double e) {
    for (std::size_t i = 0; i < dim_; ++i) z.p[i] += 0.5 * e * z.g[i];
    for (std::size_t i = 0; i < dim_; ++i) z.q[i] += e * inv_metric_[i] * z.p[i];
    evaluate(z);
    if (!std::isfinite(z.logp)) return;  // the Hamiltonian is already infinite
    for (std::size_t i = 0; i < dim_; ++i) z.p[i] += 0.5 * e * z.g[i];
  }

  static bool criterion(const Vec& ps_minus, const Vec& ps_plus, const Vec& rho) {
    return dot(ps_plus, rho) > 0.0 && dot(ps_minus, rho) > 0.0;
  }

  bool build_tree(int depth, PhasePoint& z_propose, Vec& ps_beg, Vec& ps_end, Vec& rho, Vec& p_beg, Vec& p_end,
                  double H0, double sign, std::size_t& n_leapfrog, double& log_sum_weight, double& sum_metro) {
    if (depth == 0) {
      leapfrog(z_, sign * eps_);
      ++n_leapfrog;
      double h = hamiltonian(z_);
      if (std::isnan(h)) h = kInf;
      if (h - H0 > kMaxDeltaH) divergent_ = true;
      log_sum_weight = log_sum_exp(log_sum_weight, H0 - h);
      sum_metro += H0 - h > 0.0 ? 1.0 : std::exp(H0 - h);
      z_propose = z_;
      ps_beg = sharp(z_.p);
      ps_end = ps_beg;
      add_to(rho, z_.p);
      p_beg = z_.p;
      p_end = p_beg;
      return !divergent_;
    }

    Vec ps_init_end(dim_), p_init_end(dim_), rho_init(dim_, 0.0);
    double lsw_init = -kInf;
    if (!build_tree(depth - 1, z_propose, ps_beg, ps_init_end, rho_init, p_beg, p_init_end, H0, sign, n_leapfrog,
                    lsw_init, sum_metro))
      return false;

    PhasePoint z_propose_final = z_;
    Vec ps_final_beg(dim_), p_final_beg(dim_), rho_final(dim_, 0.0);
    double lsw_final = -kInf;
    if (!build_tree(depth - 1, z_propose_final, ps_final_beg, ps_end, rho_final, p_final_beg, p_end, H0, sign,
                    n_leapfrog, lsw_final, sum_metro))
      return false;

    const double lsw_subtree = log_sum_exp(lsw_init, lsw_final);
    log_sum_weight = log_sum_exp(log_sum_weight, lsw_subtree);
    if (lsw_final > lsw_subtree) {
      z_propose = z_propose_final;
    } else if (rng_.uniform() < std::exp(lsw_final - lsw_subtree)) {
      z_propose = z_propose_final;
    }

    const Vec rho_subtree = sum(rho_init, rho_final);
    add_to(rho, rho_subtree);
    bool persist = criterion(ps_beg, ps_end, rho_subtree);
    persist = persist && criterion(ps_beg, ps_final_beg, sum(rho_init, p_final_beg));
    persist = persist && criterion(ps_init_end, ps_end, sum(rho_final, p_init_end));
    return persist;
  }

  const LogDensityFn& f_;
  std::size_t dim_;
  Rng& rng_;
  int max_depth_;
  Vec inv_metric_;
  double eps_ = 1.0;
  PhasePoint z_;
  bool divergent_ = false;
  std::size_t evaluations_ = 0;
};

// Warmup schedule: a step-size-only opening buffer, doubling metric windows,
// and a step-size-only closing buffer.
struct Schedule {
  std::size_t init_buffer = 75, term_buffer = 50, base_window = 25;
  bool adapt_metric = true;
};

Schedule make_schedule(std::size_t warmup) {
  Schedule s;
  if (warmup < 20) {
    s.adapt_metric = false;
    return s;
  }
  if (s.init_buffer + s.term_buffer + s.base_window > warmup) {
    s.init_buffer = static_cast<std::size_t>(0.15 * static_cast<double>(warmup));
    s.term_buffer = static_cast<std::size_t>(0.1 * static_cast<double>(warmup));
    s.base_window = warmup - (s.init_buffer + s.term_buffer);
  }
  return s;
}

void run_chain(const LogDensityFn& f, const InitFn& init, std::size_t dim, const SamplerConfig& config,
               std::size_t chain, Draws& draws, ChainStats& stats) {
  Rng rng = Rng::derive(config.seed, {chain});
  Nuts nuts(f, dim, rng, config.max_depth);
  {
    Vec q = init(rng);
    if (q.size() != dim) throw std::invalid_argument("initial point has the wrong dimension");
    nuts.set_position(q);
  }
  nuts.init_step();
  DualAveraging da;
  da.restart(nuts.step());

  const Schedule sched = make_schedule(config.warmup);
  const std::size_t stage_end = config.warmup - (sched.adapt_metric ? sched.term_buffer : 0);
  std::size_t window = sched.base_window;
  std::size_t window_end = sched.init_buffer + window;
  Welford estimator(dim);

  for (std::size_t it = 0; it < config.warmup; ++it) {
    const auto t = nuts.transition();
    nuts.set_step(da.learn(t.accept, config.target_accept));
    if (!sched.adapt_metric) continue;
    if (it >= sched.init_buffer && it < stage_end) estimator.add(nuts.position());
    if (it + 1 == window_end && window_end <= stage_end) {
      const double n = static_cast<double>(estimator.count());
      Vec var = estimator.variance();
      for (double& v : var) v = (n / (n + 5.0)) * v + 1e-3 * (5.0 / (n + 5.0));
      nuts.set_inverse_metric(std::move(var));
      estimator.reset();
      nuts.init_step();
      da.restart(nuts.step());
      if (window_end < stage_end) {
        window *= 2;
        window_end = it + 1 + window;
        if (window_end + 2 * window >= stage_end) window_end = stage_end;
      }
    }
  }
  if (config.warmup > 0) nuts.set_step(da.final_step());

  double accept_total = 0.0;
  for (std::size_t it = 0; it < config.iterations; ++it) {
    const auto t = nuts.transition();
    accept_total += t.accept;
    if (t.divergent) ++stats.divergences;
    if (t.depth >= config.max_depth) ++stats.max_depth_hits;
    const Vec& q = nuts.position();
    std::copy(q.begin(), q.end(), draws.draw(chain, it).begin());
  }
  stats.step_size = nuts.step();
  stats.inverse_metric = nuts.inverse_metric();
  stats.mean_accept = config.iterations ? accept_total / static_cast<double>(config.iterations) : 0.0;
  stats.gradient_evaluations = nuts.evaluations();
}

}  // namespace

SamplerResult run_nuts(const LogDensityFn& log_density, const InitFn& init, std::size_t dim,
                       const SamplerConfig& config) {
  if (config.chains == 0 || config.iterations == 0) throw std::invalid_argument("need at least one chain and draw");
  if (dim == 0) throw std::invalid_argument("sampling needs a positive dimension");
  if (!(config.target_accept > 0.0 && config.target_accept < 1.0))
    throw std::invalid_argument("target acceptance must lie in (0, 1)");
  SamplerResult result{Draws(config.chains, config.iterations, dim), std::vector<ChainStats>(config.chains)};
  parallel_for(
      config.chains,
      [&](std::size_t c) { run_chain(log_density, init, dim, config, c, result.draws, result.stats[c]); },
      config.threads);
  return result;
}

}  // namespace dhawkes
