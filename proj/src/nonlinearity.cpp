#include "movsph/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <omp.h>

#include "movsph/errors.hpp"
#include "movsph/geometry.hpp"

namespace movsph {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

Nonlinearity::Nonlinearity(NonlinearityFamily family, double p, int n)
    : family_(std::move(family)), p_(p), n_(n) {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("nonlinearity: p must be positive");
  if (n < 2) throw DomainError("nonlinearity: n must be >= 2");
  std::visit(overloaded{[](const HyderNgo& h) {
                          if (!(h.epsilon >= 0.0)) throw DomainError("HyderNgo: epsilon must be >= 0");
                          if (!(h.q > 0.0)) throw DomainError("HyderNgo: q must be > 0");
                        },
                        [](const PurePower& pp) {
                          if (!std::isfinite(pp.kappa) || !std::isfinite(pp.weight_exponent))
                            throw DomainError("PurePower: parameters must be finite");
                        },
                        [](const Custom& c) {
                          if (!c.fn) throw DomainError("Custom: empty function");
                        }},
             family_);
}

double Nonlinearity::evaluate(double alpha, double beta) const {
  const double w = 1.0 + alpha * alpha;
  return std::visit(
      overloaded{[&](const HyderNgo& h) {
                   const double nd = n_;
                   double v = std::pow(w, 0.5 * (p_ * h.q - p_ - 2.0 * nd)) * std::pow(beta, -h.q);
                   if (h.epsilon > 0.0) v += h.epsilon * std::pow(w, -(p_ + nd)) * beta;
                   return v;
                 },
                 [&](const PurePower& pp) { return std::pow(w, 0.5 * pp.weight_exponent) * std::pow(beta, pp.kappa); },
                 [&](const Custom& c) { return c.fn(alpha, beta); }},
      family_);
}

double Nonlinearity::operator()(double alpha, double beta) const {
  if (!(beta > 0.0)) throw DomainError("f(alpha, beta): beta must be positive");
  if (!(alpha >= 0.0)) throw DomainError("f(alpha, beta): alpha must be nonnegative");
  const double v = evaluate(alpha, beta);
  if (!(v > 0.0)) {
    if (std::holds_alternative<Custom>(family_))
      throw ContractViolation("custom nonlinearity returned a nonpositive value");
    if (v == 0.0) throw RangeError("f(alpha, beta) underflowed to zero");
    throw RangeError("f(alpha, beta) is not finite");
  }
  if (!std::isfinite(v)) throw RangeError("f(alpha, beta) overflowed");
  return v;
}

double eval_f(const Nonlinearity& f, double alpha, double beta) { return f(alpha, beta); }

std::string Nonlinearity::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{[&](const HyderNgo& h) { os << "hyder_ngo(epsilon=" << h.epsilon << ", q=" << h.q << ")"; },
                        [&](const PurePower& pp) {
                          os << "pure_power(kappa=" << pp.kappa << ", weight_exponent=" << pp.weight_exponent << ")";
                        },
                        [&](const Custom& c) { os << c.name; }},
             family_);
  os << " p=" << p_ << " n=" << n_;
  return os.str();
}

bool Nonlinearity::nonincreasing_in_beta() const noexcept {
  if (const auto* h = std::get_if<HyderNgo>(&family_)) return h->epsilon == 0.0;
  if (const auto* pp = std::get_if<PurePower>(&family_)) return pp->kappa <= 0.0;
  return false;
}

std::optional<HyderNgo> Nonlinearity::hyder_ngo_pure() const noexcept {
  if (const auto* h = std::get_if<HyderNgo>(&family_); h && h->epsilon == 0.0) return *h;
  return std::nullopt;
}

bool in_condition_domain(const ConditionSample& s) noexcept {
  if (s.x.dim() < 2 || s.z.dim() != s.x.dim()) return false;
  if (!s.x.is_finite() || !s.z.is_finite()) return false;
  const double xn = s.x.norm();
  if (!(xn > 0.0)) return false;
  if (!(s.lambda > 0.0) || !(s.lambda < xn)) return false;
  if (!(distance(s.z, s.x) > s.lambda)) return false;
  if (!(s.a > 0.0) || !(s.a <= s.b) || !std::isfinite(s.b)) return false;
  return true;
}

ConditionEvaluation evaluate_condition(const Nonlinearity& f, const ConditionSample& s) {
  if (!in_condition_domain(s)) throw DomainError("condition sample outside the quantifier domain");
  if (static_cast<int>(s.x.dim()) != f.n()) throw DomainError("condition sample dimension mismatch");
  const InversionSphere sphere(s.x, s.lambda);
  const double ratio = s.lambda / distance(s.z, s.x);
  const Point zi = invert(sphere, s.z);
  const double p = f.p();
  ConditionEvaluation e;
  e.lhs = f(s.z.norm(), s.a);
  e.rhs = std::pow(ratio, p + 2.0 * f.n()) * f(zi.norm(), std::pow(ratio, p) * s.b);
  const double scale = std::max(e.lhs, e.rhs);
  e.margin = scale > 0.0 ? (e.lhs - e.rhs) / scale : 0.0;
  e.holds = e.margin > kStrictMarginTol;
  return e;
}

ConditionSampler default_condition_sampler(int n, SamplerConfig cfg) {
  if (n < 2) throw DomainError("sampler: n must be >= 2");
  return [n, cfg](Rng& rng) {
    ConditionSample s;
    const auto dim = static_cast<std::size_t>(n);
    s.x = random_direction(rng, dim) * log_uniform(rng, cfg.x_min, cfg.x_max);
    const double xn = s.x.norm();
    s.lambda = uniform(rng, 0.0, xn);
    const double r = log_uniform(rng, s.lambda, cfg.r_ratio_max * s.lambda);
    s.z = s.x + random_direction(rng, dim) * r;
    s.a = log_uniform(rng, cfg.a_min, cfg.a_max);
    s.b = s.a * std::pow(10.0, uniform(rng, 0.0, cfg.log10_ratio_max));
    return s;
  };
}

namespace {

struct SampleOutcome {
  ConditionSample sample;
  ConditionEvaluation eval;
  std::size_t rejected = 0;
  bool ratio_checked = false;
  bool ratio_agrees = true;
};

SampleOutcome run_sample(const Nonlinearity& f, const ConditionSampler& sampler, std::uint64_t seed,
                         std::size_t index, std::size_t max_resample) {
  Rng rng = make_stream(seed, index);
  SampleOutcome out;
  for (;;) {
    out.sample = sampler(rng);
    if (in_condition_domain(out.sample)) break;
    if (++out.rejected > max_resample) throw DomainError("condition sampler keeps producing out-of-domain samples");
  }
  out.eval = evaluate_condition(f, out.sample);
  if (const auto hn = f.hyder_ngo_pure()) {
    out.ratio_checked = true;
    out.ratio_agrees = hn_ratio_inequality_holds(hn->q, f.p(), f.n(), out.sample) == out.eval.holds;
  }
  return out;
}

// Associative merge; callers feed outcomes in sample order.
void accumulate(ConditionReport& rep, const SampleOutcome& o, std::size_t max_recorded) {
  ++rep.samples_tested;
  rep.rejected += o.rejected;
  if (o.ratio_checked) {
    ++rep.ratio_test_checked;
    if (!o.ratio_agrees) ++rep.ratio_test_disagreements;
  }
  if (!rep.worst || o.eval.margin < rep.min_margin) {
    rep.min_margin = o.eval.margin;
    rep.worst = o.sample;
  }
  if (!o.eval.holds) {
    ++rep.violation_count;
    if (rep.violations.size() < max_recorded)
      rep.violations.push_back({o.sample, o.eval.lhs, o.eval.rhs, o.eval.margin});
  }
}

void check_count(std::size_t count) {
  if (count < 1) throw DomainError("condition check: count must be >= 1");
}

}  // namespace

ConditionReport check_condition_F1_serial(const Nonlinearity& f, const ConditionSampler& sampler,
                                          std::size_t count, const CheckOptions& opts) {
  check_count(count);
  ConditionReport rep;
  for (std::size_t i = 0; i < count; ++i)
    accumulate(rep, run_sample(f, sampler, opts.seed, i, opts.max_resample), opts.max_recorded);
  return rep;
}

ConditionReport check_condition_F1(const Nonlinearity& f, const ConditionSampler& sampler, std::size_t count,
                                   const CheckOptions& opts) {
  check_count(count);
  // Fixed-size blocks keep the merge order independent of the thread count.
  constexpr std::size_t kBlock = 4096;
  const std::size_t nblocks = (count + kBlock - 1) / kBlock;
  std::vector<ConditionReport> partial(nblocks);
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t blk = 0; blk < nblocks; ++blk) {
    try {
      ConditionReport& rep = partial[blk];
      const std::size_t end = std::min(count, (blk + 1) * kBlock);
      for (std::size_t i = blk * kBlock; i < end; ++i)
        accumulate(rep, run_sample(f, sampler, opts.seed, i, opts.max_resample), opts.max_recorded);
    } catch (...) {
#pragma omp critical(movsph_condition_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  ConditionReport rep;
  for (const auto& part : partial) {
    rep.samples_tested += part.samples_tested;
    rep.rejected += part.rejected;
    rep.violation_count += part.violation_count;
    rep.ratio_test_checked += part.ratio_test_checked;
    rep.ratio_test_disagreements += part.ratio_test_disagreements;
    for (const auto& v : part.violations)
      if (rep.violations.size() < opts.max_recorded) rep.violations.push_back(v);
    if (part.worst && (!rep.worst || part.min_margin < rep.min_margin)) {
      rep.min_margin = part.min_margin;
      rep.worst = part.worst;
    }
  }
  return rep;
}

ConditionReport directed_condition_search(const Nonlinearity& f, const DirectedSearchConfig& cfg,
                                          std::size_t max_recorded) {
  const auto dim = static_cast<std::size_t>(f.n());
  const auto steps = [](std::size_t k) { return std::max<std::size_t>(k, 1); };
  const std::size_t nx = steps(cfg.x_steps), nl = steps(cfg.lambda_steps), nr = steps(cfg.r_steps),
                    nd = steps(cfg.direction_steps);
  std::vector<SampleOutcome> outcomes(nx * nl * nr * nd);

#pragma omp parallel for collapse(2) schedule(static)
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t il = 0; il < nl; ++il) {
      const double tx = nx > 1 ? static_cast<double>(ix) / static_cast<double>(nx - 1) : 0.0;
      const double xn = cfg.x_min * std::pow(cfg.x_max / cfg.x_min, tx);
      // lambda/|x| from 1 - 1e-1 towards 1 - 1e-6 and down to 1e-2.
      const double tl = (static_cast<double>(il) + 0.5) / static_cast<double>(nl);
      const double lam = xn * (il % 2 == 0 ? 1.0 - std::pow(10.0, -1.0 - 5.0 * tl) : std::pow(10.0, -2.0 * tl));
      for (std::size_t ir = 0; ir < nr; ++ir) {
        const double tr = (static_cast<double>(ir) + 0.5) / static_cast<double>(nr);
        const double rad = lam * (1.0 + std::pow(10.0, -6.0 + 9.0 * tr));
        for (std::size_t id = 0; id < nd; ++id) {
          // Directions interpolate from +x-hat through a perpendicular axis to -x-hat.
          const double ang = std::numbers::pi * static_cast<double>(id) / static_cast<double>(std::max<std::size_t>(nd - 1, 1));
          Point e = Point::axis(dim, 0, std::cos(ang));
          e[1] = std::sin(ang);
          ConditionSample s{Point::axis(dim, 0, xn), lam, Point::axis(dim, 0, xn) + e * rad, cfg.a, cfg.a};
          SampleOutcome o;
          o.sample = s;
          if (in_condition_domain(s)) {
            o.eval = evaluate_condition(f, s);
            if (const auto hn = f.hyder_ngo_pure()) {
              o.ratio_checked = true;
              o.ratio_agrees = hn_ratio_inequality_holds(hn->q, f.p(), f.n(), s) == o.eval.holds;
            }
          } else {
            o.rejected = 1;
            o.eval.holds = true;
            o.eval.margin = std::numeric_limits<double>::infinity();
          }
          outcomes[((ix * nl + il) * nr + ir) * nd + id] = o;
        }
      }
    }
  }

  ConditionReport rep;
  for (const auto& o : outcomes) {
    if (o.rejected) {
      ++rep.rejected;
      continue;
    }
    accumulate(rep, o, max_recorded);
  }
  return rep;
}

double hn_ratio(const Point& x, double lambda, const Point& z) {
  const double xn = x.norm();
  if (!(xn > 0.0)) throw DomainError("hn_ratio: x must be nonzero");
  if (!(lambda > 0.0) || !(lambda < std::sqrt(1.0 + xn * xn)))
    throw DomainError("hn_ratio: lambda must lie in (0, sqrt(1+|x|^2))");
  const double d = distance(z, x);
  if (!(d > lambda)) throw DomainError("hn_ratio: requires |z - x| > lambda");
  const Point zi = invert(InversionSphere(x, lambda), z);
  const double t = lambda / d;
  return t * t * (1.0 + z.norm2()) / (1.0 + zi.norm2());
}

bool hn_ratio_inequality_holds(double q, double p, int n, const ConditionSample& s) {
  const double e = 0.5 * (p + 2.0 * n - p * q);
  const double log_lhs = q * std::log(s.b / s.a);
  const double log_rhs = e * std::log(hn_ratio(s.x, s.lambda, s.z));
  // Same strictness as evaluate_condition: 1 - rhs/lhs > tol.
  if (!(log_lhs > log_rhs)) return false;
  return -std::expm1(log_rhs - log_lhs) > kStrictMarginTol;
}

}  // namespace movsph
