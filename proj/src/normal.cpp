#include "ssglm/normal.hpp"

#include <cmath>
#include <limits>

#include "ssglm/types.hpp"

namespace ssglm {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

// Acklam's inverse-normal approximation (~1e-9 relative), used as the seed
// for the Newton polish.
double quantile_seed(double q) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  if (q < p_low) {
    const double u = std::sqrt(-2.0 * std::log(q));
    return (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
           ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  }
  if (q > 1.0 - p_low) {
    const double u = std::sqrt(-2.0 * std::log(1.0 - q));
    return -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
           ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  }
  const double u = q - 0.5;
  const double r = u * u;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}
}  // namespace

double normal_cdf(double t) { return 0.5 * std::erfc(-t / kSqrt2); }

double normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) throw InputError("normal_quantile: q must be in (0,1)");
  if (q == 0.5) return 0.0;
  double x = quantile_seed(q);
  for (int k = 0; k < 3; ++k) {
    const double err = normal_cdf(x) - q;
    const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
    if (pdf <= std::numeric_limits<double>::min()) break;
    const double dx = err / pdf;
    x -= dx;
    if (std::fabs(dx) < 1e-15 * (1.0 + std::fabs(x))) break;
  }
  return x;
}

namespace {

// Gauss-Legendre nodes/weights on (-1, 1), split by correlation strength as
// in Genz's BVND routine.
struct GaussRule {
  const double* x;
  const double* w;
  int n;
};

const double kX6[] = {-0.9324695142031522, -0.6612093864662647, -0.2386191860831970};
const double kW6[] = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
const double kX12[] = {-0.9815606342467191, -0.9041172563704750, -0.7699026741943050,
                       -0.5873179542866171, -0.3678314989981802, -0.1252334085114692};
const double kW12[] = {0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                       0.2031674267230659,  0.2334925365383547, 0.2491470458134029};
const double kX20[] = {-0.9931285991850949, -0.9639719272779138, -0.9122344282513259,
                       -0.8391169718222188, -0.7463319064601508, -0.6360536807265150,
                       -0.5108670019508271, -0.3737060887154196, -0.2277858511416451,
                       -0.07652652113349733};
const double kW20[] = {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                       0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
                       0.1316886384491766,  0.1420961093183821,  0.1491729864726037,
                       0.1527533871307259};

}  // namespace

// Genz's BVND algorithm (Drezner-Wesolowsky with the tail-stable branch for
// strong correlation); absolute accuracy around 5e-16.
double bivariate_normal_upper(double h, double k, double r) {
  if (!(r >= -1.0 && r <= 1.0)) throw InputError("bivariate_normal_upper: invalid correlation");
  GaussRule rule;
  if (std::fabs(r) < 0.3)
    rule = {kX6, kW6, 3};
  else if (std::fabs(r) < 0.75)
    rule = {kX12, kW12, 6};
  else
    rule = {kX20, kW20, 10};

  constexpr double kTwoPi = 6.283185307179586;
  double bvn = 0.0;
  if (std::fabs(r) < 0.925) {
    if (std::fabs(r) > 0.0) {
      const double hs = (h * h + k * k) / 2.0;
      const double asr = std::asin(r);
      for (int i = 0; i < rule.n; ++i) {
        for (int is = -1; is <= 1; is += 2) {
          const double sn = std::sin(asr * (is * rule.x[i] + 1.0) / 2.0);
          bvn += rule.w[i] * std::exp((sn * h * k - hs) / (1.0 - sn * sn));
        }
      }
      bvn = bvn * asr / (2.0 * kTwoPi);
    }
    return bvn + normal_cdf(-h) * normal_cdf(-k);
  }
  // |r| >= 0.925: Genz's expansion around |r| = 1
  double hh = h, kk = k;
  if (r < 0.0) {
    kk = -kk;
  }
  const double hk = hh * kk;
  if (std::fabs(r) < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (hh - kk) * (hh - kk);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    const double asq = -(bs / as + hk) / 2.0;
    if (asq > -100.0)
      bvn = a * std::exp(asq) *
            (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (-hk < 100.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * std::sqrt(kTwoPi) * normal_cdf(-b / a) * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (int i = 0; i < rule.n; ++i) {
      for (int is = -1; is <= 1; is += 2) {
        const double xs = a * (is * rule.x[i] + 1.0);
        const double xs2 = xs * xs;
        const double rs = std::sqrt(1.0 - xs2);
        const double asq2 = -(bs / xs2 + hk) / 2.0;
        if (asq2 > -100.0) {
          bvn += a * rule.w[i] * std::exp(asq2) *
                 (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                  (1.0 + c * xs2 * (1.0 + d * xs2)));
        }
      }
    }
    bvn = -bvn / kTwoPi;
  }
  if (r > 0.0) return bvn + normal_cdf(-std::max(hh, kk));
  bvn = -bvn;
  if (kk > hh) bvn += normal_cdf(kk) - normal_cdf(hh);
  return bvn;
}

double both_tails_probability(double c, double r) {
  if (c < 0.0) throw InputError("both_tails_probability: c must be nonnegative");
  const double rr = std::min(0.999999, std::max(-0.999999, r));
  return 2.0 * (bivariate_normal_upper(c, c, rr) + bivariate_normal_upper(c, c, -rr));
}

double intersection_critical(double r, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw InputError("intersection_critical: delta must be in (0,1)");
  double lo = 0.0, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (both_tails_probability(mid, r) > delta)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace ssglm
