#include "awva/stats.hpp"

#include <algorithm>
#include <cmath>

#include "awva/errors.hpp"

namespace awva {

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + n / 2 - 1, v.end());
  return 0.5 * (v[n / 2 - 1] + hi);
}

double rms(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

namespace {

// Lower regularized gamma P(a,x) by series; converges fast for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw Error(ErrorKind::numeric, "gamma_p series did not converge");
}

// Upper regularized gamma Q(a,x) by Lentz continued fraction; for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) {
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw Error(ErrorKind::numeric, "gamma_q continued fraction did not converge");
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw Error(ErrorKind::numeric, "gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

std::int64_t binomial_draw(std::int64_t n, double p, StreamCursor& cursor) {
  if (n < 0 || p < 0.0 || p > 1.0) throw Error(ErrorKind::numeric, "binomial_draw: bad arguments");
  if (p == 0.0 || n == 0) return 0;
  if (p == 1.0) return n;
  const double log1mp = std::log1p(-p);
  std::int64_t count = 0;
  std::int64_t i = -1;
  while (true) {
    double u = cursor.u01();
    // number of failures before the next success, geometric in (1-p)
    double skip = std::floor(std::log(u) / log1mp);
    if (skip > static_cast<double>(n)) break;
    i += 1 + static_cast<std::int64_t>(skip);
    if (i >= n) break;
    ++count;
  }
  return count;
}

}  // namespace awva
