#include "exact.hpp"

#include <cmath>
#include <limits>

namespace fejerlab::exact {

mpq_class squared_distance_change(const Vector& p, const Vector& q, const Vector& w) {
  mpq_class total = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const mpq_class wi(w[i]);
    const mpq_class a = mpq_class(q[i]) - wi;
    const mpq_class b = mpq_class(p[i]) - wi;
    total += a * a - b * b;
  }
  return total;
}

int squared_distance_change_sign(const Vector& p, const Vector& q, const Vector& w) {
  return sgn(squared_distance_change(p, q, w));
}

double round_up(const mpq_class& value) {
  double d = value.get_d();  // truncates toward zero
  while (mpq_class(d) < value) d = std::nextafter(d, std::numeric_limits<double>::infinity());
  return d;
}

double sqrt_round_down(const mpq_class& value) {
  if (sgn(value) <= 0) return 0.0;
  double b = std::sqrt(value.get_d());
  while (b > 0.0 && mpq_class(b) * mpq_class(b) > value) b = std::nextafter(b, 0.0);
  for (;;) {
    const double up = std::nextafter(b, std::numeric_limits<double>::infinity());
    if (mpq_class(up) * mpq_class(up) > value) break;
    b = up;
  }
  return b;
}

}  // namespace fejerlab::exact
