#include "stablesde/gate.hpp"

#include <cmath>

#include "stablesde/errors.hpp"

namespace stablesde {
namespace {

// 1/x with 1/inf = 0 exactly.
double inv(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

}  // namespace

double RegularityParams::theta() const { return gamma - 1.0 + alpha - dim * inv(p) - alpha * inv(r); }

double RegularityParams::chi() const {
  return 0.5 - (inv(r) + dim * inv(p) / alpha + (1.0 - gamma) / alpha);
}

double RegularityParams::epsilon_prime() const {
  return -inv(r) + ((gamma - 1.0 + theta() - 1.0) / alpha - dim * inv(p) / alpha);
}

GateReport check_gate(const RegularityParams& params) {
  if (!(params.alpha > 1.0 && params.alpha <= 2.0)) throw InvalidArgument("alpha must lie in (1, 2]");
  if (!(params.p >= 1.0 && params.q >= 1.0 && params.r >= 1.0)) throw InvalidArgument("p, q, r must be >= 1");
  if (params.dim < 1) throw InvalidArgument("dimension must be positive");
  const double a = params.alpha;
  const double dp = params.dim * inv(params.p);
  const double ir = inv(params.r);

  GateReport rep;
  rep.theta = params.theta();
  rep.chi = params.chi();
  rep.epsilon_prime = params.epsilon_prime();
  rep.alpha_threshold = ir < 1.0 ? (1.0 + dp) / (1.0 - ir) : std::numeric_limits<double>::infinity();
  rep.weak_threshold = (3.0 - a + dp + a * ir) / 2.0;
  rep.dyn_threshold = (3.0 - a + 2.0 * dp + 2.0 * a * ir) / 2.0;
  rep.weak_ok = a > rep.alpha_threshold && params.gamma > rep.weak_threshold && params.gamma < 1.0;
  rep.dyn_ok = rep.weak_ok && params.gamma > rep.dyn_threshold;
  rep.integrability_ok = dp + 2.0 * ir < 1.0;
  return rep;
}

}  // namespace stablesde
