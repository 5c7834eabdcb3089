#pragma once

#include <limits>

namespace stablesde {

/// Indices of the drift space L^r([0,T], B^{-1+gamma}_{p,q}) together with
/// the noise index alpha and the dimension.
struct RegularityParams {
  double alpha = 1.5;
  int dim = 1;
  double p = std::numeric_limits<double>::infinity();
  double q = std::numeric_limits<double>::infinity();
  double r = std::numeric_limits<double>::infinity();
  double gamma = 0.9;
  /// Slack subtracted from Schauder targets.
  double epsilon = 0.02;

  /// theta = gamma - 1 + alpha - d/p - alpha/r.
  double theta() const;
  /// chi = 1/2 - (1/r + d/(p alpha) + (1 - gamma)/alpha).
  double chi() const;
  /// eps' = -1/r + (gamma - 1 + theta - 1)/alpha - d/(p alpha).
  double epsilon_prime() const;
};

struct GateReport {
  bool weak_ok = false;
  bool dyn_ok = false;
  /// d/p + 2/r < 1.
  bool integrability_ok = false;
  double theta = 0.0;
  double chi = 0.0;
  double epsilon_prime = 0.0;
  /// (1 + d/p) / (1 - 1/r): alpha must exceed it.
  double alpha_threshold = 0.0;
  /// (3 - alpha + d/p + alpha/r) / 2: lower end of the weak gamma window.
  double weak_threshold = 0.0;
  /// (3 - alpha + 2d/p + 2alpha/r) / 2: lower end for the dynamics.
  double dyn_threshold = 0.0;
};

/// Admissibility of (alpha, d, p, q, r, gamma). Infinite indices are IEEE
/// infinity. Throws InvalidArgument for alpha outside (1, 2] or indices below 1.
GateReport check_gate(const RegularityParams& params);

}  // namespace stablesde
