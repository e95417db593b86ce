#include "topoflock/kernels.hpp"

#include <cmath>

#include "topoflock/errors.hpp"

namespace topoflock {

double KernelSpec::support() const {
  if (family == KernelFamily::kMotschTadmor || cutoff == CutoffShape::kIndicator) return r0;
  return 2.0 * r0;
}

std::vector<std::string> KernelSpec::violations(double length) const {
  std::vector<std::string> out;
  if (!(alpha > 0.0 && alpha < 2.0)) out.push_back("alpha must lie in (0,2)");
  if (!(tau >= 0.0) || !std::isfinite(tau)) out.push_back("tau must be nonnegative");
  // r0 = length/4 is allowed: the smooth cutoff vanishes at the antipode.
  if (!(r0 > 0.0 && r0 <= 0.25 * length * (1.0 + 1e-12))) {
    out.push_back("r0 must lie in (0, length/4]");
  }
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) out.push_back("amplitude must be positive");
  return out;
}

double eval_h(const CutoffProfile& profile, double r) {
  const double r0 = profile.r0;
  if (r <= r0) return 1.0;
  if (profile.shape == CutoffShape::kIndicator || r >= 2.0 * r0) return 0.0;
  const double c = std::cos(0.5 * std::numbers::pi * (r - r0) / r0);
  return c * c;
}

double eval_phi(const KernelSpec& spec, double r, double d) {
  if (!(r > 0.0)) throw SingularEvaluation("kernel evaluated at zero separation");
  if (spec.family == KernelFamily::kMotschTadmor) {
    if (r >= spec.r0) return 0.0;
    if (!(d > 0.0)) throw SingularEvaluation("Motsch-Tadmor kernel needs a positive ball mass");
    return spec.amplitude / d;
  }
  const double h = eval_h(spec.profile(), r);
  if (h == 0.0) return 0.0;
  const double tau = spec.effective_tau();
  if (tau == 0.0) return spec.amplitude * h / std::pow(r, 1.0 + spec.alpha);
  if (!(d > 0.0)) throw SingularEvaluation("topological kernel needs a positive distance");
  return spec.amplitude * h / (std::pow(r, 1.0 + spec.alpha - tau) * std::pow(d, tau));
}

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::kTopological: return "topological";
    case KernelFamily::kGeometric: return "geometric";
    case KernelFamily::kMotschTadmor: return "motsch-tadmor";
  }
  return "unknown";
}

std::string to_string(CutoffShape shape) {
  return shape == CutoffShape::kSmoothCos2 ? "smooth-cos2" : "indicator";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "topological") return KernelFamily::kTopological;
  if (name == "geometric") return KernelFamily::kGeometric;
  if (name == "motsch-tadmor") return KernelFamily::kMotschTadmor;
  throw Error("unknown kernel family '" + name + "'");
}

CutoffShape cutoff_shape_from_string(const std::string& name) {
  if (name == "smooth-cos2") return CutoffShape::kSmoothCos2;
  if (name == "indicator") return CutoffShape::kIndicator;
  throw Error("unknown cutoff shape '" + name + "'");
}

}  // namespace topoflock
