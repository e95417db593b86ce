#pragma once

#include <numbers>
#include <string>
#include <vector>

namespace topoflock {

enum class KernelFamily { kTopological, kGeometric, kMotschTadmor };
enum class CutoffShape { kSmoothCos2, kIndicator };

/// h(r) = 1 on [0, r0], 0 on [2 r0, inf). smooth-cos2 interpolates with
/// cos^2(pi (r - r0) / (2 r0)); indicator drops to 0 right after r0.
struct CutoffProfile {
  double r0 = 0.5 * std::numbers::pi;
  CutoffShape shape = CutoffShape::kSmoothCos2;
};

struct KernelSpec {
  KernelFamily family = KernelFamily::kTopological;
  double alpha = 1.2;
  double tau = 1.0;
  double r0 = 0.5 * std::numbers::pi;
  CutoffShape cutoff = CutoffShape::kSmoothCos2;
  double amplitude = 1.0;

  CutoffProfile profile() const { return {r0, cutoff}; }

  // tau actually used by eval_phi: 0 for the geometric family.
  double effective_tau() const { return family == KernelFamily::kGeometric ? 0.0 : tau; }

  // Largest |x - y| with a possibly nonzero weight.
  double support() const;

  // Empty when the spec is usable on a torus of the given length.
  std::vector<std::string> violations(double length) const;
};

double eval_h(const CutoffProfile& profile, double r);

/// Topological: amplitude h(r) / (r^(1+alpha-tau) d^tau).
/// Geometric: the same with tau = 0 (d ignored).
/// Motsch-Tadmor: amplitude 1{r < r0} / d, where d is the mass of the
/// observer's r0-ball.
/// Throws SingularEvaluation for r <= 0, or d <= 0 when d is needed.
double eval_phi(const KernelSpec& spec, double r, double d);

std::string to_string(KernelFamily family);
std::string to_string(CutoffShape shape);
KernelFamily kernel_family_from_string(const std::string& name);
CutoffShape cutoff_shape_from_string(const std::string& name);

}  // namespace topoflock
