#include "topoflock/spectral_derivative.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "topoflock/errors.hpp"

namespace topoflock {

namespace {

struct Plans {
  fftw_plan forward;
  fftw_plan backward;
};

// FFTW's planner is not thread-safe; plans are created once per size under a
// lock and executed with the new-array interface afterwards.
const Plans& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, Plans> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
  Plans p{fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE),
          fftw_plan_dft_c2r_1d(n, out, in, FFTW_ESTIMATE)};
  fftw_free(in);
  fftw_free(out);
  return cache.emplace(n, p).first->second;
}

struct Buffers {
  double* real;
  fftw_complex* spec;
  explicit Buffers(int n) : real(fftw_alloc_real(n)), spec(fftw_alloc_complex(n / 2 + 1)) {}
  ~Buffers() {
    fftw_free(real);
    fftw_free(spec);
  }
  Buffers(const Buffers&) = delete;
  Buffers& operator=(const Buffers&) = delete;
};

// Multiplies mode k by multiplier(k) and transforms back.
template <class Multiplier>
std::vector<double> apply_symbol(std::span<const double> f, Multiplier multiplier) {
  const int n = static_cast<int>(f.size());
  const Plans& p = plans_for(n);
  Buffers buf(n);
  std::copy(f.begin(), f.end(), buf.real);
  fftw_execute_dft_r2c(p.forward, buf.real, buf.spec);
  for (int k = 0; k <= n / 2; ++k) {
    std::complex<double> c(buf.spec[k][0], buf.spec[k][1]);
    c *= multiplier(k);
    buf.spec[k][0] = c.real();
    buf.spec[k][1] = c.imag();
  }
  fftw_execute_dft_c2r(p.backward, buf.spec, buf.real);
  std::vector<double> out(buf.real, buf.real + n);
  for (double& v : out) v /= n;
  return out;
}

}  // namespace

std::vector<double> spectral_derivative(std::span<const double> f, double length) {
  const int n = static_cast<int>(f.size());
  const double scale = 2.0 * std::numbers::pi / length;
  return apply_symbol(f, [&](int k) -> std::complex<double> {
    if (n % 2 == 0 && k == n / 2) return 0.0;
    return {0.0, scale * k};
  });
}

std::vector<double> spectral_antiderivative(std::span<const double> f, double length) {
  const int n = static_cast<int>(f.size());
  const double scale = 2.0 * std::numbers::pi / length;
  return apply_symbol(f, [&](int k) -> std::complex<double> {
    if (k == 0 || (n % 2 == 0 && k == n / 2)) return 0.0;
    return {0.0, -1.0 / (scale * k)};
  });
}

std::vector<double> central_derivative(std::span<const double> f, double length) {
  const std::size_t n = f.size();
  const double dx = length / static_cast<double>(n);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = (f[(i + 1) % n] - f[(i + n - 1) % n]) / (2.0 * dx);
  }
  return out;
}

std::vector<double> derivative(std::span<const double> f, double length, DerivativeMethod method) {
  return method == DerivativeMethod::kSpectral ? spectral_derivative(f, length)
                                               : central_derivative(f, length);
}

std::string to_string(DerivativeMethod method) {
  return method == DerivativeMethod::kSpectral ? "spectral" : "central";
}

DerivativeMethod derivative_method_from_string(const std::string& name) {
  if (name == "spectral") return DerivativeMethod::kSpectral;
  if (name == "central") return DerivativeMethod::kCentral;
  throw Error("unknown derivative method '" + name + "'");
}

}  // namespace topoflock
