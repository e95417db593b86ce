#pragma once

#include <span>
#include <string>
#include <vector>

namespace topoflock {

enum class DerivativeMethod { kSpectral, kCentral };

// Fourier-collocation derivative of periodic samples; the Nyquist mode is
// dropped for even sizes.
std::vector<double> spectral_derivative(std::span<const double> f, double length);

// Second-order central differences.
std::vector<double> central_derivative(std::span<const double> f, double length);

std::vector<double> derivative(std::span<const double> f, double length, DerivativeMethod method);

// Mean-zero periodic antiderivative. The mean of f is discarded.
std::vector<double> spectral_antiderivative(std::span<const double> f, double length);

std::string to_string(DerivativeMethod method);
DerivativeMethod derivative_method_from_string(const std::string& name);

}  // namespace topoflock
