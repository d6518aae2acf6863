#pragma once

#include <complex>
#include <vector>

namespace sqbench {

/// Real-input FFT of arbitrary length; returns n/2+1 non-redundant bins.
std::vector<std::complex<double>> rfft(const std::vector<double>& x);

/// Inverse of rfft back to n real samples (normalized: irfft(rfft(x)) == x).
std::vector<double> irfft(const std::vector<std::complex<double>>& spectrum,
                          std::size_t n);

}  // namespace sqbench
