#pragma once

#include <complex>
#include <vector>

namespace adtsim::fft {

/// Unnormalized forward DFT.
std::vector<std::complex<double>> forward(const std::vector<std::complex<double>>& x);

/// Inverse DFT including the 1/N factor, so inverse(forward(x)) == x.
std::vector<std::complex<double>> inverse(const std::vector<std::complex<double>>& x);

/// Unnormalized forward DFT of a real record; returns the N/2+1 nonnegative-frequency bins.
std::vector<std::complex<double>> forward_real(const std::vector<double>& x);

}  // namespace adtsim::fft
