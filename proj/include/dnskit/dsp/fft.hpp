#pragma once

#include <complex>
#include <vector>

namespace dnskit::dsp {

// In-place radix-2 FFT; size must be a power of two.
// inverse=true applies the 1/N scaling.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);

}  // namespace dnskit::dsp
