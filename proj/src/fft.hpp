#pragma once

// Thin, cached wrapper over FFTW cubic real transforms. Plans are built with
// FFTW_ESTIMATE so the chosen algorithm (and therefore every rounding) is the
// same from run to run.

#include <complex>

namespace fracsp::fft {

// Unnormalized forward transform of an n^3 real array (x fastest) into the
// n*n*(n/2+1) half spectrum.
void r2c(int n, const double* in, std::complex<double>* out);

// Unnormalized inverse transform. The input is overwritten.
void c2r(int n, std::complex<double>* in, double* out);

}  // namespace fracsp::fft
