#include "fft.hpp"

#include <fftw3.h>

#include <cstdlib>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace fracsp::fft {
namespace {

std::mutex plan_mutex;

void init_threads_once() {
  static bool done = [] {
    fftw_init_threads();
    int nt = 1;
    if (const char* env = std::getenv("FRACSP_THREADS")) {
      int v = std::atoi(env);
      if (v > 0) nt = v;
    }
    fftw_plan_with_nthreads(nt);
    return true;
  }();
  (void)done;
}

fftw_plan get_plan(int n, bool forward) {
  static std::map<std::pair<int, bool>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex);
  init_threads_once();
  auto key = std::make_pair(n, forward);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  std::size_t nr = std::size_t(n) * n * n;
  std::size_t nc = std::size_t(n) * n * (n / 2 + 1);
  std::vector<double> r(nr);
  std::vector<std::complex<double>> c(nc);
  auto* cp = reinterpret_cast<fftw_complex*>(c.data());
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan p = forward ? fftw_plan_dft_r2c_3d(n, n, n, r.data(), cp, flags)
                        : fftw_plan_dft_c2r_3d(n, n, n, cp, r.data(), flags | FFTW_DESTROY_INPUT);
  cache.emplace(key, p);
  return p;
}

}  // namespace

void r2c(int n, const double* in, std::complex<double>* out) {
  fftw_execute_dft_r2c(get_plan(n, true), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void c2r(int n, std::complex<double>* in, double* out) {
  fftw_execute_dft_c2r(get_plan(n, false), reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace fracsp::fft
