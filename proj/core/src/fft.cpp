#include "sspiv/fft.hpp"

#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace sspiv {
namespace {
// The FFTW planner is not thread safe; executing plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft::Fft(std::size_t n) : n_(n), fwd_(nullptr), inv_(nullptr) {
  if (n == 0) throw std::invalid_argument("FFT size must be > 0");
  std::vector<std::complex<double>> scratch_in(n), scratch_out(n);
  auto* in = reinterpret_cast<fftw_complex*>(scratch_in.data());
  auto* out = reinterpret_cast<fftw_complex*>(scratch_out.data());
  std::lock_guard<std::mutex> lk(planner_mutex());
  fwd_ = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_FORWARD,
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
  inv_ = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_BACKWARD,
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!fwd_ || !inv_) throw std::runtime_error("FFTW plan creation failed");
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lk(planner_mutex());
  if (fwd_) fftw_destroy_plan(fwd_);
  if (inv_) fftw_destroy_plan(inv_);
}

void Fft::forward(const std::complex<double>* in, std::complex<double>* out) const {
  fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void Fft::inverse(const std::complex<double>* in, std::complex<double>* out) const {
  fftw_execute_dft(inv_, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

std::size_t Fft::next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace sspiv
