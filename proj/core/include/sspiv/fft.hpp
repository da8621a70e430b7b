#pragma once

#include <complex>
#include <cstddef>

struct fftw_plan_s;

namespace sspiv {

/// Thin FFTW wrapper for fixed-size complex transforms. Plans are created
/// with FFTW_ESTIMATE (deterministic) and may be executed concurrently on
/// distinct buffers. The inverse transform is unscaled (divide by size()).
class Fft {
 public:
  explicit Fft(std::size_t n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t size() const { return n_; }

  void forward(const std::complex<double>* in, std::complex<double>* out) const;
  void inverse(const std::complex<double>* in, std::complex<double>* out) const;

  static std::size_t next_pow2(std::size_t n);

 private:
  std::size_t n_;
  fftw_plan_s* fwd_;
  fftw_plan_s* inv_;
};

}  // namespace sspiv
