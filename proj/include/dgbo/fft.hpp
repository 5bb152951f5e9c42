#pragma once

// Thin RAII layer over FFTW's double-precision complex transforms.
//
// Plans are created with FFTW_ESTIMATE so planning is deterministic (no
// runtime measurement), and with FFTW_UNALIGNED so a plan can execute on any
// caller-provided buffer. Plan creation/destruction is serialized behind a
// mutex (FFTW requirement); execution on distinct buffers is thread-safe.

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace dgbo {

using cdouble = std::complex<double>;

namespace detail {
inline std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

class FftPlan {
 public:
  explicit FftPlan(int n) : n_(n) {
    if (n < 2) throw std::invalid_argument("FftPlan: n must be >= 2");
    std::vector<cdouble> a(static_cast<size_t>(n)), b(static_cast<size_t>(n));
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    std::lock_guard<std::mutex> lock(detail::fftw_mutex());
    fwd_ = fftw_plan_dft_1d(n, pa, pb, FFTW_FORWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
    bwd_ = fftw_plan_dft_1d(n, pa, pb, FFTW_BACKWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (fwd_ == nullptr || bwd_ == nullptr)
      throw std::runtime_error("FftPlan: fftw plan creation failed");
  }

  ~FftPlan() {
    std::lock_guard<std::mutex> lock(detail::fftw_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  int size() const { return n_; }

  // out[m] = sum_j in[j] exp(-2*pi*i*m*j/n); out may not alias in.
  void forward(const cdouble* in, cdouble* out) const {
    fftw_execute_dft(fwd_,
                     reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }

  // out[j] = (1/n) sum_m in[m] exp(+2*pi*i*m*j/n); out may not alias in.
  void inverse(const cdouble* in, cdouble* out) const {
    fftw_execute_dft(bwd_,
                     reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
    const double s = 1.0 / static_cast<double>(n_);
    for (int j = 0; j < n_; ++j) out[j] *= s;
  }

 private:
  int n_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

// Process-wide plan cache, one plan pair per transform size.
inline std::shared_ptr<const FftPlan> fft_plan(int n) {
  static std::mutex cache_mutex;
  static std::map<int, std::weak_ptr<const FftPlan>> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto& slot = cache[n];
  if (auto p = slot.lock()) return p;
  auto p = std::make_shared<const FftPlan>(n);
  slot = p;
  return p;
}

// Convenience copies (allocating). Hot loops should hold an FftPlan and
// reuse buffers instead.
inline std::vector<cdouble> fft(const std::vector<cdouble>& v) {
  auto plan = fft_plan(static_cast<int>(v.size()));
  std::vector<cdouble> out(v.size());
  plan->forward(v.data(), out.data());
  return out;
}

inline std::vector<cdouble> ifft(const std::vector<cdouble>& v) {
  auto plan = fft_plan(static_cast<int>(v.size()));
  std::vector<cdouble> out(v.size());
  plan->inverse(v.data(), out.data());
  return out;
}

inline std::vector<cdouble> fft_real(const std::vector<double>& v) {
  std::vector<cdouble> in(v.begin(), v.end());
  return fft(in);
}

inline std::vector<double> ifft_to_real(const std::vector<cdouble>& v) {
  auto w = ifft(v);
  std::vector<double> out(w.size());
  for (size_t j = 0; j < w.size(); ++j) out[j] = w[j].real();
  return out;
}

}  // namespace dgbo
