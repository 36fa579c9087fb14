#pragma once

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace pathprob::detail {

// FFTW planning is not thread-safe; execution on distinct arrays is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

class FftPlan {
public:
  FftPlan(std::vector<std::complex<double>>& data, int sign) {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    plan_ = fftw_plan_dft_1d(static_cast<int>(data.size()), p, p, sign, FFTW_ESTIMATE);
  }
  ~FftPlan() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void execute() { fftw_execute(plan_); }

private:
  fftw_plan plan_;
};

} // namespace pathprob::detail
