#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

#include "wmsense/error.hpp"

namespace wmsense::detail {

namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [n, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    // Planning touches the input/output arrays, so plan on scratch buffers.
    std::vector<cplx> in(n), out(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n),
                                      reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()),
                                      FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) fail(Errc::configuration, "fftw could not create a plan");
    plans_.emplace(n, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::size_t, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void forward_dft(std::span<const cplx> in, std::span<cplx> out) {
  require(in.size() == out.size() && !in.empty(), Errc::invalid_parameter,
          "forward_dft: input and output lengths must match and be non-zero");
  fftw_plan plan = cache().get(in.size());
  // fftw never writes to the input of an out-of-place complex DFT.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace wmsense::detail
