#include "dualink/fft.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace dualink::fft {

namespace {

// fftw planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (size, direction) and kept for the
// life of the process.
class PlanCache {
public:
    fftw_plan get(int n, int sign)
    {
        std::lock_guard lock(mu_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        auto* in = fftw_alloc_complex(n);
        auto* out = fftw_alloc_complex(n);
        fftw_plan plan = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        if (!plan) throw std::runtime_error("fftw: planning failed");
        plans_.emplace(key, plan);
        return plan;
    }

    ~PlanCache()
    {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

private:
    std::mutex mu_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache()
{
    static PlanCache c;
    return c;
}

void execute(std::span<const cplx> in, std::span<cplx> out, int sign)
{
    if (in.size() != out.size() || in.empty()) throw std::invalid_argument("fft: size mismatch");
    if (in.data() == out.data()) throw std::invalid_argument("fft: in-place transforms are not supported");
    const int n = static_cast<int>(in.size());
    fftw_plan plan = cache().get(n, sign);
    // fftw_execute_dft takes a non-const input pointer but does not write
    // to it for out-of-place plans.
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(plan, src, dst);
}

}  // namespace

void forward(std::span<const cplx> in, std::span<cplx> out)
{
    execute(in, out, FFTW_FORWARD);
    const double scale = 1.0 / static_cast<double>(out.size());
    for (auto& z : out) z *= scale;
}

void inverse(std::span<const cplx> in, std::span<cplx> out) { execute(in, out, FFTW_BACKWARD); }

}  // namespace dualink::fft
