#include "friable/arith.hpp"

#include "friable/errors.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace friable {

std::vector<cplx> dft_positive(const std::vector<cplx>& w)
{
    const std::size_t n = w.size();
    if (n == 0)
        return {};
    if (n > (1u << 30))
        throw ResourceError("DFT length too large");
    static std::mutex planner_mutex;
    static std::map<std::size_t, fftw_plan> plans;
    fftw_plan plan = nullptr;
    {
        // FFTW's planner is not thread-safe; execution with new arrays is.
        std::lock_guard lock(planner_mutex);
        auto it = plans.find(n);
        if (it == plans.end()) {
            std::vector<cplx> tmp_in(n), tmp_out(n);
            auto p = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(tmp_in.data()),
                                      reinterpret_cast<fftw_complex*>(tmp_out.data()), FFTW_BACKWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
            it = plans.emplace(n, p).first;
        }
        plan = it->second;
    }
    std::vector<cplx> in = w, out(n);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

}  // namespace friable
