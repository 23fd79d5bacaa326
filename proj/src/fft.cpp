#include "adtsim/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace adtsim::fft {

namespace {
// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

std::vector<std::complex<double>> forward(const std::vector<std::complex<double>>& x) {
    if (x.empty()) throw std::invalid_argument("fft: empty input");
    std::vector<std::complex<double>> out(x.size());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(x.size()),
                                reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(x.data())),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_FORWARD, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

std::vector<std::complex<double>> inverse(const std::vector<std::complex<double>>& x) {
    if (x.empty()) throw std::invalid_argument("ifft: empty input");
    std::vector<std::complex<double>> out(x.size());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(x.size()),
                                reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(x.data())),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    const double scale = 1.0 / static_cast<double>(x.size());
    for (auto& v : out) v *= scale;
    return out;
}

std::vector<std::complex<double>> forward_real(const std::vector<double>& x) {
    if (x.empty()) throw std::invalid_argument("rfft: empty input");
    std::vector<std::complex<double>> out(x.size() / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        // r2c with FFTW_PRESERVE_INPUT is always supported for 1d.
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(x.size()), const_cast<double*>(x.data()),
                                    reinterpret_cast<fftw_complex*>(out.data()),
                                    FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

}  // namespace adtsim::fft
