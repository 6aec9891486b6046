#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <vector>

namespace clm::fft {

// FFTW plan cache. Plans are created once per (kind, shape) with
// FFTW_ESTIMATE | FFTW_UNALIGNED so that execution is deterministic and valid
// on any caller buffer via the new-array interface. Plan creation is
// serialized; execution is thread-safe.

namespace detail {

using PlanKey = std::vector<int>;

inline std::map<PlanKey, fftw_plan>& plan_cache() {
    static std::map<PlanKey, fftw_plan> cache;
    return cache;
}

inline std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

constexpr int kind_dst2 = 0;
constexpr int kind_dft_fwd = 1;
constexpr int kind_dft_bwd = 2;

inline fftw_plan get_plan(const PlanKey& key) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto& cache = plan_cache();
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    fftw_plan plan = nullptr;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (key[0] == kind_dst2) {
        const int m = key[1];
        std::vector<double> in(static_cast<std::size_t>(m) * m), out(in.size());
        plan = fftw_plan_r2r_2d(m, m, in.data(), out.data(), FFTW_RODFT00, FFTW_RODFT00, flags);
    } else {
        const int rank = static_cast<int>(key.size()) - 1;
        std::size_t total = 1;
        for (int d = 0; d < rank; ++d) total *= static_cast<std::size_t>(key[1 + d]);
        std::vector<std::complex<double>> in(total), out(total);
        plan = fftw_plan_dft(rank, key.data() + 1, reinterpret_cast<fftw_complex*>(in.data()),
                             reinterpret_cast<fftw_complex*>(out.data()),
                             key[0] == kind_dft_fwd ? FFTW_FORWARD : FFTW_BACKWARD, flags);
    }
    cache.emplace(key, plan);
    return plan;
}

}  // namespace detail

/// Unnormalized 2D DST-I (RODFT00 on both axes) of an m x m array.
inline void dst2_raw(const double* in, double* out, int m) {
    fftw_plan plan = detail::get_plan({detail::kind_dst2, m});
    fftw_execute_r2r(plan, const_cast<double*>(in), out);
}

/// Unnormalized complex DFT, sign = -1 forward / +1 backward.
inline void dft_raw(int rank, const int* dims, const std::complex<double>* in,
                    std::complex<double>* out, int sign) {
    detail::PlanKey key;
    key.push_back(sign < 0 ? detail::kind_dft_fwd : detail::kind_dft_bwd);
    for (int d = 0; d < rank; ++d) key.push_back(dims[d]);
    fftw_plan plan = detail::get_plan(key);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace clm::fft
