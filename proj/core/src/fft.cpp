#include "arsar/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace arsar::fft {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once under a lock and never destroyed.
struct PlanKey {
    int n, howmany, stride, dist, sign;
    auto tie() const { return std::tie(n, howmany, stride, dist, sign); }
    bool operator<(const PlanKey& o) const { return tie() < o.tie(); }
};

fftw_plan get_plan(const PlanKey& key) {
    static std::mutex mu;
    static std::map<PlanKey, fftw_plan> cache;
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(key.n) * key.howmany);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const int n = key.n;
    fftw_plan plan = fftw_plan_many_dft(1, &n, key.howmany, buf, nullptr, key.stride, key.dist, buf, nullptr,
                                        key.stride, key.dist, key.sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(key, plan);
    return plan;
}

void run(ComplexImage& a, const PlanKey& key, double scale) {
    if (a.empty()) return;
    auto* p = reinterpret_cast<fftw_complex*>(a.data().data());
    fftw_execute_dft(get_plan(key), p, p);
    for (auto& v : a.data()) v *= scale;
}

int sign_of(Direction d) { return d == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD; }

}  // namespace

void along_azimuth(ComplexImage& a, Direction dir) {
    const int n = static_cast<int>(a.cols());
    run(a, {n, static_cast<int>(a.rows()), 1, n, sign_of(dir)}, 1.0 / std::sqrt(static_cast<double>(n)));
}

void along_range(ComplexImage& a, Direction dir) {
    const int n = static_cast<int>(a.rows());
    const int cols = static_cast<int>(a.cols());
    run(a, {n, cols, cols, 1, sign_of(dir)}, 1.0 / std::sqrt(static_cast<double>(n)));
}

double fft_frequency(std::size_t k, std::size_t n, double rate) {
    const double kk = k <= n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
    return kk * rate / static_cast<double>(n);
}

}  // namespace arsar::fft
