#include "perieig/dct.hpp"

#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "perieig/error.hpp"

namespace perieig {

namespace {
std::mutex& planner_lock() {
    static std::mutex m;
    return m;
}
}  // namespace

Dct1::Dct1(int n) : n_(n), plan_(nullptr) {
    if (n < 2) fail(ErrorKind::dimension, "DCT-I needs at least 2 points");
    std::vector<double> scratch(n);
    std::lock_guard lock(planner_lock());
    // ESTIMATE keeps planning independent of timing, so results are reproducible.
    plan_ = fftw_plan_r2r_1d(n, scratch.data(), scratch.data(), FFTW_REDFT00, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_) fail(ErrorKind::dimension, "FFTW could not plan a DCT-I");
}

Dct1::~Dct1() {
    std::lock_guard lock(planner_lock());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void Dct1::apply(double* data) const { fftw_execute_r2r(static_cast<fftw_plan>(plan_), data, data); }

std::shared_ptr<const Dct1> dct1_for(int n) {
    static std::mutex m;
    static std::map<int, std::shared_ptr<const Dct1>> cache;
    std::lock_guard lock(m);
    auto& slot = cache[n];
    if (!slot) slot = std::make_shared<const Dct1>(n);
    return slot;
}

}  // namespace perieig
