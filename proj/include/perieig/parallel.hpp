#pragma once

#include <exception>
#include <mutex>

namespace perieig {

/// Every parallel kernel also has a serial reference path selected by this flag.
enum class Execution { serial, parallel };

/// Runs body(i) for i in [0, count). In parallel mode iterations are spread over
/// OpenMP threads; the first exception thrown by any iteration is rethrown.
template <class Body>
void for_each_index(int count, Execution mode, Body&& body) {
    if (mode == Execution::serial || count < 2) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr error;
    std::mutex guard;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
        try {
            body(i);
        } catch (...) {
            std::lock_guard lock(guard);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

void set_thread_count(int threads);
int thread_count();

}  // namespace perieig
