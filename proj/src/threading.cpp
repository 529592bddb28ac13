#include "trw/threading.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace trw {

namespace {
int g_cap = 0;  // 0 = uninitialized
}

int thread_cap() {
    if (g_cap == 0) init_threading_from_env();
    return g_cap;
}

void set_thread_cap(int n) {
    if (n < 1) n = 1;
    g_cap = n;
    omp_set_num_threads(n);
}

void init_threading_from_env() {
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("TIMEREWIND_NUM_THREADS")) {
        try {
            int v = std::stoi(env);
            if (v >= 1) n = v;
        } catch (...) {
            // ignore malformed values, keep the OpenMP default
        }
    }
    set_thread_cap(n);
}

}  // namespace trw
