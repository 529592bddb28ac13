#pragma once

namespace trw {

// Worker-thread cap shared by all OpenMP kernels. Initialized once from
// TIMEREWIND_NUM_THREADS (falls back to the OpenMP default). Kernels are
// written so results do not depend on the thread count; the cap only
// controls resource usage.
int thread_cap();
void set_thread_cap(int n);
void init_threading_from_env();

}  // namespace trw
