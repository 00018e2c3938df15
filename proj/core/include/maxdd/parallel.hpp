#pragma once

#include <functional>

namespace maxdd {

/// Worker count for subdomain-parallel loops, from MAXDD_NUM_THREADS (default 1).
int worker_count();
void set_worker_count(int workers);

/// Runs body(i) for i in [0, count). Callers must not depend on the order.
void parallel_for(int count, const std::function<void(int)>& body);

}  // namespace maxdd
