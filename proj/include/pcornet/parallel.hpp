#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace pcornet {

enum class Execution { serial, parallel };

/// Upper bound on OpenMP worker threads for subsequent parallel regions.
void set_jobs(int jobs);
int jobs();

/// Runs body(i) for i in [0, count). With Execution::parallel the iterations
/// are spread over OpenMP threads; an exception thrown by any iteration is
/// rethrown after the loop, the one from the lowest index first.
template <typename Body>
void parallel_for(std::ptrdiff_t count, Execution execution, Body&& body) {
  if (execution == Execution::serial) {
    for (std::ptrdiff_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count > 0 ? count : 0));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace pcornet
