#include "pcornet/format.hpp"

#include <charconv>
#include <cmath>

#include <omp.h>

#include "pcornet/parallel.hpp"

namespace pcornet {

std::string format_number(double x) {
  if (std::isnan(x)) return "NA";
  if (x == 0.0) return "0";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string format_number(const std::optional<double>& x) { return x ? format_number(*x) : "NA"; }

void set_jobs(int jobs) {
  if (jobs > 0) omp_set_num_threads(jobs);
}

int jobs() { return omp_get_max_threads(); }

}  // namespace pcornet
