#include <gtest/gtest.h>

#include <atomic>

#include "pcornet/error.hpp"
#include "pcornet/ggm.hpp"
#include "pcornet/netgen.hpp"
#include "pcornet/parallel.hpp"
#include "oracles.hpp"

using namespace pcornet;

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(500);
  parallel_for(500, Execution::parallel, [&](std::ptrdiff_t i) { ++hits[static_cast<std::size_t>(i)]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelFor, LowestFailingIndexWins) {
  try {
    parallel_for(100, Execution::parallel, [](std::ptrdiff_t i) {
      if (i % 7 == 3) throw InvalidArgument("index " + std::to_string(i));
    });
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_STREQ(e.what(), "index 3");
  }
}

TEST(ParallelFor, JobsSetting) {
  const int before = jobs();
  set_jobs(2);
  EXPECT_EQ(jobs(), 2);
  set_jobs(before);
}

class SerialParallel : public ::testing::TestWithParam<Method> {};

TEST_P(SerialParallel, IdenticalEstimates) {
  const auto truth = simulate_pcor_density(12, 0.15, 5);
  const auto x = sample_data(truth, 25, 6);
  const int before = jobs();
  set_jobs(4);
  const auto par = estimate_network_matrix(x, GetParam(), 5, 9, Execution::parallel);
  set_jobs(before);
  const auto ser = estimate_network_matrix(x, GetParam(), 5, 9, Execution::serial);
  EXPECT_EQ(par.rho, ser.rho);
}

INSTANTIATE_TEST_SUITE_P(AllMethods, SerialParallel,
                         ::testing::Values(Method::shrink, Method::pls, Method::ridge, Method::lasso,
                                           Method::adalasso),
                         [](const auto& info) { return std::string(to_string(info.param)); });
