#include <atomic>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "growthlab/errors.hpp"
#include "growthlab/numerics.hpp"
#include "growthlab/parallel.hpp"

using namespace growthlab;

TEST_CASE("compensated sum keeps small terms next to a large one") {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000000; ++i) s.add(1e-16);
  s.add(-1.0);
  CHECK(s.value() == doctest::Approx(1e-10).epsilon(1e-9));

  double naive = 1.0;
  for (int i = 0; i < 1000000; ++i) naive += 1e-16;
  CHECK(naive - 1.0 == 0.0);
}

TEST_CASE("bisect_root") {
  const double r = bisect_root([](double x) { return x * x - 2.0; }, 0.0, 2.0);
  CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(bisect_root([](double x) { return x * x + 1.0; }, 0.0, 1.0), ArgumentError);
}

TEST_CASE("adaptive_simpson") {
  CHECK(adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-11));
  // sqrt has an unbounded derivative at 0, so the subdivision has to go deep there.
  CHECK(adaptive_simpson([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-10) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK_THROWS_AS(adaptive_simpson([](double x) { return 1.0 / x; }, -1.0, 1.0, 1e-10, 10),
                  PrecisionError);
}

TEST_CASE("smooth step") {
  CHECK(smooth_step(0.0) == 0.0);
  CHECK(smooth_step(1.0) == 1.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  for (double s : {0.1, 0.3, 0.7}) {
    CHECK(smooth_step(s) + smooth_step(1.0 - s) == doctest::Approx(1.0));
    const double h = 1e-6;
    CHECK(smooth_step_derivative(s) ==
          doctest::Approx((smooth_step(s + h) - smooth_step(s - h)) / (2 * h)).epsilon(1e-7));
    CHECK(log_smooth_step(s) == doctest::Approx(std::log(smooth_step(s))));
  }
  // Far into the flat tail the value underflows but the log stays finite.
  CHECK(std::isfinite(log_smooth_step(1e-5)));
  CHECK(log_smooth_step(1e-5) == doctest::Approx(-1.0 / 1e-5).epsilon(1e-3));
}

TEST_CASE("plateau") {
  const Plateau p{0.0, 0.25, 0.75, 1.0};
  CHECK(p.value(-0.1) == 0.0);
  CHECK(p.value(0.5) == 1.0);
  CHECK(p.value(1.2) == 0.0);
  CHECK(p.value(0.125) == doctest::Approx(0.5));
  CHECK(p.log_value(-0.1) == -INFINITY);
  CHECK(p.log_complement(0.5) == -INFINITY);
  CHECK(p.log_complement(0.9) == doctest::Approx(std::log1p(-p.value(0.9))));
  const double h = 1e-6;
  CHECK(p.derivative(0.9) == doctest::Approx((p.value(0.9 + h) - p.value(0.9 - h)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("log_spaced_integers") {
  const auto v = log_spaced_integers(1000, 100000, 20);
  CHECK(v.size() == 20);
  CHECK(v.front() == 1000);
  CHECK(v.back() == 100000);
  CHECK(std::is_sorted(v.begin(), v.end()));
  const auto small = log_spaced_integers(1, 4, 20);
  CHECK(small == std::vector<std::int64_t>{1, 2, 3, 4});
}

TEST_CASE("holder seminorm") {
  std::vector<double> lin(101);
  for (int i = 0; i <= 100; ++i) lin[i] = 3.0 * i / 100.0;
  CHECK(holder_seminorm(lin, 0.01, 1.0) == doctest::Approx(3.0));
  std::vector<double> sq(1001);
  for (int i = 0; i <= 1000; ++i) sq[i] = std::sqrt(i / 1000.0);
  CHECK(holder_seminorm(sq, 0.001, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("log_add_exp and binomial") {
  CHECK(log_add_exp(std::log(2.0), std::log(3.0)) == doctest::Approx(std::log(5.0)));
  CHECK(log_add_exp(-INFINITY, 1.0) == 1.0);
  CHECK(log_add_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(binomial(8, 3) == 56.0);
}

TEST_CASE("parallel_for visits each index once and rethrows the lowest failure") {
  for (int workers : {1, 2, 7}) {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
  try {
    parallel_for(100, 4, [](std::size_t i) {
      if (i == 30 || i == 80) throw ArgumentError(std::to_string(i));
    });
    FAIL("expected a throw");
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()) == "30");
  }
}
