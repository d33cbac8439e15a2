#include <doctest.h>

#include <sstream>

#include "srcdelay/source_delay.hpp"

using namespace srcdelay;

namespace {

PhaseTypeRep geometric(double stay) {
  PhaseTypeRep rep;
  rep.pi_minus = RowVector::Ones(1);
  rep.T = Matrix::Constant(1, 1, stay);
  rep.c_plus = Vector::Constant(1, 1.0 - stay);
  return rep;
}

NetworkConfig reference_config() {
  NetworkConfig cfg;
  cfg.n = 100;
  cfg.m = 8;
  cfg.M = 7;
  cfg.f = 2;
  cfg.q = 0.4;
  cfg.lambda = 0.001;
  return cfg;
}

struct Series {
  double mass = 0.0;
  double first = 0.0;
  double second = 0.0;
};

// Plain term-by-term sums of u^k pmf(u), carried in long double.
Series series_moments(const PhaseTypeRep& rep, std::int64_t horizon) {
  Series s;
  long double mass = 0, first = 0, second = 0;
  RowVector v = rep.pi_minus;
  for (std::int64_t u = 1; u <= horizon; ++u) {
    const long double p = v.dot(rep.c_plus.transpose());
    mass += p;
    first += p * u;
    second += p * u * u;
    v = v * rep.T;
  }
  s.mass = static_cast<double>(mass);
  s.first = static_cast<double>(first);
  s.second = static_cast<double>(second);
  return s;
}

}  // namespace

TEST_CASE("geometric delay") {
  const auto rep = geometric(61.0 / 64.0);
  CHECK(mean(rep) == doctest::Approx(64.0 / 3.0).epsilon(1e-14));
  CHECK(variance(rep) == doctest::Approx(3904.0 / 9.0).epsilon(1e-13));
  CHECK(pmf(rep, 1) == doctest::Approx(3.0 / 64.0));
  CHECK(pmf(rep, 3) == doctest::Approx(3.0 / 64.0 * (61.0 / 64.0) * (61.0 / 64.0)));
  CHECK(cdf(rep, 0) == 0.0);
  CHECK(tail(rep, 10) == doctest::Approx(std::pow(61.0 / 64.0, 10)).epsilon(1e-13));
  // smallest u with 1 - (61/64)^u >= 1/2
  const auto median = static_cast<std::int64_t>(std::ceil(std::log(0.5) / std::log(61.0 / 64.0)));
  CHECK(quantile(rep, 0.5) == median);
}

TEST_CASE("one-slot buffer is geometric in the contact probabilities") {
  for (int n : {10, 100, 500})
    for (double q : {0.1, 0.5, 0.9}) {
      NetworkConfig cfg = reference_config();
      cfg.n = n;
      cfg.q = q;
      cfg.M = 1;
      cfg.f = 1;
      const auto p = contact_probabilities(cfg);
      const auto rep = phase_type(cfg);
      const double s = p.p0 + p.p1;
      CHECK(std::abs(mean(rep) * s - 1.0) <= 1e-14);
      CHECK(std::abs(variance(rep) * s * s / p.p2 - 1.0) <= 1e-13);
    }
}

TEST_CASE("certain delivery takes exactly one slot") {
  const auto rep = geometric(0.0);
  CHECK(pmf(rep, 1) == 1.0);
  CHECK(pmf(rep, 2) == 0.0);
  CHECK(mean(rep) == 1.0);
  CHECK(variance(rep) == 0.0);
  CHECK(quantile(rep, 0.99) == 1);
  CHECK(adaptive_horizon(rep) == kHorizonStart);
}

TEST_CASE("closed-form moments equal the series") {
  for (const auto& cfg : {reference_config(), [] {
         auto c = reference_config();
         c.M = 3;
         c.f = 3;
         c.lambda = 0.005;
         return c;
       }()}) {
    const auto rep = phase_type(cfg);
    const auto horizon = adaptive_horizon(rep);
    const auto s = series_moments(rep, horizon);
    const double m = mean(rep);
    const double v = variance(rep);
    CHECK(s.mass >= 1.0 - 1e-9);
    CHECK(std::abs(s.first - m) / m <= 1e-6);
    CHECK(std::abs(s.second - s.first * s.first - v) / v <= 1e-6);
    CHECK(tail(rep, horizon) <= 1e-12);
  }
}

TEST_CASE("table, cdf and pmf are consistent") {
  const auto rep = phase_type(reference_config());
  const auto table = tabulate(rep, 2000);
  REQUIRE(table.pmf.size() == 2001);
  CHECK(table.pmf[0] == 0.0);
  CHECK(table.cdf[0] == 0.0);
  for (std::int64_t u : {1, 2, 17, 206, 1999}) {
    const auto i = static_cast<std::size_t>(u);
    CHECK(table.pmf[i] == doctest::Approx(pmf(rep, u)).epsilon(1e-12));
    CHECK(table.cdf[i] == doctest::Approx(cdf(rep, u)).epsilon(1e-12));
    CHECK(table.cdf[i] - table.cdf[i - 1] == doctest::Approx(table.pmf[i]).epsilon(1e-9));
    CHECK(cdf(rep, u) + tail(rep, u) == doctest::Approx(1.0).epsilon(1e-14));
  }
  for (std::size_t u = 1; u < table.cdf.size(); ++u) CHECK(table.cdf[u] >= table.cdf[u - 1]);
  CHECK_THROWS(pmf(rep, 0));
}

TEST_CASE("quantiles bracket the target") {
  const auto rep = phase_type(reference_config());
  for (double p : {0.01, 0.5, 0.9, 0.99, 0.999}) {
    const auto u = quantile(rep, p);
    CHECK(cdf(rep, u) >= p);
    CHECK(cdf(rep, u - 1) < p);
  }
  CHECK_THROWS(quantile(rep, 1.0));
  const auto stats = summarize(rep);
  CHECK(stats.p50 <= stats.p90);
  CHECK(stats.p90 <= stats.p99);
  CHECK(stats.std_dev * stats.std_dev == doctest::Approx(stats.variance));
}

TEST_CASE("no traffic has no conditional law") {
  auto cfg = reference_config();
  cfg.lambda = 0.0;
  CHECK_THROWS_WITH_AS(phase_type(cfg), "lambda > 0 required for conditional distribution", std::invalid_argument);
}

TEST_CASE("cdf csv round-trips") {
  const auto rep = phase_type(reference_config());
  const auto table = tabulate(rep, 50);
  std::ostringstream out;
  write_cdf_csv(out, table);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "u,cdf");
  std::size_t u = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    CHECK(std::stoul(line.substr(0, comma)) == u);
    CHECK(std::stod(line.substr(comma + 1)) == table.cdf[u]);
    ++u;
  }
  CHECK(u == 51);
}
