#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "mdabc/dataset.hpp"
#include "mdabc/errors.hpp"
#include "mdabc/grid.hpp"
#include "mdabc/kde.hpp"
#include "mdabc/rng.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Independent reference: one exp() per (point, cell) pair, no factorization.
std::vector<double> naive_kde(const std::vector<double>& data, double h,
                              const mdabc::IntegrationGrid& grid) {
  std::vector<double> out(static_cast<std::size_t>(grid.size()), 0.0);
  for (int j = 0; j < grid.size(); ++j) {
    double sum = 0.0;
    for (double d : data) sum += mdabc::normal_pdf(grid.point(j), d, h);
    out[static_cast<std::size_t>(j)] = sum / static_cast<double>(data.size());
  }
  return out;
}

}  // namespace

TEST_CASE("empirical distribution function counts points at or below x") {
  mdabc::EmpiricalMeasure m(std::vector<double>{3.0, 1.0, 2.0});
  REQUIRE(m.sorted_values() == std::vector<double>{1.0, 2.0, 3.0});
  REQUIRE_THAT(mdabc::ecdf_eval(m, 2.0), WithinAbs(2.0 / 3.0, 1e-15));
  REQUIRE_THAT(mdabc::ecdf_eval(m, 0.5), WithinAbs(0.0, 0.0));
  REQUIRE_THAT(mdabc::ecdf_eval(m, 3.0), WithinAbs(1.0, 0.0));
  REQUIRE_THAT(mdabc::ecdf_eval(m, 100.0), WithinAbs(1.0, 0.0));
  // Right continuity: mass at a point counts exactly at that point.
  REQUIRE_THAT(mdabc::ecdf_eval(m, 1.0), WithinAbs(1.0 / 3.0, 1e-15));
  REQUIRE_THAT(mdabc::ecdf_eval(m, 1.0 - 1e-9), WithinAbs(0.0, 0.0));
}

TEST_CASE("empirical distribution function at the sample median is central") {
  mdabc::RngStream rng(101);
  std::vector<double> draws(50);
  for (auto& v : draws) v = rng.uniform();
  mdabc::EmpiricalMeasure m(draws);
  const auto& s = m.sorted_values();
  const double median = 0.5 * (s[24] + s[25]);
  const double f = mdabc::ecdf_eval(m, median);
  REQUIRE(f >= 0.4);
  REQUIRE(f <= 0.6);
}

TEST_CASE("empirical measure keeps a sorted permutation of the sample") {
  mdabc::RngStream rng(7);
  std::vector<double> draws(100);
  for (auto& v : draws) v = rng.normal();
  mdabc::Dataset d{draws, true};
  mdabc::EmpiricalMeasure m(d);
  REQUIRE(std::is_sorted(m.sorted_values().begin(), m.sorted_values().end()));
  auto expectation = draws;
  std::sort(expectation.begin(), expectation.end());
  REQUIRE(m.sorted_values() == expectation);
  REQUIRE_THROWS_AS(mdabc::EmpiricalMeasure(std::vector<double>{}),
                    mdabc::DegenerateSample);
}

TEST_CASE("integration grid validates its shape") {
  REQUIRE_THROWS_AS(mdabc::IntegrationGrid(0.0, 1.0, 32), mdabc::InvalidParameter);
  REQUIRE_THROWS_AS(mdabc::IntegrationGrid(1.0, 1.0, 128), mdabc::InvalidParameter);
  mdabc::IntegrationGrid g(-2.0, 2.0, 65);
  REQUIRE(g.size() == 65);
  REQUIRE_THAT(g.point(0), WithinAbs(-2.0, 0.0));
  REQUIRE_THAT(g.point(64), WithinAbs(2.0, 1e-15));
  REQUIRE_THAT(g.step(), WithinAbs(4.0 / 64.0, 1e-15));
}

TEST_CASE("trapezoid quadrature integrates a parabola") {
  mdabc::IntegrationGrid g(0.0, 1.0, 101);
  std::vector<double> vals(101);
  for (int j = 0; j <= 100; ++j) vals[j] = g.point(j) * g.point(j);
  REQUIRE_THAT(mdabc::trapezoid(g, vals), WithinAbs(1.0 / 3.0, 1e-4));
  REQUIRE_THROWS_AS(mdabc::trapezoid(g, std::vector<double>(50, 1.0)),
                    mdabc::LengthMismatch);
}

TEST_CASE("bandwidth rule matches a hand-evaluated case") {
  // data {0,1,2,3,4}: sd = sqrt(2.5), IQR = 2 (type-7), n^(−1/5) = 5^(−0.2).
  const std::vector<double> data{0.0, 1.0, 2.0, 3.0, 4.0};
  const double expected = 0.9 * (2.0 / 1.34) * std::pow(5.0, -0.2);
  REQUIRE(2.0 / 1.34 < std::sqrt(2.5));
  REQUIRE_THAT(mdabc::silverman_bandwidth(data), WithinRel(expected, 1e-12));
}

TEST_CASE("bandwidth rule lands in the expected range for standard normal data") {
  mdabc::RngStream rng(3);
  std::vector<double> draws(100);
  for (auto& v : draws) v = rng.normal();
  const double bw = mdabc::silverman_bandwidth(draws);
  REQUIRE(bw > 0.2);
  REQUIRE(bw < 0.6);
}

TEST_CASE("bandwidth rule rejects degenerate samples") {
  REQUIRE_THROWS_AS(mdabc::silverman_bandwidth({1.0}), mdabc::DegenerateSample);
  REQUIRE_THROWS_AS(mdabc::silverman_bandwidth({2.0, 2.0, 2.0}),
                    mdabc::DegenerateSample);
}

TEST_CASE("bandwidth rule survives a collapsed interquartile range") {
  // IQR is zero but the spread is not; the rule must stay positive.
  const std::vector<double> data{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 5.0};
  REQUIRE(mdabc::silverman_bandwidth(data) > 0.0);
}

TEST_CASE("type-7 quantiles interpolate order statistics") {
  const std::vector<double> s{1.0, 2.0, 3.0, 4.0};
  REQUIRE_THAT(mdabc::quantile_type7(s, 0.0), WithinAbs(1.0, 0.0));
  REQUIRE_THAT(mdabc::quantile_type7(s, 1.0), WithinAbs(4.0, 0.0));
  REQUIRE_THAT(mdabc::quantile_type7(s, 0.5), WithinAbs(2.5, 1e-15));
  REQUIRE_THAT(mdabc::quantile_type7(s, 0.25), WithinAbs(1.75, 1e-15));
}

TEST_CASE("kernel estimate of a single point is the kernel itself") {
  mdabc::IntegrationGrid grid(-8.0, 8.0, 257);
  const auto d = mdabc::kde_smooth({0.0}, 1.0, grid);
  for (int j = 0; j < grid.size(); ++j) {
    REQUIRE_THAT(d.values[static_cast<std::size_t>(j)],
                 WithinAbs(mdabc::normal_pdf(grid.point(j)), 1e-12));
  }
}

TEST_CASE("factorized kernel rows agree with the direct per-cell evaluation") {
  mdabc::RngStream rng(17);
  std::vector<double> data(200);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = (i % 3 == 0) ? rng.normal(0.0, 0.2) : rng.normal(1.5, 2.0);
  }
  SECTION("ordinary bandwidth (factorized sweep path)") {
    mdabc::IntegrationGrid grid(-9.0, 11.0, 128);
    const auto fast = mdabc::kde_smooth(data, 0.7, grid);
    const auto slow = naive_kde(data, 0.7, grid);
    for (std::size_t j = 0; j < slow.size(); ++j) {
      REQUIRE_THAT(fast.values[j], WithinRel(slow[j], 1e-9));
    }
  }
  SECTION("bandwidth far below the cell width (direct path)") {
    mdabc::IntegrationGrid grid(-1.0, 1.0, 128);
    std::vector<double> tight(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) tight[i] = 0.8 * rng.uniform() - 0.4;
    const auto fast = mdabc::kde_smooth(tight, 1e-3, grid);
    const auto slow = naive_kde(tight, 1e-3, grid);
    for (std::size_t j = 0; j < slow.size(); ++j) {
      if (slow[j] > 1e-290) {
        REQUIRE_THAT(fast.values[j], WithinRel(slow[j], 1e-9));
      } else {
        REQUIRE(fast.values[j] <= 1e-290);
      }
    }
  }
  SECTION("points far outside the grid contribute only in-grid kernel mass") {
    mdabc::IntegrationGrid grid(-4.0, 4.0, 128);
    std::vector<double> spill = {0.0, 3.9, 4.2, 7.0, 1e9};
    std::vector<double> out;
    mdabc::detail::GaussianRowAccumulator acc(grid, 0.5);
    mdabc::detail::kde_accumulate(acc, spill, out);
    const auto slow = naive_kde(spill, 0.5, grid);
    for (std::size_t j = 0; j < slow.size(); ++j) {
      REQUIRE_THAT(out[j], WithinAbs(slow[j], 1e-9 * (1.0 + slow[j])));
    }
  }
}

TEST_CASE("kernel estimate recovers a standard normal density") {
  mdabc::RngStream rng(23);
  std::vector<double> draws(1000);
  for (auto& v : draws) v = rng.normal();
  const double bw = mdabc::silverman_bandwidth(draws);
  const auto [lo, hi] = std::minmax_element(draws.begin(), draws.end());
  mdabc::IntegrationGrid grid(*lo - 4.0 * bw, *hi + 4.0 * bw, 512);
  const auto d = mdabc::kde_smooth(draws, bw, grid);
  double worst = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    worst = std::max(worst, std::fabs(d.values[static_cast<std::size_t>(j)] -
                                      mdabc::normal_pdf(grid.point(j))));
  }
  REQUIRE(worst < 0.05);
  REQUIRE_THAT(mdabc::total_mass(d), WithinAbs(1.0, 1e-3));
}

TEST_CASE("kernel estimate commutes with reflection on a symmetric grid") {
  mdabc::RngStream rng(29);
  std::vector<double> draws(300);
  for (auto& v : draws) v = rng.normal(0.7, 1.3);
  std::vector<double> reflected(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) reflected[i] = -draws[i];
  mdabc::IntegrationGrid grid(-10.0, 10.0, 256);
  const auto d = mdabc::kde_smooth(draws, 0.4, grid);
  const auto r = mdabc::kde_smooth(reflected, 0.4, grid);
  for (int j = 0; j < grid.size(); ++j) {
    REQUIRE_THAT(r.values[static_cast<std::size_t>(j)],
                 WithinAbs(d.values[static_cast<std::size_t>(grid.size() - 1 - j)], 1e-9));
  }
}

TEST_CASE("kernel estimate validates inputs") {
  mdabc::IntegrationGrid grid(-1.0, 1.0, 64);
  REQUIRE_THROWS_AS(mdabc::kde_smooth({}, 1.0, grid), mdabc::DegenerateSample);
  REQUIRE_THROWS_AS(mdabc::kde_smooth({0.0}, 0.0, grid), mdabc::InvalidParameter);
  REQUIRE_THROWS_AS(mdabc::kde_smooth({0.0}, -1.0, grid), mdabc::InvalidParameter);
  // Kernel tails need 4 bandwidths of slack on each side.
  REQUIRE_THROWS_AS(mdabc::kde_smooth({0.0}, 1.0, grid), mdabc::GridTooNarrow);
}

TEST_CASE("model-density smoothing matches the Gaussian closed form") {
  // N(0,1) convolved with a Gaussian kernel of bandwidth h is N(0, 1 + h^2).
  const double h = 0.5;
  mdabc::IntegrationGrid grid(-9.0, 9.0, 512);
  const auto d = mdabc::smooth_model_density(
      [](double x) { return mdabc::normal_pdf(x); }, h, grid);
  const double sd = std::sqrt(1.0 + h * h);
  double worst = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    worst = std::max(worst, std::fabs(d.values[static_cast<std::size_t>(j)] -
                                      mdabc::normal_pdf(grid.point(j), 0.0, sd)));
  }
  REQUIRE(worst < 1e-3);
  REQUIRE_THAT(mdabc::total_mass(d), WithinAbs(1.0, 1e-2));
}

TEST_CASE("model-density smoothing approaches the identity as bandwidth shrinks") {
  mdabc::IntegrationGrid grid(-9.0, 9.0, 512);
  const auto d = mdabc::smooth_model_density(
      [](double x) { return mdabc::normal_pdf(x); }, 1e-3, grid);
  double worst = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    worst = std::max(worst, std::fabs(d.values[static_cast<std::size_t>(j)] -
                                      mdabc::normal_pdf(grid.point(j))));
  }
  REQUIRE(worst < 1e-2);
}

TEST_CASE("model-density smoothing rejects grids that lose mass") {
  mdabc::IntegrationGrid grid(-0.5, 0.5, 64);
  REQUIRE_THROWS_AS(mdabc::smooth_model_density(
                        [](double x) { return mdabc::normal_pdf(x); }, 0.3, grid),
                    mdabc::GridTooNarrow);
  // The unchecked variant reports whatever mass the grid captures.
  const auto d = mdabc::smooth_model_density(
      [](double x) { return mdabc::normal_pdf(x); }, 0.3, grid, false);
  REQUIRE(mdabc::total_mass(d) < 0.9);
}
