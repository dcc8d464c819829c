#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "eitcool/analytic_rates.hpp"
#include "eitcool/errors.hpp"
#include "eitcool/internal_dynamics.hpp"
#include "support.hpp"

using namespace eitcool;
using testsupport::relative;

TEST_CASE("optimal conditions") {
  const auto c = optimal_conditions(1.0, 1.0, 1.0, 0.05);
  CHECK(std::abs(c.nu - 0.2909645) < 1e-6);
  CHECK(c.delta3 == 1.0);
  CHECK(c.delta2 == doctest::Approx(1.0 - c.nu));

  const auto ca = optimal_conditions(2.5, 0.8, 0.8944, 0.1);
  CHECK(ca.nu == doctest::Approx(0.10092).epsilon(1e-4));

  // Omega_2 = 0 reduces to the single-EIT expression.
  const double d = 1.7, o1 = 0.9, o3 = 0.3;
  CHECK(optimal_conditions(d, o1, 0.0, o3).nu == doctest::Approx(0.5 * (std::sqrt(d * d + o1 * o1 + o3 * o3) - d)));

  CHECK_THROWS_AS(optimal_conditions(0.0, 1.0, 1.0, 0.1), DomainError);
  CHECK_THROWS_AS(optimal_conditions(-1.0, 1.0, 1.0, 0.1), DomainError);
  CHECK_THROWS_AS(optimal_conditions(1.0, -1.0, 1.0, 0.1), DomainError);
}

TEST_CASE("trap-matched residual") {
  CHECK(std::abs(trap_matched_residual(preset("ca-ii"))) < 1e-2);
  CHECK(std::abs(trap_matched_residual(preset("hg-iii"))) < 1e-12);
  CHECK(std::abs(trap_matched_residual(preset("fig2a"))) < 1e-12);
  Scenario doubled = preset("hg-iii");
  doubled.trap.frequency *= 2.0;
  const double r = trap_matched_residual(doubled);
  CHECK(r != 0.0);
  CHECK(std::abs(r) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("heating cancels at the optimum") {
  const Scenario s = preset("fig2a");
  const auto r = rate_coefficients(s);
  CHECK(r.a_plus == 0.0);
  const double eta = s.relevant_lamb_dicke();
  CHECK(r.a_minus == doctest::Approx(eta * eta * (1.0 / (1.0 + 0.0025)) * 0.0025).epsilon(1e-12));
}

TEST_CASE("ca-ii cooling coefficient") {
  // Completed to the exact optimum, A- = eta^2 Omega_1^2 / N^2 * Omega_3^2 / gamma.
  const Scenario lit = preset("ca-ii");
  const auto c = optimal_conditions(2.5, 0.8, 0.8944, 0.1);
  const Scenario s = testsupport::tripod(2.5, c.delta2, c.delta3, 0.8, 0.8944, 0.1, c.nu, 0.0725, 0.0725, -0.0725);
  const auto r = rate_coefficients(s);
  CHECK(r.a_plus == 0.0);
  CHECK(relative(r.a_minus, 2.0702e-4) < 1e-3);
  // As stored (nu = 0.1, Delta_2 = 2.4) the optimum holds only to four digits.
  const auto q = rate_coefficients(lit);
  CHECK(q.a_plus == 0.0);
  CHECK(relative(q.a_minus, 2.0702e-4) < 5e-3);
}

TEST_CASE("closed form preconditions") {
  CHECK_THROWS_AS(rate_coefficients(preset("fig2b")), PreconditionError);
  CHECK_THROWS_AS(rate_coefficients(preset("fig2a").with_cooling_detuning(1.2)), PreconditionError);
}

TEST_CASE("Omega_2 = 0 reproduces the single-EIT formula") {
  testsupport::Draw draw(7);
  for (int k = 0; k < 20; ++k) {
    const double d = draw.positive(5.0), o1 = draw.positive(2.0), o3 = draw.positive(2.0);
    const double nu = draw(0.05, 1.0), eta = draw(0.02, 0.2);
    const Scenario s = testsupport::tripod(d, draw(-5.0, 5.0), d, o1, 0.0, o3, nu, eta / 2, 0.1, -eta / 2);
    const auto r = rate_coefficients(s);
    const auto ref = testsupport::three_level_rates(d, o1, o3, 1.0, nu, eta);
    CHECK(relative(r.a_plus, ref.a_plus) < 1e-12);
    CHECK(relative(r.a_minus, ref.a_minus) < 1e-12);
  }
  // M = 2 documents take the same route.
  const Scenario ca1 = preset("ca-i");
  const auto r = rate_coefficients(ca1);
  const auto ref = testsupport::three_level_rates(2.5, 1.0, 0.1, 1.0, 0.1, 0.145);
  CHECK(relative(r.a_plus, ref.a_plus) < 1e-12);
  CHECK(relative(r.a_minus, ref.a_minus) < 1e-12);
}

TEST_CASE("single-EIT optimum limit") {
  for (double d : {0.7, 2.5, 4.0}) {
    const double o1 = 1.0, o3 = 0.1;
    const double nu = optimal_conditions(d, o1, 0.0, o3).nu;
    const Scenario s = testsupport::tripod(d, d - nu, d, o1, 0.0, o3, nu, 0.07, 0.07, -0.07);
    const auto r = rate_coefficients(s);
    CHECK(r.a_plus > 0.0);
    const auto f = cooling_rate_and_limit(r);
    CHECK(f.n_ss > 0.0);
    CHECK(relative(f.n_ss, 1.0 / (16.0 * d * d)) < 1e-10);
  }
}

TEST_CASE("optimum identity over random parameters") {
  const auto scenarios = testsupport::random_optimal_tripods(200, 99);
  for (const Scenario& s : scenarios) {
    const TripodParameters p = tripod_parameters(s);
    const double n2 = p.omega1 * p.omega1 + p.omega3 * p.omega3;
    const double scale = n2 / 4.0 + p.nu * (p.nu + p.delta);
    CHECK(std::abs(rate_bracket(p, -1)) <= 1e-10 * scale);
    const auto r = rate_coefficients(p);
    CHECK(r.a_plus == 0.0);
    const double expected = p.eta * p.eta * p.omega1 * p.omega1 / n2 * p.omega3 * p.omega3 / p.gamma3;
    CHECK(relative(r.a_minus, expected) <= 1e-10);
  }
}

TEST_CASE("matched trap frequency maximizes red-sideband absorption") {
  // The dressed-state peak sits at Delta_1 + nu for a weak cooling laser.
  testsupport::Draw draw(4242);
  for (int k = 0; k < 5; ++k) {
    const Scenario s = testsupport::optimal_tripod(draw(0.5, 5.0), draw(0.3, 2.0), draw(0.3, 2.0), draw(0.01, 0.05));
    const double d1 = s.lowers[0].drive.detuning, nu = s.trap.frequency;
    const SpectrumTrace t = absorption_sweep(s, d1 + 0.5 * nu, d1 + 1.5 * nu, 401);
    auto best = std::max_element(t.points.begin(), t.points.end(),
                                 [](const auto& a, const auto& b) { return a.absorption < b.absorption; });
    CHECK(std::abs(best->delta3 - (d1 + nu)) <= nu / 400.0 + 1e-12);
  }
}

TEST_CASE("scale covariance and eta factorization") {
  const Scenario s = testsupport::tripod(2.1, 1.6, 2.1, 0.9, 0.6, 0.3, 0.25, 0.04, 0.05, -0.03);
  const auto r = rate_coefficients(s);
  const auto r3 = rate_coefficients(s.scaled(3.0));
  CHECK(relative(r3.a_plus, 3.0 * r.a_plus) < 1e-12);
  CHECK(relative(r3.a_minus, 3.0 * r.a_minus) < 1e-12);
  const auto f = cooling_rate_and_limit(r), f3 = cooling_rate_and_limit(r3);
  CHECK(relative(f3.w, 3.0 * f.w) < 1e-12);
  CHECK(relative(f3.n_ss, f.n_ss) < 1e-12);

  Scenario other = s;
  other.lowers[0].drive.lamb_dicke_projection = 0.2;
  other.lowers[2].drive.lamb_dicke_projection = -0.1;
  const auto q = rate_coefficients(other);
  const double e1 = s.relevant_lamb_dicke(), e2 = other.relevant_lamb_dicke();
  CHECK(relative(q.a_plus / (e2 * e2), r.a_plus / (e1 * e1)) < 1e-12);
  CHECK(relative(q.a_minus / (e2 * e2), r.a_minus / (e1 * e1)) < 1e-12);
}

TEST_CASE("cooling rate and limit") {
  const auto a = cooling_rate_and_limit({0.0, 3.0});
  CHECK(a.w == 3.0);
  CHECK(a.n_ss == 0.0);
  CHECK(cooling_rate_and_limit({1.0, 2.0}).n_ss == 1.0);
  CHECK_THROWS_AS(cooling_rate_and_limit({2.0, 2.0}), HeatingRegimeError);
  CHECK_THROWS_AS(cooling_rate_and_limit({3.0, 2.0}), HeatingRegimeError);
}

TEST_CASE("closed-form mean phonon number") {
  const RateCoefficients r{0.01, 0.05};
  const double n_ss = 0.25;
  CHECK(mean_n_closed_form(r, 3.0, 0.0) == 3.0);
  CHECK(std::abs(mean_n_closed_form(r, 3.0, 50.0 / 0.04) - n_ss) <= 1e-15);
  for (double t : {0.0, 1.0, 100.0}) CHECK(mean_n_closed_form(r, n_ss, t) == doctest::Approx(n_ss).epsilon(1e-15));
  CHECK_THROWS_AS(mean_n_closed_form({1.0, 1.0}, 1.0, 1.0), PreconditionError);
}

TEST_CASE("rate equation") {
  SUBCASE("pure decay chain") {
    MotionalDistribution p0{std::vector<double>(8, 0.0)};
    p0.populations.back() = 1.0;
    const auto p = rate_equation_evolve({0.0, 1.0}, p0, 60.0);
    CHECK(p.populations[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.total() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("frozen") {
    const auto p0 = MotionalDistribution::thermal(1.0, 10);
    const auto p = rate_equation_evolve({0.0, 0.0}, p0, 5.0);
    for (std::size_t n = 0; n < 10; ++n) CHECK(p.populations[n] == doctest::Approx(p0.populations[n]));
  }
  SUBCASE("first moment follows the closed form") {
    const RateCoefficients r{0.002, 0.05};
    const auto p0 = MotionalDistribution::thermal(0.5, 40);
    for (double t : {0.0, 3.0, 20.0, 100.0, 500.0}) {
      std::vector<std::string> warnings;
      const auto p = rate_equation_evolve(r, p0, t, &warnings);
      CHECK(p.populations.back() < 1e-8);
      CHECK(warnings.empty());
      CHECK(std::abs(p.total() - 1.0) <= 1e-9);
      CHECK(std::abs(p.mean() - mean_n_closed_form(r, p0.mean(), t)) <= 1e-6);
    }
  }
  SUBCASE("boundary warning") {
    const auto p0 = MotionalDistribution::thermal(1.0, 5);
    std::vector<std::string> warnings;
    rate_equation_evolve({1.0, 1.1}, p0, 10.0, &warnings);
    CHECK(warnings.size() == 1);
  }
  SUBCASE("thermal distribution") {
    const auto p = MotionalDistribution::thermal(1.0, 10);
    CHECK(p.total() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.mean() == doctest::Approx(testsupport::truncated_thermal_mean(1.0, 10)).epsilon(1e-14));
  }
}
