#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "rfcmpc/plant_model.hpp"

using namespace rfcmpc;

TEST_CASE("SOEC threshold and efficiency branches") {
  const PlantParams p;
  // The coefficients give 554.274023 exactly; 554.27 is its two-decimal rounding.
  CHECK(soec_threshold_w_per_cell(1123.0, p) == doctest::Approx(oracle::threshold_w_per_cell(1123.0)).epsilon(1e-12));
  CHECK(std::abs(soec_threshold_w_per_cell(1123.0, p) - 554.27) < 0.005);
  CHECK(eta_el(0.2, 1123.0, p) == 0.74);
  CHECK(eta_el(1.6, 1123.0, p) == doctest::Approx(0.75357).epsilon(1e-5));
  CHECK(eta_el(1.6, 1123.0, p) == doctest::Approx(oracle::eta_el(1.6, 1123.0)).epsilon(1e-15));
  // Threshold itself is on the constant branch.
  CHECK(eta_el(soec_threshold_w_per_cell(1123.0, p) / 1000.0, 1123.0, p) == 0.74);
  CHECK_THROWS_AS(eta_el(-0.1, 1123.0, p), std::domain_error);
}

TEST_CASE("SOFC efficiency") {
  const PlantParams p;
  CHECK(eta_f(0.0, 1123.0, p) == doctest::Approx(0.6084).epsilon(1e-3));
  CHECK(eta_f(0.0, 1123.0, p) == doctest::Approx(oracle::eta_f(0.0, 1123.0)).epsilon(1e-15));
  CHECK(eta_f(0.4, 1123.0, p) == doctest::Approx(0.5243).epsilon(1e-3));
  CHECK(eta_f(0.0, 0.0, p) == 1e-6);  // raw value is -8.88
  CHECK_THROWS_AS(eta_f(-1.0, 1123.0, p), std::domain_error);
}

TEST_CASE("conversion curves") {
  const PlantParams p;
  CHECK(g_el(0.0, p) == 0.0);
  CHECK(g_f(0.0, p) == 0.0);
  CHECK(g_el(160.0, p) == doctest::Approx(120.57).epsilon(1e-4));
  CHECK(g_el(20.0, p) == doctest::Approx(14.8).epsilon(1e-12));
  CHECK(g_f(40.0, p) == doctest::Approx(76.29).epsilon(2e-3));
  CHECK(g_f(3.5, p) == doctest::Approx(3.5 / oracle::eta_f(0.035, 1123.0)).epsilon(1e-12));
  CHECK_THROWS_AS(g_el(5.0, p), std::domain_error);
  CHECK_THROWS_AS(g_el(161.0, p), std::domain_error);
  CHECK_THROWS_AS(g_f(1.0, p), std::domain_error);

  SUBCASE("SOEC produces less hydrogen than its input, SOFC consumes more than its output") {
    for (int i = 0; i <= 1000; ++i) {
      const double pel = p.p_el_min + (p.p_el_max - p.p_el_min) * i / 1000.0;
      const double pf = p.p_f_min + (p.p_f_max - p.p_f_min) * i / 1000.0;
      CHECK(g_el(pel, p) > 0.0);
      CHECK(g_el(pel, p) < pel);
      CHECK(g_f(pf, p) > pf);
    }
  }
}

TEST_CASE("tank update") {
  const PlantParams p;
  CHECK(soh_step(0.5, 0.0, 0.0, p) == 0.5);
  CHECK(soh_step(0.5, 80.0, 0.0, p) == doctest::Approx(0.55).epsilon(1e-15));
  CHECK(soh_step(0.1, 0.0, 160.0, p) == doctest::Approx(0.0).epsilon(1e-15));
  // Linear: the increment does not depend on h.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double a = 100.0 * u(rng), b = 100.0 * u(rng);
    CHECK(soh_step(0.2, a, b, p) - 0.2 == doctest::Approx(soh_step(0.7, a, b, p) - 0.7).epsilon(1e-12));
  }
  CHECK(soh_step(1.0, 80.0, 0.0, p) > 1.0);  // no clamping
}

TEST_CASE("RFC exchange sign convention") {
  const PlantParams p;
  CHECK(rfc_power(Mode::Sofc, 0.0, 40.0, p) == -40.0);
  CHECK(rfc_power(Mode::Soec, 50.0, 0.0, p) == 50.0);
  CHECK(rfc_power(Mode::TSoec, 0.0, 0.0, p) == 2.6);
  CHECK(rfc_power(Mode::TSofc, 0.0, 0.0, p) == 1.3);
  CHECK_THROWS_AS(rfc_power(Mode::Soec, 10.0, 5.0, p), std::domain_error);
  CHECK_THROWS_AS(rfc_power(Mode::TSofc, 10.0, 0.0, p), std::domain_error);
}

TEST_CASE("mode transitions") {
  CHECK_FALSE(legal_transition(Mode::Soec, Mode::Sofc));
  CHECK_FALSE(legal_transition(Mode::Soec, Mode::TSoec));
  CHECK_FALSE(legal_transition(Mode::Sofc, Mode::Soec));
  CHECK_FALSE(legal_transition(Mode::Sofc, Mode::TSofc));
  CHECK(legal_transition(Mode::TSoec, Mode::Soec));
  CHECK_FALSE(legal_transition(Mode::TSoec, Mode::TSoec));
  CHECK(legal_transition(Mode::Soec, Mode::Soec));
  CHECK(legal_transition(Mode::Soec, Mode::TSofc));
  CHECK(legal_transition(Mode::TSofc, Mode::Sofc));

  SUBCASE("a direction change passes through exactly one transition mode") {
    // Shortest legal path from SOEC to SOFC and back.
    CHECK(legal_transition(Mode::Soec, Mode::TSofc));
    CHECK(legal_transition(Mode::TSofc, Mode::Sofc));
    CHECK(legal_transition(Mode::Sofc, Mode::TSoec));
    CHECK(legal_transition(Mode::TSoec, Mode::Soec));
    for (Mode a : kAllModes)
      for (Mode b : kAllModes)
        if (is_transition(a) && is_transition(b)) CHECK_FALSE(legal_transition(a, b));
  }
}

TEST_CASE("mode names round-trip") {
  for (Mode m : kAllModes) CHECK(parse_mode(to_string(m)) == m);
  CHECK_FALSE(parse_mode("soec").has_value());
}

TEST_CASE("switch history keeps the last window minus one modes") {
  PlantParams p;
  p.switch_window = 4;
  PlantState s;
  for (Mode m : {Mode::Soec, Mode::TSofc, Mode::Sofc, Mode::Sofc, Mode::TSoec}) s.record(m, p);
  REQUIRE(s.switch_history.size() == 3);
  CHECK(s.switch_history.front() == Mode::Sofc);
  CHECK(s.switch_history.back() == Mode::TSoec);
}

TEST_CASE("income") {
  const PlantParams p;
  CHECK(income_step(0.0, 0.0, 0.05, p) == 0.0);
  CHECK(income_step(80.0, 100.0, 0.05, p) == doctest::Approx(3.63).epsilon(1e-12));
  CHECK(income_step(100.0, 100.0, 0.0, p) == doctest::Approx(2.975).epsilon(1e-12));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double pe = 300.0 * u(rng), pac = pe * u(rng), ce = 0.2 * u(rng);
    CHECK(income_step(pac, pe, ce, p) >= 0.0);
    CHECK(income_step(pac, pe + 1.0, ce, p) >= income_step(pac, pe, ce, p));
    CHECK(income_step(std::min(pe, pac + 1.0), pe, ce, p) >= income_step(pac, pe, ce, p));
  }
}

TEST_CASE("parameter validation") {
  PlantParams p;
  CHECK_NOTHROW(p.validate());
  p.p_el_min = 200.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = PlantParams{};
  p.e_h = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = PlantParams{};
  p.max_switches = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = PlantParams{};
  p.c_m = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK(hydrogen_kg(1000.0) == 30.0);
}
