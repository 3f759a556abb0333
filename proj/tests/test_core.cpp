#include <doctest.h>

#include <cmath>

#include "spinbus/core.hpp"

using namespace spinbus;

TEST_CASE("stored constants match the published defaults exactly") {
    PhysicalConstants c;
    CHECK(c.zero_field_splitting == 2.87e9);
    CHECK(c.nv_hyperfine == 3.0e6);
    CHECK(c.n_hyperfine_par == -159.7e6);
    CHECK(c.n_hyperfine_perp == -113.8e6);
}

TEST_CASE("dipolar coupling reproduces both calibration pairs within 2%") {
    PhysicalConstants c;
    const double k16 = dipolar_coupling(c, 16.0);
    const double k181 = dipolar_coupling(c, 18.1);
    CHECK(std::abs(k16 / 12.6e3 - 1.0) < 0.02);
    CHECK(std::abs(k181 / 8.71e3 - 1.0) < 0.02);
}

TEST_CASE("dipolar coupling cubic law and domain error") {
    PhysicalConstants c;
    const double k = dipolar_coupling(c, 13.7);
    CHECK(dipolar_coupling(c, 2 * 13.7) == doctest::Approx(k / 8.0).epsilon(1e-12));
    CHECK_THROWS_AS(dipolar_coupling(c, 0.0), std::domain_error);
    CHECK_THROWS_AS(dipolar_coupling(c, -1.0), std::domain_error);
}

TEST_CASE("rotated hyperfine constants") {
    PhysicalConstants c;
    const auto r = rotated_hyperfine(c, JTAxis::Tilted1);
    // published values (-7.2, -12.5, -118.9) MHz
    CHECK(std::abs(r.alpha - (-7.2e6)) < 0.1e6);
    CHECK(std::abs(r.beta - (-12.5e6)) < 0.1e6);
    CHECK(std::abs(r.gamma - (-118.9e6)) < 0.1e6);
    // identity gamma = A_par/9 + 8 A_perp/9 to 1e-6 relative
    const double gamma_direct = c.n_hyperfine_par / 9.0 + 8.0 * c.n_hyperfine_perp / 9.0;
    CHECK(std::abs(r.gamma / gamma_direct - 1.0) < 1e-6);
    // effective splitting, evaluated independently from the stored constants
    const double split =
        std::sqrt(r.alpha * r.alpha + r.beta * r.beta + r.gamma * r.gamma);
    CHECK(r.splitting == doctest::Approx(split).epsilon(1e-12));
    CHECK(std::abs(r.splitting - 119.7e6) < 0.2e6);

    const auto par = rotated_hyperfine(c, JTAxis::Parallel);
    CHECK(par.alpha == 0.0);
    CHECK(par.beta == 0.0);
    CHECK(par.gamma == doctest::Approx(-159.7e6));
}

TEST_CASE("impurity line offsets") {
    PhysicalConstants c;
    const auto exact = impurity_line_offsets(c, false);
    CHECK(exact[0] == doctest::Approx(-79.85e6));
    CHECK(exact[1] == doctest::Approx(+79.85e6));
    CHECK(exact[2] == doctest::Approx(-59.45e6).epsilon(1e-3));
    CHECK(exact[3] == doctest::Approx(+59.45e6).epsilon(1e-3));
    // symmetric under negation
    CHECK(exact[0] == -exact[1]);
    CHECK(exact[2] == -exact[3]);
    const auto rounded = impurity_line_offsets(c, true);
    CHECK(rounded[0] == 80e6);
    CHECK(rounded[1] == -80e6);
    CHECK(rounded[2] == 60e6);
    CHECK(rounded[3] == -60e6);
}

TEST_CASE("Arrhenius JT relaxation") {
    PhysicalConstants c;
    // direct evaluation oracle with k = 8.617e-5 eV/K
    auto direct = [&](double t) { return 4e12 * std::exp(-0.76 / (8.617333e-5 * t)); };
    CHECK(jt_relaxation_rate(c, 300.0) == doctest::Approx(direct(300.0)).epsilon(1e-12));
    CHECK(jt_relaxation_rate(c, 300.0) == doctest::Approx(0.7).epsilon(0.05));
    CHECK(jt_relaxation_rate(c, 250.0) == doctest::Approx(1.9e-3).epsilon(0.05));
    CHECK(1.0 / jt_relaxation_rate(c, 250.0) > 10.0);  // T1 above 10 s when cooled
    // strictly increasing in T
    double prev = 0.0;
    for (double t = 100; t <= 400; t += 25) {
        const double r = jt_relaxation_rate(c, t);
        CHECK(r > prev);
        prev = r;
    }
    CHECK_THROWS_AS(jt_relaxation_rate(c, 0.0), std::domain_error);
}

TEST_CASE("system spec validation and gradient detuning") {
    SystemSpec s;
    s.validate();
    s.b0_tesla = -1;
    CHECK_THROWS_AS(s.validate(), std::domain_error);
    SystemSpec ok;
    // delta = dB/dy * mu_e * dy
    const double d = gradient_detuning(ok, 10.0);
    CHECK(d == doctest::Approx(ok.gradient_t_per_m * ok.constants.electron_gyro * 10e-9));
}

TEST_CASE("nitrogen hyperfine shift picks the right constant") {
    PhysicalConstants c;
    CHECK(nitrogen_hyperfine_shift(c, JTAxis::Parallel, +1) == doctest::Approx(-159.7e6 / 2));
    CHECK(nitrogen_hyperfine_shift(c, JTAxis::Tilted2, -1) ==
          doctest::Approx(+118.9e6 / 2).epsilon(1e-3));
    // parallel vs tilted split |A_par - gamma|/2 ~ 20.4 MHz
    const double split = std::abs(nitrogen_hyperfine_shift(c, JTAxis::Parallel, +1) -
                                  nitrogen_hyperfine_shift(c, JTAxis::Tilted1, +1));
    CHECK(split == doctest::Approx(20.4e6).epsilon(0.01));
}
