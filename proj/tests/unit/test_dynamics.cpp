#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "onn/dynamics.hpp"
#include "onn/error.hpp"

using namespace onn;

namespace {

OscillatorArrayConfig small_config(std::size_t n, double epsilon, double t_end) {
    OscillatorArrayConfig cfg;
    cfg.n = n;
    cfg.epsilon = epsilon;
    cfg.t_end = t_end;
    return cfg;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace

TEST_CASE("derivative: single oscillator on the unit circle rotates at omega") {
    auto cfg = small_config(1, 0.0, 10.0);
    const std::vector<Complex> z{1.0};
    const std::vector<double> w{1.0};
    const auto d = derivative(z, w, cfg);
    CHECK(d[0].real() == doctest::Approx(0.0));
    CHECK(d[0].imag() == doctest::Approx(1.0));
}

TEST_CASE("derivative: zero state is an equilibrium") {
    auto cfg = small_config(1, 0.0, 10.0);
    cfg.rho = 3.0;
    const std::vector<Complex> z{0.0};
    const std::vector<double> w{2.7};
    const auto d = derivative(z, w, cfg);
    CHECK(d[0] == Complex(0.0, 0.0));
}

TEST_CASE("derivative: two oscillators against hand expansion") {
    auto cfg = small_config(2, 0.1, 10.0);
    const std::vector<Complex> z{1.0, 1.0};
    const std::vector<double> w{1.0, 1.05};
    const auto d = derivative(z, w, cfg);
    // (1 + i w) * 1 - 1 * 1 * 1 + 0.1 * (1 + 1)
    CHECK(d[0].real() == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(d[0].imag() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d[1].real() == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(d[1].imag() == doctest::Approx(1.05).epsilon(1e-15));

    cfg.include_self_in_sum = false;
    const auto e = derivative(z, w, cfg);
    CHECK(e[0].real() == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("derivative: generic complex input matches the formula term by term") {
    auto cfg = small_config(3, 0.07, 10.0);
    cfg.rho = 0.6;
    const std::vector<Complex> z{{0.3, -0.8}, {-1.1, 0.2}, {0.5, 0.5}};
    const std::vector<double> w{0.9, 1.0, 1.2};
    const auto d = derivative(z, w, cfg);
    const Complex sum = z[0] + z[1] + z[2];
    for (std::size_t i = 0; i < 3; ++i) {
        const double r2 = z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
        const double re = cfg.rho * z[i].real() - w[i] * z[i].imag() - cfg.rho * r2 * z[i].real() + cfg.epsilon * sum.real();
        const double im = cfg.rho * z[i].imag() + w[i] * z[i].real() - cfg.rho * r2 * z[i].imag() + cfg.epsilon * sum.imag();
        CHECK(d[i].real() == doctest::Approx(re).epsilon(1e-14));
        CHECK(d[i].imag() == doctest::Approx(im).epsilon(1e-14));
    }
}

TEST_CASE("derivative: errors") {
    auto cfg = small_config(2, 0.1, 10.0);
    const std::vector<Complex> z{1.0, 1.0};
    const std::vector<double> w1{1.0};
    CHECK_THROWS_AS(derivative(z, w1, cfg), ConfigError);
    const std::vector<Complex> bad{1.0, {std::numeric_limits<double>::quiet_NaN(), 0.0}};
    const std::vector<double> w2{1.0, 1.0};
    CHECK_THROWS_AS(derivative(bad, w2, cfg), NumericError);
}

TEST_CASE("config validation") {
    OscillatorArrayConfig ok;
    CHECK_NOTHROW(ok.validate());

    auto cfg = ok;
    cfg.n = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ok;
    cfg.rho = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ok;
    cfg.omega0 = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ok;
    cfg.epsilon = -0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ok;
    cfg.t_end = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ok;
    cfg.dt = 1.0;
    cfg.t_end = 0.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ok;
    cfg.stride = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    SUBCASE("dt accuracy guard uses the largest encoded frequency") {
        auto c = small_config(2, 0.0, 10.0);
        const std::vector<double> w{1.0, 2.0};
        c.dt = kTwoPi / (25.0 * 2.0);
        CHECK_NOTHROW(c.validate_for(w));
        c.dt *= 1.01;
        CHECK_THROWS_AS(c.validate_for(w), ConfigError);
    }
    SUBCASE("default step is 2 pi / (50 omega_max)") {
        auto c = small_config(2, 0.0, 10.0);
        const std::vector<double> w{1.0, 1.25};
        CHECK(c.nominal_step(w) == doctest::Approx(kTwoPi / 62.5));
    }
    SUBCASE("omega length must equal n") {
        auto c = small_config(3, 0.0, 10.0);
        const std::vector<double> w{1.0, 1.0};
        CHECK_THROWS_AS(c.validate_for(w), ConfigError);
    }
    SUBCASE("coarse stride is rejected") {
        auto c = small_config(1, 0.0, 100.0);
        c.stride = 30;
        const std::vector<double> w{1.0};
        CHECK_THROWS_AS(c.validate_for(w), ConfigError);
    }
}

TEST_CASE("integrate: limit cycle from a small start") {
    for (double rho : {0.5, 1.0, 2.0}) {
        auto cfg = small_config(1, 0.0, 50.0 / rho);
        cfg.rho = rho;
        const std::vector<double> w{1.0};
        const auto trace = integrate(w, cfg, ComplexState{{Complex(0.1, 0.0)}});
        CHECK(std::abs(std::abs(trace.states.back().z[0]) - 1.0) < 1e-3);
        // Closed form of d|z|/dt = rho |z| (1 - |z|^2) from r0 = 0.1.
        const double t = trace.times.back();
        const double r0sq = 0.01;
        const double exact = 1.0 / std::sqrt(1.0 + (1.0 / r0sq - 1.0) * std::exp(-2.0 * rho * t));
        CHECK(std::abs(trace.states.back().z[0]) == doctest::Approx(exact).epsilon(1e-4));
    }
}

TEST_CASE("integrate: trace layout") {
    auto cfg = small_config(3, 0.02, 20.0);
    cfg.stride = 3;
    const std::vector<double> w{1.0, 1.05, 0.95};
    const auto trace = integrate(w, cfg, random_initial_state(3, 5));
    REQUIRE(trace.samples() >= 2);
    CHECK(trace.times.front() == 0.0);
    CHECK(trace.states.size() == trace.samples());
    CHECK(trace.envelope.size() == trace.samples());
    CHECK(trace.peak_detector.size() == trace.samples());
    CHECK(trace.phases.size() == 3);
    for (std::size_t k = 1; k < trace.samples(); ++k) {
        CHECK(trace.times[k] - trace.times[k - 1] == doctest::Approx(trace.sample_interval).epsilon(1e-12));
    }
    for (std::size_t k = 0; k < trace.samples(); ++k) {
        double max_abs = 0.0;
        for (Complex z : trace.states[k].z) max_abs = std::max(max_abs, std::abs(z));
        CHECK(trace.envelope[k] <= max_abs + 1e-12);
        CHECK(trace.envelope[k] >= 0.0);
        CHECK(trace.peak_detector[k] >= trace.envelope[k]);
        for (std::size_t i = 0; i < 3; ++i) {
            if (k > 0) CHECK(std::abs(trace.phases[i][k] - trace.phases[i][k - 1]) < kTwoPi / 2.0);
        }
    }
}

TEST_CASE("integrate: step shrinks to divide t_end exactly") {
    auto cfg = small_config(1, 0.0, 10.0);
    cfg.dt = 0.03;
    const std::vector<double> w{1.0};
    const auto trace = integrate(w, cfg, ComplexState{{Complex(1.0, 0.0)}});
    CHECK(trace.times.back() == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(trace.samples() == 335);  // ceil(10 / 0.03) + 1
}

TEST_CASE("integrate: determinism") {
    auto cfg = small_config(4, 0.03, 30.0);
    const std::vector<double> w{1.0, 1.02, 0.98, 1.04};
    const auto init = random_initial_state(4, 9);
    const auto a = integrate(w, cfg, init);
    const auto b = integrate(w, cfg, init);
    CHECK(a.states == b.states);
    CHECK(a.envelope == b.envelope);
}

TEST_CASE("integrate: divergence guard reports the step") {
    auto cfg = small_config(1, 200.0, 10.0);
    const std::vector<double> w{1.0};
    try {
        integrate(w, cfg, ComplexState{{Complex(1.0, 0.0)}});
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(e.step() >= 1);
    }
}

TEST_CASE("integrate: errors on bad init") {
    auto cfg = small_config(2, 0.0, 10.0);
    const std::vector<double> w{1.0, 1.0};
    CHECK_THROWS_AS(integrate(w, cfg, ComplexState{{Complex(1.0, 0.0)}}), ConfigError);
    CHECK_THROWS_AS(integrate(w, cfg, ComplexState{{Complex(1.0, 0.0), Complex(INFINITY, 0.0)}}), NumericError);
}

TEST_CASE("integrate: zero detuning always locks") {
    auto cfg = small_config(2, 0.05, 300.0);
    const std::vector<double> w{1.0, 1.0};
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto trace = integrate(w, cfg, random_initial_state(2, seed));
        const std::size_t m = trace.samples();
        const double d1 = trace.phases[1][m - 1] - trace.phases[0][m - 1];
        const double d2 = trace.phases[1][m - 100] - trace.phases[0][m - 100];
        CHECK(std::abs(d1 - d2) < 1e-6);
        const auto f = instantaneous_frequency(trace);
        CHECK(std::abs(f[0][m - 200] - f[1][m - 200]) < 1e-6);
    }
}

TEST_CASE("integrate: locked pair settles at the phase-balance offset") {
    // At steady state d(psi)/dt = d - eps (r1/r2 + r2/r1) sin(psi) = 0.
    const double eps = 0.05;
    const double d = 0.5 * eps;
    auto cfg = small_config(2, eps, 600.0);
    const std::vector<double> w{1.0 - d / 2.0, 1.0 + d / 2.0};
    const auto trace = integrate(w, cfg, random_initial_state(2, 4));
    const auto& z = trace.states.back().z;
    const double r1 = std::abs(z[0]);
    const double r2 = std::abs(z[1]);
    const double psi = std::arg(z[1] / z[0]);
    CHECK(std::sin(psi) == doctest::Approx(d / (eps * (r1 / r2 + r2 / r1))).epsilon(1e-6));
}

TEST_CASE("integrate: small detuning locks, large detuning slips") {
    const double eps = 0.05;
    auto cfg = small_config(2, eps, 1000.0);
    auto gap = [&](double d) {
        const std::vector<double> w{1.0 - d / 2.0, 1.0 + d / 2.0};
        const auto trace = integrate(w, cfg, random_initial_state(2, 11));
        const std::size_t m = trace.samples();
        const std::size_t q = m / 2;
        return (trace.phases[1][m - 1] - trace.phases[0][m - 1]) - (trace.phases[1][q] - trace.phases[0][q]);
    };
    CHECK(std::abs(gap(0.5 * eps)) < 1e-3);
    CHECK(std::abs(gap(3.0 * eps)) > kTwoPi);
}

TEST_CASE("integrate: global phase rotation is an exact symmetry") {
    auto cfg = small_config(5, 0.02, 60.0);
    const std::vector<double> w{1.0, 1.05, 0.95, 1.1, 1.0};
    const auto init = random_initial_state(5, 3);
    const Complex rot = std::polar(1.0, 1.234);
    ComplexState rotated = init;
    for (auto& z : rotated.z) z *= rot;
    const auto a = integrate(w, cfg, init);
    const auto b = integrate(w, cfg, rotated);
    for (std::size_t k = 0; k < a.samples(); ++k) {
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(std::abs(b.states[k].z[i] - a.states[k].z[i] * rot) < 1e-9);
        }
        CHECK(rel_diff(a.envelope[k], b.envelope[k]) < 1e-9);
    }
    const auto fa = instantaneous_frequency(a);
    const auto fb = instantaneous_frequency(b);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t k = 0; k < a.samples(); k += 17) CHECK(rel_diff(fa[i][k], fb[i][k]) < 1e-9);
    }
}

TEST_CASE("integrate: uniform frequency shift rotates the trajectory") {
    auto cfg = small_config(4, 0.02, 40.0);
    cfg.dt = 0.002;
    const double delta = 0.05;
    const std::vector<double> w{1.0, 1.05, 0.95, 1.02};
    std::vector<double> shifted = w;
    for (auto& x : shifted) x += delta;
    const auto init = random_initial_state(4, 8);
    const auto a = integrate(w, cfg, init);
    const auto b = integrate(shifted, cfg, init);
    for (std::size_t k = 0; k < a.samples(); k += 7) {
        CHECK(rel_diff(a.envelope[k], b.envelope[k]) < 1e-9);
        for (std::size_t i = 1; i < 4; ++i) {
            const double pa = a.phases[i][k] - a.phases[0][k];
            const double pb = b.phases[i][k] - b.phases[0][k];
            CHECK(rel_diff(pa, pb) < 1e-9);
        }
        const Complex expected = a.states[k].z[0] * std::polar(1.0, delta * a.times[k]);
        CHECK(std::abs(b.states[k].z[0] - expected) < 1e-9);
    }
}

TEST_CASE("integrate: fourth-order convergence") {
    auto run = [](double dt) {
        auto cfg = small_config(2, 0.05, 20.0);
        cfg.dt = dt;
        const std::vector<double> w{1.0, 1.02};
        return integrate(w, cfg, random_initial_state(2, 1)).states.back();
    };
    const auto ref = run(0.1 / 8.0);
    auto err = [&](const ComplexState& s) {
        double e = 0.0;
        for (std::size_t i = 0; i < 2; ++i) e += std::norm(s.z[i] - ref.z[i]);
        return std::sqrt(e);
    };
    const double ratio = err(run(0.1)) / err(run(0.05));
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("random_initial_state") {
    const auto a = random_initial_state(5, 42);
    const auto b = random_initial_state(5, 42);
    const auto c = random_initial_state(5, 43);
    CHECK(a == b);
    CHECK(a != c);

    const auto big = random_initial_state(1000, 7, 1.0);
    double sum = 0.0;
    for (Complex z : big.z) {
        CHECK(std::abs(z) == doctest::Approx(1.0).epsilon(1e-12));
        double theta = std::arg(z);
        if (theta < 0.0) theta += kTwoPi;
        sum += theta;
    }
    // Uniform on [0, 2 pi): standard error of the mean is 2 pi / sqrt(12 * 1000).
    const double se = kTwoPi / std::sqrt(12.0 * 1000.0);
    CHECK(std::abs(sum / 1000.0 - kTwoPi / 2.0) < 3.0 * se);

    const auto scaled = random_initial_state(3, 42, 0.1);
    CHECK(std::abs(scaled.z[0]) == doctest::Approx(0.1));
    CHECK(std::arg(scaled.z[0]) == doctest::Approx(std::arg(random_initial_state(3, 42).z[0])));

    CHECK_THROWS_AS(random_initial_state(0, 1), ConfigError);
    CHECK_THROWS_AS(random_initial_state(3, 1, 0.0), ConfigError);
}

TEST_CASE("instantaneous_frequency: free oscillator recovers its natural frequency") {
    auto cfg = small_config(1, 0.0, 100.0);
    const std::vector<double> w{1.3};
    const auto trace = integrate(w, cfg, ComplexState{{Complex(0.2, 0.1)}});
    const auto f = instantaneous_frequency(trace);
    const std::size_t m = trace.samples();
    for (std::size_t k = m / 2; k < m; k += 10) CHECK(std::abs(f[0][k] - 1.3) < 0.013);
}

TEST_CASE("instantaneous_frequency: locked pair shares one frequency") {
    const double eps = 0.05;
    auto cfg = small_config(2, eps, 600.0);
    const std::vector<double> w{1.0 - 0.01, 1.0 + 0.01};
    const auto trace = integrate(w, cfg, random_initial_state(2, 2));
    const auto f = instantaneous_frequency(trace);
    const std::size_t m = trace.samples();
    for (std::size_t k = m - m / 10; k < m - 100; k += 25) CHECK(std::abs(f[0][k] - f[1][k]) < 0.1 * eps);
}

TEST_CASE("instantaneous_frequency: frozen phases give zero and short traces are rejected") {
    std::vector<ComplexState> frozen(20, ComplexState{{Complex(0.3, 0.4), Complex(-1.0, 0.0)}});
    const auto trace = SimulationTrace::from_states(frozen, 0.1, 1.0, true, 10.0);
    const auto f = instantaneous_frequency(trace);
    for (const auto& series : f) {
        for (double x : series) CHECK(x == 0.0);
    }

    std::vector<ComplexState> two(2, ComplexState{{Complex(1.0, 0.0)}});
    const auto short_trace = SimulationTrace::from_states(two, 0.1, 1.0, true, 10.0);
    CHECK_THROWS_AS(instantaneous_frequency(short_trace), InsufficientDataError);
}

TEST_CASE("from_states: averager normalization") {
    std::vector<ComplexState> states(3, ComplexState{{Complex(1.0, 0.0), Complex(0.0, 1.0)}});
    const auto norm = SimulationTrace::from_states(states, 0.5, 1.0, true, 10.0);
    const auto raw = SimulationTrace::from_states(states, 0.5, 1.0, false, 10.0);
    CHECK(norm.envelope[0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(raw.envelope[0] == doctest::Approx(std::sqrt(2.0)));
    CHECK(norm.times[2] == doctest::Approx(1.0));
    CHECK_THROWS_AS(SimulationTrace::from_states({}, 0.5, 1.0, true, 10.0), InsufficientDataError);
}

TEST_CASE("peak_detector") {
    SUBCASE("no decay is a running maximum") {
        const std::vector<double> e{0.1, 0.5, 0.2, 0.7, 0.3, 0.0};
        const auto v = peak_detector(e, 0.1, std::numeric_limits<double>::infinity());
        const std::vector<double> expected{0.1, 0.5, 0.5, 0.7, 0.7, 0.7};
        CHECK(v == expected);
    }
    SUBCASE("constant envelope") {
        const std::vector<double> e(50, 0.42);
        for (double x : peak_detector(e, 0.1, 3.0)) CHECK(x == 0.42);
    }
    SUBCASE("exponential decay after a pulse") {
        std::vector<double> e(200, 0.0);
        for (std::size_t k = 0; k < 50; ++k) e[k] = 1.0;
        const double h = 0.1;
        const double tau = 2.0;
        const auto v = peak_detector(e, h, tau);
        for (std::size_t k = 49; k < 200; ++k) {
            CHECK(v[k] == doctest::Approx(std::exp(-(static_cast<double>(k) - 49.0) * h / tau)).epsilon(1e-12));
        }
    }
    SUBCASE("empty input and bad tau") {
        CHECK(peak_detector(std::vector<double>{}, 0.1, 1.0).empty());
        CHECK_THROWS_AS(peak_detector(std::vector<double>{1.0}, 0.1, 0.0), ConfigError);
    }
}
