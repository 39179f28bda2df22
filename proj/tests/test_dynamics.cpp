#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "budde/dynamics.hpp"
#include "budde/errors.hpp"

using namespace budde;
using namespace budde::dynamics;

namespace {

// Independent oracle: integrate x' = A x + B u with RK4 at a very fine step.
Eigen::Vector4d rk4_integrate(const Eigen::Matrix4d& A, const Eigen::Vector4d& B,
                              Eigen::Vector4d x, double u, double T, double dt) {
    const int n = static_cast<int>(std::round(T / dt));
    for (int i = 0; i < n; ++i) {
        Eigen::Vector4d k1 = A * x + B * u;
        Eigen::Vector4d k2 = A * (x + 0.5 * dt * k1) + B * u;
        Eigen::Vector4d k3 = A * (x + 0.5 * dt * k2) + B * u;
        Eigen::Vector4d k4 = A * (x + dt * k3) + B * u;
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

// Roots of beta*s^2 + alpha*s + 1 = 0.
std::pair<std::complex<double>, std::complex<double>> denominator_poles(const ModeParams& m) {
    const std::complex<double> disc = std::complex<double>(m.alpha * m.alpha - 4.0 * m.beta, 0.0);
    const std::complex<double> sq = std::sqrt(disc);
    return {(-m.alpha + sq) / (2.0 * m.beta), (-m.alpha - sq) / (2.0 * m.beta)};
}

}  // namespace

TEST_CASE("continuous matrices match the identified coefficients") {
    SwitchedLongitudinalModel model;
    auto [A, B] = continuous_matrices(model.acc);

    CHECK(A(3, 0) == doctest::Approx(1.0 / 0.9681).epsilon(1e-12));
    CHECK(A(3, 1) == 0.0);
    CHECK(A(3, 2) == doctest::Approx(-1.0 / 0.9681).epsilon(1e-12));
    CHECK(A(3, 3) == doctest::Approx(-2.3728 / 0.9681).epsilon(1e-12));
    CHECK(B(0) == 1.0);
    CHECK(B(1) == 0.0);
    CHECK(B(2) == 0.0);
    CHECK(B(3) == doctest::Approx(-0.3423 / 0.9681).epsilon(1e-12));

    // Rows 1-3: v_ref' = u, p' = v, v' = a.
    CHECK(A.row(0).isZero());
    CHECK(A(1, 2) == 1.0);
    CHECK(A(2, 3) == 1.0);
}

TEST_CASE("speed-loop equilibrium is invariant under the continuous model") {
    SwitchedLongitudinalModel model;
    for (Mode m : {Mode::Acceleration, Mode::Deceleration}) {
        auto [A, B] = continuous_matrices(model.params(m));
        const double c = 0.7;
        Eigen::Vector4d x{c, 3.0, c, 0.0};
        Eigen::Vector4d xdot = A * x;  // u = 0
        CHECK(xdot(0) == 0.0);
        CHECK(xdot(1) == doctest::Approx(c));
        CHECK(xdot(2) == 0.0);
        CHECK(std::abs(xdot(3)) < 1e-12);
    }
}

TEST_CASE("continuous poles match the quadratic-root oracle") {
    SwitchedLongitudinalModel model;
    {
        auto [p1, p2] = denominator_poles(model.acc);
        CHECK(p1.real() == doctest::Approx(-0.5408).epsilon(1e-3));
        CHECK(p2.real() == doctest::Approx(-1.9103).epsilon(1e-3));
        auto [A, B] = continuous_matrices(model.acc);
        Eigen::VectorXcd ev = A.eigenvalues();
        // Two integrators at 0 plus the two denominator roots.
        int zeros = 0;
        for (int i = 0; i < 4; ++i) {
            if (std::abs(ev(i)) < 1e-9) ++zeros;
        }
        CHECK(zeros == 2);
    }
    {
        auto [p1, p2] = denominator_poles(model.dec);
        CHECK(p1.real() == doctest::Approx(-1.5024).epsilon(1e-3));
        CHECK(std::abs(p1.imag()) == doctest::Approx(1.6123).epsilon(1e-3));
    }
}

TEST_CASE("ZOH discretization matches a fine RK4 oracle column-wise") {
    SwitchedLongitudinalModel model;
    DiscreteModePair d = discretize(model);

    for (Mode m : {Mode::Acceleration, Mode::Deceleration}) {
        auto [A, B] = continuous_matrices(model.params(m));
        // Columns of A_d: propagate each basis state with u = 0.
        for (int j = 0; j < 4; ++j) {
            Eigen::Vector4d e = Eigen::Vector4d::Zero();
            e(j) = 1.0;
            Eigen::Vector4d col = rk4_integrate(A, B, e, 0.0, model.Ts, 1e-5);
            for (int i = 0; i < 4; ++i) {
                CHECK(std::abs(d.A(m)(i, j) - col(i)) < 1e-6);
            }
        }
        // B_d: zero state, u = 1.
        Eigen::Vector4d bd = rk4_integrate(A, B, Eigen::Vector4d::Zero(), 1.0, model.Ts, 1e-5);
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(d.B(m)(i) - bd(i)) < 1e-6);
        }
    }
}

TEST_CASE("discrete eigenvalues follow exp(lambda*Ts) for the stable poles") {
    SwitchedLongitudinalModel model;
    DiscreteModePair d = discretize(model);
    auto [p1, p2] = denominator_poles(model.acc);
    Eigen::VectorXcd ev = d.A_acc.eigenvalues();

    auto contains = [&](std::complex<double> target) {
        for (int i = 0; i < 4; ++i) {
            if (std::abs(ev(i) - target) < 1e-9) return true;
        }
        return false;
    };
    CHECK(contains(std::exp(p1 * model.Ts)));
    CHECK(contains(std::exp(p2 * model.Ts)));

    // Exactly two eigenvalues at 1 (the v_ref and p integrators), two inside.
    for (Mode m : {Mode::Acceleration, Mode::Deceleration}) {
        Eigen::VectorXcd e = d.A(m).eigenvalues();
        int at_one = 0, inside = 0;
        for (int i = 0; i < 4; ++i) {
            if (std::abs(e(i) - 1.0) < 1e-9) {
                ++at_one;
            } else if (std::abs(e(i)) < 1.0 - 1e-6) {
                ++inside;
            }
        }
        CHECK(at_one == 2);
        CHECK(inside == 2);
    }
}

TEST_CASE("Ts -> 0 limit reduces to first-order expansion") {
    SwitchedLongitudinalModel model;
    model.Ts = 1e-6;
    DiscreteModePair d = discretize(model);
    for (Mode m : {Mode::Acceleration, Mode::Deceleration}) {
        auto [A, B] = continuous_matrices(model.params(m));
        Eigen::Matrix4d expected = Eigen::Matrix4d::Identity() + A * model.Ts;
        CHECK(((d.A(m) - expected).cwiseAbs().maxCoeff()) < 1e-9);
    }
}

TEST_CASE("equilibrium propagates as a pure position integrator") {
    SwitchedLongitudinalModel model;
    DiscreteModePair d = discretize(model);
    for (Mode m : {Mode::Acceleration, Mode::Deceleration}) {
        Eigen::Vector4d x{1.0, 0.0, 1.0, 0.0};
        for (int k = 1; k <= 20; ++k) {
            x = d.A(m) * x;  // u = 0
            CHECK(x(0) == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(x(1) == doctest::Approx(k * model.Ts).epsilon(1e-9));
            CHECK(x(2) == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(std::abs(x(3)) < 1e-9);
        }
    }
}

TEST_CASE("plant_step rejects bad dt") {
    PlantState s;
    CHECK_THROWS_AS(plant_step(s, {}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(plant_step(s, {}, -1e-3), std::invalid_argument);
    CHECK_THROWS_AS(plant_step(s, {}, 5e-3), std::invalid_argument);
}

TEST_CASE("plant at rest with zero command stays at rest") {
    PlantState s;
    s.pose = {2.0, -1.0, 0.4};
    PlantState n = plant_step(s, {0.0, 0.0}, 1e-3);
    CHECK(n.lon.v == 0.0);
    CHECK(n.lon.v_ref == 0.0);
    CHECK(n.pose.x == doctest::Approx(2.0));
    CHECK(n.pose.y == doctest::Approx(-1.0));
    CHECK(n.pose.theta == doctest::Approx(0.4));
}

TEST_CASE("speed step shows non-minimum-phase undershoot then settles at 1") {
    PlantState s;
    double v_min = 0.0;
    for (int i = 0; i < 15000; ++i) {
        s = plant_step(s, {1.0, 0.0}, 1e-3);
        v_min = std::min(v_min, s.lon.v);
    }
    CHECK(v_min < -1e-3);                          // initial inverse response
    CHECK(s.lon.v == doctest::Approx(1.0).epsilon(1e-4));  // unit DC gain
}

TEST_CASE("DC gain 1 in both modes") {
    for (double target : {0.8, 0.3}) {
        PlantState s;
        s.lon = {0.5, 0.0, 0.5, 0.0};  // start from a nonzero equilibrium
        for (int i = 0; i < 10000; ++i) {
            s = plant_step(s, {target, 0.0}, 1e-3);
        }
        CHECK(std::abs(s.lon.v - target) < 1e-4);
    }
}

TEST_CASE("constant-twist trajectory closes the analytic circle") {
    PlantState s;
    s.lon = {1.0, 0.0, 1.0, 0.0};
    s.omega = 0.5;
    const double dt = 1e-3;
    const double T = 2.0 * M_PI / 0.5;
    const int n = static_cast<int>(std::round(T / dt));
    for (int i = 0; i < n; ++i) {
        s = plant_step(s, {1.0, 0.5}, dt);
    }
    CHECK(std::abs(s.pose.x) < 1e-3);
    CHECK(std::abs(s.pose.y) < 1e-3);
}

TEST_CASE("mode switches at most once per controller period for continuous commands") {
    PlantState s;
    const double dt = 1e-3;
    double t = 0.0;
    for (int tick = 0; tick < 200; ++tick) {
        // Slowly varying command held constant within the period.
        const double cmd = 0.5 + 0.4 * std::sin(0.8 * t);
        int switches = 0;
        for (int i = 0; i < 100; ++i) {
            Mode before = s.mode;
            s = plant_step(s, {cmd, 0.0}, dt);
            if (s.mode != before) ++switches;
        }
        CHECK(switches <= 1);
        t += 0.1;
    }
}
