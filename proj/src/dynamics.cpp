#include "budde/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "budde/errors.hpp"

namespace budde::dynamics {

bool ModeParams::valid() const {
    return std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(zero_T) &&
           alpha > 0.0 && beta > 0.0 && zero_T != 0.0;
}

std::pair<Eigen::Matrix4d, Eigen::Vector4d> continuous_matrices(const ModeParams& mode) {
    if (!mode.valid()) {
        throw ModelError("invalid longitudinal mode parameters");
    }
    Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
    Eigen::Vector4d B = Eigen::Vector4d::Zero();
    // x = [v_ref, p, v, a], u = a_ref
    A(1, 2) = 1.0;                     // p' = v
    A(2, 3) = 1.0;                     // v' = a
    A(3, 0) = 1.0 / mode.beta;         // a' = (v_ref - v - alpha*a + T*u) / beta
    A(3, 2) = -1.0 / mode.beta;
    A(3, 3) = -mode.alpha / mode.beta;
    B(0) = 1.0;                        // v_ref' = u
    B(3) = mode.zero_T / mode.beta;
    return {A, B};
}

namespace {

std::pair<Eigen::Matrix4d, Eigen::Vector4d> zoh(const Eigen::Matrix4d& A,
                                                const Eigen::Vector4d& B, double Ts) {
    // Exact ZOH via the exponential of the augmented matrix [[A, B], [0, 0]].
    Eigen::Matrix<double, 5, 5> M = Eigen::Matrix<double, 5, 5>::Zero();
    M.topLeftCorner<4, 4>() = A;
    M.topRightCorner<4, 1>() = B;
    Eigen::Matrix<double, 5, 5> E = (M * Ts).exp();
    return {E.topLeftCorner<4, 4>(), E.topRightCorner<4, 1>()};
}

}  // namespace

DiscreteModePair discretize(const SwitchedLongitudinalModel& model) {
    if (!(model.Ts > 0.0) || !std::isfinite(model.Ts)) {
        throw ModelError("sampling time must be positive");
    }
    DiscreteModePair out;
    out.Ts = model.Ts;
    auto [Aa, Ba] = continuous_matrices(model.acc);
    auto [Ad, Bd] = continuous_matrices(model.dec);
    std::tie(out.A_acc, out.B_acc) = zoh(Aa, Ba, model.Ts);
    std::tie(out.A_dec, out.B_dec) = zoh(Ad, Bd, model.Ts);
    return out;
}

namespace {

Eigen::Vector4d lon_derivative(const Eigen::Matrix4d& A, const Eigen::Vector4d& B,
                               const Eigen::Vector4d& x, double u) {
    return A * x + B * u;
}

}  // namespace

PlantState plant_step(const PlantState& state, const PlantCommand& command, double dt,
                      const PlantConfig& config) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("plant_step: dt must be positive");
    }
    if (dt > 1e-3 + 1e-12) {
        throw std::invalid_argument("plant_step: dt must not exceed 1 ms");
    }

    PlantState next = state;

    // Mode selection with hysteresis around v_ref_cmd == v.
    const double dv = command.v_ref - state.lon.v;
    if (dv > config.mode_hysteresis) {
        next.mode = Mode::Acceleration;
    } else if (dv < -config.mode_hysteresis) {
        next.mode = Mode::Deceleration;
    }  // otherwise keep the previous mode

    // The speed loop integrates its own reference state; the commanded v_ref
    // enters as the virtual input u = (v_ref_cmd - v_ref) / dt, which makes
    // the reference state land exactly on the command after one step.
    auto [A, B] = continuous_matrices(config.model.params(next.mode));
    const double u = (command.v_ref - state.lon.v_ref) / dt;

    Eigen::Vector4d x = state.lon.vector();
    const Eigen::Vector4d k1 = lon_derivative(A, B, x, u);
    const Eigen::Vector4d k2 = lon_derivative(A, B, x + 0.5 * dt * k1, u);
    const Eigen::Vector4d k3 = lon_derivative(A, B, x + 0.5 * dt * k2, u);
    const Eigen::Vector4d k4 = lon_derivative(A, B, x + dt * k3, u);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    next.lon = LongitudinalState::from_vector(x);

    // Unicycle pose with the yaw rate tracking omega_ref through a lag.
    const double v_mid = 0.5 * (state.lon.v + next.lon.v);
    next.omega = state.omega + dt / config.yaw_time_constant * (command.omega_ref - state.omega);
    const double omega_mid = 0.5 * (state.omega + next.omega);
    const double theta_mid = state.pose.theta + 0.5 * dt * omega_mid;
    next.pose.x = state.pose.x + dt * v_mid * std::cos(theta_mid);
    next.pose.y = state.pose.y + dt * v_mid * std::sin(theta_mid);
    next.pose.theta = wrap_angle(state.pose.theta + dt * omega_mid);

    return next;
}

}  // namespace budde::dynamics
