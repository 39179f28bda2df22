#ifndef BUDDE_DYNAMICS_HPP
#define BUDDE_DYNAMICS_HPP

#include <Eigen/Dense>

#include "budde/geometry.hpp"

namespace budde::dynamics {

/// One operating mode of the longitudinal speed loop, i.e. the coefficients of
/// the identified second-order transfer function
///   F(s) = (1 + s*zero_T) / (1 + alpha*s + beta*s^2)
/// between the commanded and the measured robot speed.
struct ModeParams {
    double alpha = 0.0;   ///< first-order denominator coefficient [s]
    double beta = 0.0;    ///< second-order denominator coefficient [s^2]
    double zero_T = 0.0;  ///< numerator coefficient [s]; negative => non-minimum-phase

    bool valid() const;
};

enum class Mode { Acceleration, Deceleration };

/// Switched longitudinal model: one parameter set per mode plus the controller
/// sampling time.
struct SwitchedLongitudinalModel {
    ModeParams acc{2.3728, 0.9681, -0.3423};
    ModeParams dec{0.6187, 0.2059, -0.4255};
    double Ts = 0.1;  ///< sampling time [s]

    const ModeParams& params(Mode m) const { return m == Mode::Acceleration ? acc : dec; }
};

/// Longitudinal state x = [v_ref, p, v, a].
struct LongitudinalState {
    double v_ref = 0.0;  ///< internal speed-loop reference [m/s]
    double p = 0.0;      ///< curvilinear abscissa [m]
    double v = 0.0;      ///< robot speed [m/s]
    double a = 0.0;      ///< robot acceleration [m/s^2]

    Eigen::Vector4d vector() const { return {v_ref, p, v, a}; }
    static LongitudinalState from_vector(const Eigen::Vector4d& x) {
        return {x(0), x(1), x(2), x(3)};
    }
};

/// Zero-order-hold discretization of both modes.
struct DiscreteModePair {
    Eigen::Matrix4d A_acc;
    Eigen::Vector4d B_acc;
    Eigen::Matrix4d A_dec;
    Eigen::Vector4d B_dec;
    double Ts = 0.1;

    const Eigen::Matrix4d& A(Mode m) const { return m == Mode::Acceleration ? A_acc : A_dec; }
    const Eigen::Vector4d& B(Mode m) const { return m == Mode::Acceleration ? B_acc : B_dec; }
};

/// Continuous state-space matrices of one mode, with input u = a_ref:
///   d/dt [v_ref, p, v, a] = A_c x + B_c u.
/// Throws ModelError if the parameters are invalid.
std::pair<Eigen::Matrix4d, Eigen::Vector4d> continuous_matrices(const ModeParams& mode);

/// Exact ZOH discretization of both modes at the model's sampling time.
DiscreteModePair discretize(const SwitchedLongitudinalModel& model);

/// Full plant state used by the simulator: longitudinal channel plus planar
/// pose and yaw rate.
struct PlantState {
    LongitudinalState lon;
    Pose2 pose;
    double omega = 0.0;  ///< yaw rate [rad/s]
    Mode mode = Mode::Acceleration;
};

struct PlantCommand {
    double v_ref = 0.0;      ///< longitudinal speed reference [m/s]
    double omega_ref = 0.0;  ///< yaw-rate reference [rad/s]
};

struct PlantConfig {
    SwitchedLongitudinalModel model;
    double mode_hysteresis = 0.02;  ///< [m/s] dead band on v_ref_cmd - v
    double yaw_time_constant = 0.3; ///< [s] first-order lag on the yaw channel
};

/// Advances the plant by one fine-grained step (dt <= 1 ms).
///
/// The longitudinal channel is integrated with RK4 on the continuous model of
/// the active mode; the mode follows the sign of (v_ref_cmd - v) with
/// hysteresis. The pose integrates unicycle kinematics and the yaw rate tracks
/// omega_ref through a first-order lag. Throws std::invalid_argument on a
/// non-positive or oversized dt.
PlantState plant_step(const PlantState& state, const PlantCommand& command, double dt,
                      const PlantConfig& config = {});

}  // namespace budde::dynamics

#endif  // BUDDE_DYNAMICS_HPP
