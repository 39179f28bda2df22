#ifndef BUDDE_SYNTHESIS_HPP
#define BUDDE_SYNTHESIS_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "budde/dynamics.hpp"
#include "budde/sdp.hpp"

namespace budde::synthesis {

/// Quadratic performance channel z = C_p x + D_p u with C_p = [sqrt(Q); 0]
/// and D_p = [0; sqrt(R)] so that minimizing the H2 norm matches LQ design.
struct PerformanceSpec {
    Eigen::MatrixXd Q;
    Eigen::MatrixXd R;
    Eigen::MatrixXd Cp;
    Eigen::MatrixXd Dp;

    static PerformanceSpec from_weights(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R);
    static PerformanceSpec from_diagonal(const Eigen::VectorXd& q_diag, double r);

    int n() const { return static_cast<int>(Q.rows()); }
    int m() const { return static_cast<int>(R.rows()); }
    int nz() const { return static_cast<int>(Cp.rows()); }
};

/// Default state weights for the 4-state design; the augmented design appends
/// the integrator weight.
Eigen::Vector4d default_state_weights();      // diag(0.1, 4, 1, 0.01)
double default_input_weight();                // 1.0
double default_integrator_weight();           // 0.5

/// Index bookkeeping for the stacked decision vector (P, L, S).
struct VariableLayout {
    int n = 0;   ///< state dimension
    int m = 0;   ///< input dimension
    int nz = 0;  ///< performance output dimension

    int num_p() const { return n * (n + 1) / 2; }
    int num_l() const { return m * n; }
    int num_s() const { return nz * (nz + 1) / 2; }
    int total() const { return num_p() + num_l() + num_s(); }

    Eigen::MatrixXd extract_P(const Eigen::VectorXd& theta) const;
    Eigen::MatrixXd extract_L(const Eigen::VectorXd& theta) const;
    Eigen::MatrixXd extract_S(const Eigen::VectorXd& theta) const;
};

/// The assembled LMI problem (one performance block, one stability block per
/// mode, P >= eps*I) with its variable layout.
struct LmiProblem {
    sdp::Problem sdp;
    VariableLayout layout;
};

/// Builds the trace-minimization LMIs for a set of discrete-time modes
/// sharing one state-feedback gain. Throws SynthesisError on dimension
/// mismatch.
LmiProblem build_lmis(const std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>& modes,
                      const PerformanceSpec& perf);

LmiProblem build_lmis(const dynamics::DiscreteModePair& modes, const PerformanceSpec& perf);

struct SynthesisSolution {
    Eigen::RowVectorXd K;  ///< state-feedback gain, K = L * P^{-1}
    Eigen::MatrixXd P;
    Eigen::MatrixXd S;
    Eigen::RowVectorXd L;
    double cost = 0.0;                ///< trace(S)
    std::vector<double> residuals;    ///< minimum eigenvalue of each LMI block
};

/// Solves the assembled problem with the primal barrier method.
SynthesisSolution solve_sdp(const LmiProblem& problem, double tol = 1e-7);

/// Four-state design on the switched model.
SynthesisSolution synthesize(const dynamics::DiscreteModePair& modes,
                             const PerformanceSpec& perf);

/// Five-state design with the distance-error integrator appended; returns
/// K = [k1..k4, k5].
SynthesisSolution synthesize_integral(const dynamics::DiscreteModePair& modes,
                                      const PerformanceSpec& perf5);

/// Augmented (A, B) of one mode with the integrator state i_{k+1} = i_k + Ts*x2.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> augment_with_integrator(const Eigen::MatrixXd& A,
                                                                    const Eigen::MatrixXd& B,
                                                                    double Ts);

struct VerifyReport {
    bool ok = false;
    std::vector<double> spectral_radii;   ///< rho(A_i + B_i K) per mode
    std::vector<double> block_margins;    ///< min eigenvalues of the fresh certificate blocks
    double trace_S = 0.0;
    std::string first_violation;          ///< empty when ok
};

/// Certificate check from K alone: re-solves the common-Lyapunov feasibility
/// LMIs with K fixed and reports margins.
VerifyReport verify_solution(const SynthesisSolution& sol,
                             const std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>& modes,
                             const PerformanceSpec& perf);

VerifyReport verify_solution(const SynthesisSolution& sol, const dynamics::DiscreteModePair& modes,
                             const PerformanceSpec& perf);

}  // namespace budde::synthesis

#endif  // BUDDE_SYNTHESIS_HPP
