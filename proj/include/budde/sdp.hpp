#ifndef BUDDE_SDP_HPP
#define BUDDE_SDP_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace budde::sdp {

/// One affine matrix-inequality block M(theta) = F0 + sum_k theta_k * F[k] >= 0.
/// All coefficient matrices are symmetric and share the block's dimension.
struct AffineBlock {
    std::string name;
    Eigen::MatrixXd F0;
    std::vector<Eigen::MatrixXd> F;  ///< one symmetric coefficient per decision variable

    int dim() const { return static_cast<int>(F0.rows()); }
};

/// Small dense SDP: minimize c'theta subject to every block being PSD.
struct Problem {
    int num_vars = 0;
    Eigen::VectorXd c;
    std::vector<AffineBlock> blocks;

    Eigen::MatrixXd block_value(int j, const Eigen::VectorXd& theta) const;
};

struct Options {
    double tol = 1e-7;       ///< relative objective-gap tolerance
    double barrier_mu = 20.0;
    int max_newton = 80;     ///< Newton iterations per centering step
    int max_outer = 40;
};

struct Result {
    Eigen::VectorXd theta;
    double objective = 0.0;
    std::vector<double> block_min_eig;  ///< per-block minimum eigenvalue at theta
    int newton_iterations = 0;
    double gap_bound = 0.0;             ///< barrier bound on remaining suboptimality
};

/// Feasibility probe: minimizes the uniform margin s with M_j(theta) + s*I > 0.
/// Returns the best (theta, s) found; theta is strictly feasible iff s < 0.
struct FeasibilityResult {
    Eigen::VectorXd theta;
    double margin = 0.0;  ///< optimized s; negative means strictly feasible
    std::vector<double> block_min_eig;
};

FeasibilityResult find_feasible_point(const Problem& problem, const Options& options = {});

/// Primal barrier solve (phase I + phase II). Throws SynthesisError when no
/// strictly feasible point exists or iteration limits are exhausted.
Result solve(const Problem& problem, const Options& options = {});

}  // namespace budde::sdp

#endif  // BUDDE_SDP_HPP
