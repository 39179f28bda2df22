#include "budde/synthesis.hpp"

#include <cmath>
#include <sstream>

#include "budde/errors.hpp"

namespace budde::synthesis {

namespace {

constexpr double kPosDefEps = 1e-8;  // margin realizing strict inequalities

Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

/// Symmetric basis matrices for an n x n symmetric variable, ordered by
/// (i, j) with i <= j: E_ii = e_i e_i', E_ij = e_i e_j' + e_j e_i'.
std::vector<Eigen::MatrixXd> symmetric_basis(int n) {
    std::vector<Eigen::MatrixXd> basis;
    basis.reserve(n * (n + 1) / 2);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
            E(i, j) = 1.0;
            E(j, i) = 1.0;
            basis.push_back(E);
        }
    }
    return basis;
}

double spectral_radius(const Eigen::MatrixXd& M) {
    return M.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

PerformanceSpec PerformanceSpec::from_weights(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
    const int n = static_cast<int>(Q.rows());
    const int m = static_cast<int>(R.rows());
    if (Q.cols() != n || R.cols() != m) {
        throw SynthesisError("performance weights must be square");
    }
    PerformanceSpec p;
    p.Q = Q;
    p.R = R;
    p.Cp = Eigen::MatrixXd::Zero(n + m, n);
    p.Cp.topRows(n) = sqrt_psd(Q);
    p.Dp = Eigen::MatrixXd::Zero(n + m, m);
    p.Dp.bottomRows(m) = sqrt_psd(R);
    return p;
}

PerformanceSpec PerformanceSpec::from_diagonal(const Eigen::VectorXd& q_diag, double r) {
    Eigen::MatrixXd Q = q_diag.asDiagonal();
    Eigen::MatrixXd R(1, 1);
    R(0, 0) = r;
    return from_weights(Q, R);
}

Eigen::Vector4d default_state_weights() { return {0.1, 4.0, 1.0, 0.01}; }
double default_input_weight() { return 1.0; }
double default_integrator_weight() { return 0.5; }

Eigen::MatrixXd VariableLayout::extract_P(const Eigen::VectorXd& theta) const {
    Eigen::MatrixXd P(n, n);
    int idx = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            P(i, j) = theta(idx);
            P(j, i) = theta(idx);
            ++idx;
        }
    }
    return P;
}

Eigen::MatrixXd VariableLayout::extract_L(const Eigen::VectorXd& theta) const {
    Eigen::MatrixXd L(m, n);
    int idx = num_p();
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < n; ++c) {
            L(r, c) = theta(idx++);
        }
    }
    return L;
}

Eigen::MatrixXd VariableLayout::extract_S(const Eigen::VectorXd& theta) const {
    Eigen::MatrixXd S(nz, nz);
    int idx = num_p() + num_l();
    for (int i = 0; i < nz; ++i) {
        for (int j = i; j < nz; ++j) {
            S(i, j) = theta(idx);
            S(j, i) = theta(idx);
            ++idx;
        }
    }
    return S;
}

LmiProblem build_lmis(const std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>& modes,
                      const PerformanceSpec& perf) {
    if (modes.empty()) throw SynthesisError("build_lmis: no modes");
    const int n = perf.n();
    const int m = perf.m();
    const int nz = perf.nz();
    for (const auto& [A, B] : modes) {
        if (A.rows() != n || A.cols() != n || B.rows() != n || B.cols() != m) {
            throw SynthesisError("build_lmis: mode dimensions do not match the performance spec");
        }
    }

    VariableLayout layout{n, m, nz};
    const int nv = layout.total();

    const auto p_basis = symmetric_basis(n);
    const auto s_basis = symmetric_basis(nz);
    // L basis: one m x n matrix per entry, row-major.
    std::vector<Eigen::MatrixXd> l_basis;
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < n; ++c) {
            Eigen::MatrixXd Lb = Eigen::MatrixXd::Zero(m, n);
            Lb(r, c) = 1.0;
            l_basis.push_back(Lb);
        }
    }

    sdp::Problem prob;
    prob.num_vars = nv;
    prob.c = Eigen::VectorXd::Zero(nv);
    // Objective trace(S): the diagonal S variables.
    {
        int idx = layout.num_p() + layout.num_l();
        for (int i = 0; i < nz; ++i) {
            for (int j = i; j < nz; ++j) {
                if (i == j) prob.c(idx) = 1.0;
                ++idx;
            }
        }
    }

    auto zero_coeffs = [&](int dim) {
        return std::vector<Eigen::MatrixXd>(nv, Eigen::MatrixXd::Zero(dim, dim));
    };

    // Performance block [[S, Cp*P + Dp*L], [(.)', P]] >= 0.
    {
        sdp::AffineBlock blk;
        blk.name = "performance";
        const int dim = nz + n;
        blk.F0 = Eigen::MatrixXd::Zero(dim, dim);
        blk.F = zero_coeffs(dim);
        for (int k = 0; k < layout.num_p(); ++k) {
            const Eigen::MatrixXd& E = p_basis[k];
            Eigen::MatrixXd Fi = Eigen::MatrixXd::Zero(dim, dim);
            Fi.block(0, nz, nz, n) = perf.Cp * E;
            Fi.block(nz, 0, n, nz) = (perf.Cp * E).transpose();
            Fi.block(nz, nz, n, n) = E;
            blk.F[k] = Fi;
        }
        for (int k = 0; k < layout.num_l(); ++k) {
            const Eigen::MatrixXd& Lb = l_basis[k];
            Eigen::MatrixXd Fi = Eigen::MatrixXd::Zero(dim, dim);
            Fi.block(0, nz, nz, n) = perf.Dp * Lb;
            Fi.block(nz, 0, n, nz) = (perf.Dp * Lb).transpose();
            blk.F[layout.num_p() + k] = Fi;
        }
        for (int k = 0; k < layout.num_s(); ++k) {
            Eigen::MatrixXd Fi = Eigen::MatrixXd::Zero(dim, dim);
            Fi.block(0, 0, nz, nz) = s_basis[k];
            blk.F[layout.num_p() + layout.num_l() + k] = Fi;
        }
        prob.blocks.push_back(std::move(blk));
    }

    // Stability block per mode:
    // [[P - A P A' - A L' B' - B L A' - I, B L], [L' B', P]] > 0.
    for (size_t mi = 0; mi < modes.size(); ++mi) {
        const Eigen::MatrixXd& A = modes[mi].first;
        const Eigen::MatrixXd& B = modes[mi].second;
        sdp::AffineBlock blk;
        blk.name = "stability[" + std::to_string(mi) + "]";
        const int dim = 2 * n;
        blk.F0 = Eigen::MatrixXd::Zero(dim, dim);
        blk.F0.topLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
        blk.F = zero_coeffs(dim);
        for (int k = 0; k < layout.num_p(); ++k) {
            const Eigen::MatrixXd& E = p_basis[k];
            Eigen::MatrixXd Fi = Eigen::MatrixXd::Zero(dim, dim);
            Fi.topLeftCorner(n, n) = E - A * E * A.transpose();
            Fi.bottomRightCorner(n, n) = E;
            blk.F[k] = Fi;
        }
        for (int k = 0; k < layout.num_l(); ++k) {
            const Eigen::MatrixXd& Lb = l_basis[k];
            Eigen::MatrixXd Fi = Eigen::MatrixXd::Zero(dim, dim);
            const Eigen::MatrixXd ALB = A * Lb.transpose() * B.transpose();
            Fi.topLeftCorner(n, n) = -ALB - ALB.transpose();
            Fi.topRightCorner(n, n) = B * Lb;
            Fi.bottomLeftCorner(n, n) = (B * Lb).transpose();
            blk.F[layout.num_p() + k] = Fi;
        }
        prob.blocks.push_back(std::move(blk));
    }

    // P >= eps*I.
    {
        sdp::AffineBlock blk;
        blk.name = "P_pd";
        blk.F0 = -kPosDefEps * Eigen::MatrixXd::Identity(n, n);
        blk.F = zero_coeffs(n);
        for (int k = 0; k < layout.num_p(); ++k) {
            blk.F[k] = p_basis[k];
        }
        prob.blocks.push_back(std::move(blk));
    }

    return LmiProblem{std::move(prob), layout};
}

LmiProblem build_lmis(const dynamics::DiscreteModePair& modes, const PerformanceSpec& perf) {
    std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> ms;
    ms.emplace_back(modes.A_acc, modes.B_acc);
    ms.emplace_back(modes.A_dec, modes.B_dec);
    return build_lmis(ms, perf);
}

SynthesisSolution solve_sdp(const LmiProblem& problem, double tol) {
    sdp::Options opt;
    opt.tol = tol;
    sdp::Result res = sdp::solve(problem.sdp, opt);

    SynthesisSolution sol;
    sol.P = problem.layout.extract_P(res.theta);
    sol.L = problem.layout.extract_L(res.theta);
    sol.S = problem.layout.extract_S(res.theta);
    sol.K = sol.L * sol.P.inverse();
    sol.cost = res.objective;
    sol.residuals = res.block_min_eig;
    return sol;
}

SynthesisSolution synthesize(const dynamics::DiscreteModePair& modes,
                             const PerformanceSpec& perf) {
    return solve_sdp(build_lmis(modes, perf));
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> augment_with_integrator(const Eigen::MatrixXd& A,
                                                                    const Eigen::MatrixXd& B,
                                                                    double Ts) {
    const int n = static_cast<int>(A.rows());
    const int m = static_cast<int>(B.cols());
    Eigen::MatrixXd Aa = Eigen::MatrixXd::Zero(n + 1, n + 1);
    Aa.topLeftCorner(n, n) = A;
    Aa(n, 1) = Ts;  // i_{k+1} = i_k + Ts * x2 (regulation-coordinate distance error)
    Aa(n, n) = 1.0;
    Eigen::MatrixXd Ba = Eigen::MatrixXd::Zero(n + 1, m);
    Ba.topRows(n) = B;
    return {Aa, Ba};
}

SynthesisSolution synthesize_integral(const dynamics::DiscreteModePair& modes,
                                      const PerformanceSpec& perf5) {
    if (perf5.n() != 5) {
        throw SynthesisError("synthesize_integral: performance spec must be sized for n = 5");
    }
    std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> ms;
    ms.push_back(augment_with_integrator(modes.A_acc, modes.B_acc, modes.Ts));
    ms.push_back(augment_with_integrator(modes.A_dec, modes.B_dec, modes.Ts));
    return solve_sdp(build_lmis(ms, perf5));
}

VerifyReport verify_solution(const SynthesisSolution& sol,
                             const std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>& modes,
                             const PerformanceSpec& perf) {
    VerifyReport report;
    report.trace_S = sol.S.size() > 0 ? sol.S.trace() : 0.0;

    const int n = perf.n();
    if (sol.K.cols() != n || !sol.K.allFinite()) {
        report.first_violation = "gain";
        return report;
    }

    std::vector<Eigen::MatrixXd> closed;
    for (const auto& [A, B] : modes) {
        Eigen::MatrixXd Acl = A + B * sol.K;
        report.spectral_radii.push_back(spectral_radius(Acl));
        closed.push_back(std::move(Acl));
    }

    // Fresh common-Lyapunov certificate with K fixed: find P > 0 with
    // P - Acl P Acl' - I > 0 for every mode.
    const auto p_basis = symmetric_basis(n);
    sdp::Problem prob;
    prob.num_vars = static_cast<int>(p_basis.size());
    prob.c = Eigen::VectorXd::Zero(prob.num_vars);
    for (size_t mi = 0; mi < closed.size(); ++mi) {
        sdp::AffineBlock blk;
        blk.name = "lyapunov[" + std::to_string(mi) + "]";
        blk.F0 = -Eigen::MatrixXd::Identity(n, n);
        for (const auto& E : p_basis) {
            blk.F.push_back(E - closed[mi] * E * closed[mi].transpose());
        }
        prob.blocks.push_back(std::move(blk));
    }
    {
        sdp::AffineBlock blk;
        blk.name = "P_pd";
        blk.F0 = -kPosDefEps * Eigen::MatrixXd::Identity(n, n);
        blk.F = p_basis;
        prob.blocks.push_back(std::move(blk));
    }

    sdp::FeasibilityResult feas = sdp::find_feasible_point(prob);
    report.block_margins = feas.block_min_eig;
    report.ok = feas.margin < 0.0;
    if (!report.ok) {
        // Name the clearest culprit: an unstable mode first, else the block
        // with the worst margin.
        for (size_t mi = 0; mi < report.spectral_radii.size(); ++mi) {
            if (report.spectral_radii[mi] >= 1.0) {
                report.first_violation = prob.blocks[mi].name;
                break;
            }
        }
        if (report.first_violation.empty()) {
            size_t worst = 0;
            for (size_t j = 1; j < feas.block_min_eig.size(); ++j) {
                if (feas.block_min_eig[j] < feas.block_min_eig[worst]) worst = j;
            }
            report.first_violation = prob.blocks[worst].name;
        }
    }
    return report;
}

VerifyReport verify_solution(const SynthesisSolution& sol, const dynamics::DiscreteModePair& modes,
                             const PerformanceSpec& perf) {
    std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> ms;
    if (perf.n() == 5) {
        ms.push_back(augment_with_integrator(modes.A_acc, modes.B_acc, modes.Ts));
        ms.push_back(augment_with_integrator(modes.A_dec, modes.B_dec, modes.Ts));
    } else {
        ms.emplace_back(modes.A_acc, modes.B_acc);
        ms.emplace_back(modes.A_dec, modes.B_dec);
    }
    VerifyReport r = verify_solution(sol, ms, perf);
    // Re-label the modes for the two-mode switched model.
    if (!r.first_violation.empty()) {
        if (r.first_violation == "lyapunov[0]") r.first_violation = "lyapunov[acc]";
        if (r.first_violation == "lyapunov[1]") r.first_violation = "lyapunov[dec]";
    }
    return r;
}

}  // namespace budde::synthesis
