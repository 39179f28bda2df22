#include "budde/sdp.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "budde/errors.hpp"

namespace budde::sdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Barrier value -sum_j log det M_j plus the per-block Cholesky factors.
/// Returns +inf when any block is not positive definite.
double barrier_value(const std::vector<AffineBlock>& blocks, const Eigen::VectorXd& theta,
                     std::vector<Eigen::LLT<Eigen::MatrixXd>>* factors = nullptr) {
    double value = 0.0;
    if (factors) factors->clear();
    for (const auto& b : blocks) {
        Eigen::MatrixXd M = b.F0;
        for (int k = 0; k < static_cast<int>(b.F.size()); ++k) {
            if (theta(k) != 0.0) M += theta(k) * b.F[k];
        }
        Eigen::LLT<Eigen::MatrixXd> llt(M);
        if (llt.info() != Eigen::Success) return kInf;
        const auto& L = llt.matrixLLT();
        for (int i = 0; i < M.rows(); ++i) {
            if (!(L(i, i) > 0.0) || !std::isfinite(L(i, i))) return kInf;
            value -= 2.0 * std::log(L(i, i));
        }
        if (factors) factors->push_back(std::move(llt));
    }
    return value;
}

struct CenteringResult {
    Eigen::VectorXd theta;
    int newton_iterations = 0;
    bool converged = false;
};

/// Damped Newton minimization of t*c'theta - sum_j log det M_j(theta),
/// starting from a strictly feasible theta.
CenteringResult center(const Problem& p, double t, Eigen::VectorXd theta, int max_newton) {
    const int nv = p.num_vars;
    CenteringResult out;

    std::vector<Eigen::LLT<Eigen::MatrixXd>> factors;
    double phi_bar = barrier_value(p.blocks, theta, &factors);
    if (!std::isfinite(phi_bar)) {
        throw SynthesisError("sdp: centering started from an infeasible point");
    }

    for (int it = 0; it < max_newton; ++it) {
        Eigen::VectorXd grad = t * p.c;
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(nv, nv);

        for (size_t j = 0; j < p.blocks.size(); ++j) {
            const auto& b = p.blocks[j];
            const int q = b.dim();
            // W_k = M^{-1} F_k; grad -= tr(W_k), hess += tr(W_k W_l).
            std::vector<Eigen::MatrixXd> W(nv);
            for (int k = 0; k < nv; ++k) {
                if (b.F[k].isZero(0.0)) {
                    W[k] = Eigen::MatrixXd();
                    continue;
                }
                W[k] = factors[j].solve(b.F[k]);
                grad(k) -= W[k].trace();
            }
            for (int k = 0; k < nv; ++k) {
                if (W[k].size() == 0) continue;
                for (int l = k; l < nv; ++l) {
                    if (W[l].size() == 0) continue;
                    const double h = (W[k].transpose().cwiseProduct(W[l])).sum();
                    hess(k, l) += h;
                    if (l != k) hess(l, k) += h;
                }
            }
            (void)q;
        }

        // Newton direction with a ridge fallback for near-singular Hessians.
        Eigen::VectorXd step;
        double ridge = 0.0;
        for (;;) {
            Eigen::MatrixXd H = hess;
            if (ridge > 0.0) H.diagonal().array() += ridge;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
            step = ldlt.solve(-grad);
            if (ldlt.info() == Eigen::Success && step.allFinite()) break;
            ridge = (ridge == 0.0) ? 1e-12 * (1.0 + hess.trace() / nv) : ridge * 100.0;
            if (ridge > 1e6) {
                throw SynthesisError("sdp: Newton system is singular");
            }
        }

        const double decrement2 = -grad.dot(step);
        if (!(decrement2 > 0.0)) {
            out.converged = true;  // at (numerical) stationarity
            break;
        }
        if (0.5 * decrement2 <= 1e-9) {
            out.converged = true;
            break;
        }

        // Backtracking line search on the full barrier objective.
        const double phi0 = t * p.c.dot(theta) + phi_bar;
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            Eigen::VectorXd cand = theta + alpha * step;
            std::vector<Eigen::LLT<Eigen::MatrixXd>> cand_factors;
            const double cand_bar = barrier_value(p.blocks, cand, &cand_factors);
            if (std::isfinite(cand_bar)) {
                const double cand_phi = t * p.c.dot(cand) + cand_bar;
                if (cand_phi <= phi0 - 0.01 * alpha * decrement2) {
                    theta = std::move(cand);
                    phi_bar = cand_bar;
                    factors = std::move(cand_factors);
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        ++out.newton_iterations;
        if (!accepted) {
            out.converged = true;  // step size underflow: treat as converged
            break;
        }
    }

    out.theta = std::move(theta);
    return out;
}

std::vector<double> min_eigs(const Problem& p, const Eigen::VectorXd& theta) {
    std::vector<double> out;
    out.reserve(p.blocks.size());
    for (size_t j = 0; j < p.blocks.size(); ++j) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.block_value(static_cast<int>(j), theta),
                                                          Eigen::EigenvaluesOnly);
        out.push_back(es.eigenvalues().minCoeff());
    }
    return out;
}

/// Problem with the uniform slack s appended as the last variable:
/// blocks become M_j(theta) + s*I, objective becomes min s.
Problem make_phase1(const Problem& p) {
    Problem p1;
    p1.num_vars = p.num_vars + 1;
    p1.c = Eigen::VectorXd::Zero(p1.num_vars);
    p1.c(p.num_vars) = 1.0;
    for (const auto& b : p.blocks) {
        AffineBlock nb;
        nb.name = b.name;
        nb.F0 = b.F0;
        nb.F = b.F;
        nb.F.push_back(Eigen::MatrixXd::Identity(b.dim(), b.dim()));
        p1.blocks.push_back(std::move(nb));
    }
    return p1;
}

}  // namespace

Eigen::MatrixXd Problem::block_value(int j, const Eigen::VectorXd& theta) const {
    const auto& b = blocks[j];
    Eigen::MatrixXd M = b.F0;
    for (int k = 0; k < num_vars; ++k) {
        if (theta(k) != 0.0) M += theta(k) * b.F[k];
    }
    return M;
}

FeasibilityResult find_feasible_point(const Problem& problem, const Options& options) {
    Problem p1 = make_phase1(problem);

    // theta = 0, s just above the worst block violation.
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p1.num_vars);
    double worst = 0.0;
    for (size_t j = 0; j < problem.blocks.size(); ++j) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(problem.blocks[j].F0,
                                                          Eigen::EigenvaluesOnly);
        worst = std::min(worst, es.eigenvalues().minCoeff());
    }
    const int si = problem.num_vars;
    theta(si) = -worst + 1.0;
    const double deep_enough = -0.01 * (1.0 + theta(si));

    double t = 1.0;
    for (int outer = 0; outer < options.max_outer; ++outer) {
        CenteringResult c = center(p1, t, theta, options.max_newton);
        theta = c.theta;
        if (theta(si) < deep_enough) break;  // comfortably interior; stop early
        double total_dim = 0.0;
        for (const auto& b : p1.blocks) total_dim += b.dim();
        if (total_dim / t <= options.tol * (1.0 + std::abs(theta(si)))) break;
        t *= options.barrier_mu;
    }

    FeasibilityResult out;
    out.theta = theta.head(problem.num_vars);
    out.margin = theta(si);
    out.block_min_eig = min_eigs(problem, out.theta);
    return out;
}

Result solve(const Problem& problem, const Options& options) {
    if (problem.num_vars <= 0 || problem.blocks.empty()) {
        throw SynthesisError("sdp: empty problem");
    }
    for (const auto& b : problem.blocks) {
        if (static_cast<int>(b.F.size()) != problem.num_vars) {
            throw SynthesisError("sdp: block '" + b.name + "' has inconsistent variable count");
        }
    }

    FeasibilityResult feas = find_feasible_point(problem, options);
    if (!(feas.margin < 0.0)) {
        std::ostringstream msg;
        msg << "sdp: no strictly feasible point (best margin " << feas.margin << ");";
        for (size_t j = 0; j < problem.blocks.size(); ++j) {
            msg << " " << problem.blocks[j].name << " min-eig " << feas.block_min_eig[j] << ";";
        }
        throw SynthesisError(msg.str());
    }

    double total_dim = 0.0;
    for (const auto& b : problem.blocks) total_dim += b.dim();

    Eigen::VectorXd theta = feas.theta;
    Result out;
    double t = 1.0;
    for (int outer = 0; outer < options.max_outer; ++outer) {
        CenteringResult c = center(problem, t, theta, options.max_newton);
        theta = c.theta;
        out.newton_iterations += c.newton_iterations;
        out.gap_bound = total_dim / t;
        const double obj = problem.c.dot(theta);
        if (out.gap_bound <= options.tol * (1.0 + std::abs(obj))) {
            out.theta = theta;
            out.objective = obj;
            out.block_min_eig = min_eigs(problem, theta);
            return out;
        }
        t *= options.barrier_mu;
    }
    throw SynthesisError("sdp: outer iteration limit reached without meeting tolerance");
}

}  // namespace budde::sdp
