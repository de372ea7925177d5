#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <vector>

#include "cqed/errors.hpp"
#include "cqed/hilbert.hpp"
#include "cqed/ode.hpp"
#include "cqed/params.hpp"
#include "cqed/units.hpp"

namespace cqed {

/// Density matrix on a composite space. Hermitian, unit trace, numerically
/// positive.
struct DensityMatrix {
    Matrix rho;
    CompositeSpace space;

    void check(double herm_tol = 1e-10, double trace_tol = 1e-10,
               double eig_floor = -1e-8) const {
        require((rho - rho.adjoint()).cwiseAbs().maxCoeff() <= herm_tol,
                errc::solver_failure, "density matrix not Hermitian");
        require(std::abs(rho.trace().real() - 1.0) <= trace_tol &&
                    std::abs(rho.trace().imag()) <= trace_tol,
                errc::solver_failure, "density matrix trace != 1");
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
        require(es.eigenvalues().minCoeff() >= eig_floor, errc::solver_failure,
                "density matrix has a negative eigenvalue");
    }
};

/// Driven Jaynes-Cummings Hamiltonian in the frame rotating at the drive
/// frequency, in rad/ns:
///   H = dc a^dag a + dqd s+ s- + i g (s+ a - a^dag s-)
///       + i sqrt(kappa1) a_in (a - a^dag).
inline OperatorMatrix hamiltonian(const SystemParams& p, const CompositeSpace& space) {
    p.validate();
    const SpaceOps ops = make_space_ops(space);
    const complexd i1(0.0, 1.0);
    Matrix h = rad_per_ns(p.delta_c) * ops.num + rad_per_ns(p.delta_qd) * ops.proj_e +
               i1 * rad_per_ns(p.g) * (ops.sp * ops.a - ops.ad * ops.sm) +
               i1 * std::sqrt(rad_per_ns(p.kappa1)) * p.a_in * (ops.a - ops.ad);
    return {h, Slot::composite};
}

/// Lindblad generator acting on density matrices:
///   L rho = -i[H, rho] + kappa D[a] rho + gamma_par D[s-] rho
///           + (gamma_star/2)(sz rho sz - rho),
/// with D[X] rho = X rho X^dag - {X^dag X, rho}/2. Applied matrix-free for
/// propagation; the dense d^2 x d^2 matrix (column-major vectorisation) is
/// materialised on demand for the direct steady-state solve.
class Liouvillian {
public:
    Liouvillian(const SystemParams& params, const CompositeSpace& space)
        : params_(params), space_(space), ops_(make_space_ops(space)),
          h_(hamiltonian(params, space).entries) {
        kappa_rate_ = rad_per_ns(params.kappa());
        gpar_rate_ = rad_per_ns(params.gamma_par);
        gstar_rate_ = rad_per_ns(params.gamma_star);
    }

    const SystemParams& params() const { return params_; }
    const CompositeSpace& space() const { return space_; }
    const SpaceOps& ops() const { return ops_; }
    const Matrix& h() const { return h_; }
    int dim() const { return space_.dim(); }

    /// L rho, evaluated with d x d matrix products.
    Matrix apply(const Matrix& rho) const {
        const complexd i1(0.0, 1.0);
        Matrix out = -i1 * (h_ * rho - rho * h_);
        out += dissipator(ops_.a, ops_.ad, ops_.num, rho, kappa_rate_);
        out += dissipator(ops_.sm, ops_.sp, ops_.proj_e, rho, gpar_rate_);
        if (gstar_rate_ != 0.0)
            out += 0.5 * gstar_rate_ * (ops_.sz * rho * ops_.sz - rho);
        return out;
    }

    /// Dense generator on column-vectorised density matrices, cached.
    const Matrix& generator() const {
        if (gen_.size() == 0) {
            const int d = dim();
            const Matrix id = Matrix::Identity(d, d);
            Matrix gen = Matrix::Zero(d * d, d * d);
            const complexd i1(0.0, 1.0);
            gen -= i1 * (kron(id, h_) - kron(h_.transpose(), id));
            add_dissipator_super(gen, ops_.a, kappa_rate_);
            add_dissipator_super(gen, ops_.sm, gpar_rate_);
            if (gstar_rate_ != 0.0) {
                gen += 0.5 * gstar_rate_ * kron(ops_.sz.transpose(), ops_.sz);
                gen -= 0.5 * gstar_rate_ * Matrix::Identity(d * d, d * d);
            }
            gen_ = std::move(gen);
        }
        return gen_;
    }

    /// Max-norm of Tr(L rho) over a probe basis; zero for a trace-preserving
    /// generator. Diagnostic used by tests and the validation suite.
    double trace_defect() const {
        const Matrix& g = generator();
        const int d = dim();
        double worst = 0.0;
        // row functional Tr o L: sum the rows of g corresponding to diagonal
        // entries of the output matrix.
        Eigen::RowVectorXcd tr_row = Eigen::RowVectorXcd::Zero(d * d);
        for (int k = 0; k < d; ++k) tr_row += g.row(k * d + k);
        worst = tr_row.cwiseAbs().maxCoeff();
        return worst;
    }

private:
    static Matrix kron(const Matrix& a, const Matrix& b) {
        Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j)
                out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                    a(i, j) * b;
        return out;
    }

    static Matrix dissipator(const Matrix& x, const Matrix& xd, const Matrix& xdx,
                             const Matrix& rho, double rate) {
        if (rate == 0.0) return Matrix::Zero(rho.rows(), rho.cols());
        return rate * (x * rho * xd - 0.5 * (xdx * rho + rho * xdx));
    }

    static void add_dissipator_super(Matrix& gen, const Matrix& x, double rate) {
        if (rate == 0.0) return;
        const int d = static_cast<int>(x.rows());
        const Matrix id = Matrix::Identity(d, d);
        const Matrix xd = x.adjoint();
        const Matrix xdx = xd * x;
        gen += rate * kron(x.conjugate(), x);
        gen -= 0.5 * rate * kron(id, xdx);
        gen -= 0.5 * rate * kron(xdx.transpose(), id);
    }

    SystemParams params_;
    CompositeSpace space_;
    SpaceOps ops_;
    Matrix h_;
    double kappa_rate_, gpar_rate_, gstar_rate_;
    mutable Matrix gen_;
};

inline Liouvillian liouvillian(const SystemParams& p, const CompositeSpace& space) {
    return Liouvillian(p, space);
}

/// Unique steady state of the generator: dense LU on L with one row replaced
/// by the vectorised trace constraint. Verifies the residual and detects a
/// degenerate kernel instead of silently picking a representative.
inline DensityMatrix steady_state(const Liouvillian& L, double residual_tol = 1e-10) {
    const int d = L.dim();
    const Matrix& gen = L.generator();
    Matrix m = gen;
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(d * d);
    for (int c = 0; c < d * d; ++c) m(0, c) = 0.0;
    for (int k = 0; k < d; ++k) m(0, k * d + k) = 1.0; // Tr rho = 1
    b(0) = 1.0;

    Eigen::PartialPivLU<Matrix> lu(m);
    // A second stationary state would make the trace-row-replaced matrix
    // singular; rcond distinguishes the generator's ordinary stiffness
    // (rcond ~ 1e-3..1e-8) from a genuine kernel (rcond at machine zero).
    const double rcond = lu.rcond();
    require(rcond > 1e-13, errc::degenerate_steady_state,
            "steady state not unique (rcond = " + std::to_string(rcond) + ")");

    Eigen::VectorXcd x = lu.solve(b);
    const double solve_residual = (m * x - b).cwiseAbs().maxCoeff();
    require(std::isfinite(solve_residual) && solve_residual < 1e-6,
            errc::solver_failure,
            "steady-state linear solve residual " + std::to_string(solve_residual));

    Matrix rho = Eigen::Map<Matrix>(x.data(), d, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();

    const double gen_scale = gen.cwiseAbs().maxCoeff();
    const double residual = L.apply(rho).cwiseAbs().maxCoeff();
    require(residual <= residual_tol * gen_scale, errc::solver_failure,
            "steady-state residual " + std::to_string(residual / gen_scale) +
                " exceeds tolerance");

    DensityMatrix out{rho, L.space()};
    out.check();
    return out;
}

/// rho(t) = exp(L t) rho0 sampled on an ascending time grid (ns). Trace and
/// Hermiticity drift are verified, not renormalised away.
inline std::vector<DensityMatrix> propagate(const Liouvillian& L,
                                            const DensityMatrix& rho0,
                                            const std::vector<double>& times,
                                            double rtol = 1e-10) {
    require(!times.empty() && times.front() >= 0.0, errc::domain_error,
            "time grid must start at t >= 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        require(times[i] > times[i - 1], errc::domain_error,
                "time grid must be ascending");

    std::vector<DensityMatrix> out;
    out.reserve(times.size());
    Matrix rho = rho0.rho;
    double t = 0.0;
    OdeOptions opt;
    opt.rtol = rtol;
    opt.atol = rtol * 1e-2;
    const auto rhs = [&L](const Matrix& x) { return L.apply(x); };
    for (double target : times) {
        if (target > t) {
            integrate_dp54(rhs, rho, t, target, opt);
            t = target;
        }
        const double trace_err = std::abs(rho.trace() - complexd(1.0, 0.0));
        const double herm_err = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
        require(trace_err <= 1e-8 && herm_err <= 1e-8, errc::propagation_failure,
                "trace/hermiticity drift at t = " + std::to_string(t) + " ns");
        out.push_back(DensityMatrix{rho, rho0.space});
    }
    return out;
}

/// Steady-state Fock-tail diagnostics used by choose_cutoff.
inline double fock_tail_population(const DensityMatrix& rho) {
    const int nf = rho.space.fock_dim();
    double tail = 0.0;
    for (int e = 0; e < 2; ++e)
        for (int n = nf - 2; n < nf; ++n) {
            const int i = e * nf + n;
            tail += rho.rho(i, i).real();
        }
    return tail;
}

namespace detail {
/// g2(0) of the bare transmitted (cavity) field from a steady state.
inline double cavity_g2_zero(const DensityMatrix& rho, const SpaceOps& ops) {
    const double n = (ops.num * rho.rho).trace().real();
    const double n2 = (ops.ad * ops.ad * ops.a * ops.a * rho.rho).trace().real();
    require(n > 1e-14, errc::undefined_normalization, "cavity flux is zero");
    return n2 / (n * n);
}
} // namespace detail

/// Smallest n_max whose steady state has top-two-level population below
/// tail_tol and whose transmitted g2(0) moves by < 0.1% when n_max -> n_max+2.
inline int choose_cutoff(const SystemParams& p, double tail_tol = 1e-10,
                         int hard_cap = 48) {
    require(tail_tol > 0, errc::domain_error, "tail tolerance must be positive");
    p.validate();
    if (p.a_in == 0.0) return 1;

    auto solve_g2 = [&p](int n_max, double& tail) {
        const CompositeSpace space(n_max);
        const Liouvillian L(p, space);
        const DensityMatrix rho = steady_state(L);
        tail = fock_tail_population(rho);
        return detail::cavity_g2_zero(rho, make_space_ops(space));
    };

    for (int n_max = 2; n_max <= hard_cap; ++n_max) {
        double tail = 0.0;
        const double g2 = solve_g2(n_max, tail);
        if (tail >= tail_tol) continue;
        double tail2 = 0.0;
        const double g2_next = solve_g2(n_max + 2, tail2);
        if (std::abs(g2_next - g2) <= 1e-3 * std::abs(g2_next)) return n_max;
    }
    fail(errc::cutoff_overflow,
         "no converged cutoff below hard cap " + std::to_string(hard_cap) +
             "; drive too strong for this engine");
}

} // namespace cqed
