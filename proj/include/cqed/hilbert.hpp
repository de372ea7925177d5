#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "cqed/errors.hpp"

namespace cqed {

using complexd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Composite Hilbert space of a two-level emitter and a Fock mode truncated
/// at n_max photons. The slot order is fixed globally: emitter first, field
/// second, with emitter basis {ground, excited}. Composite index
/// i = emitter * (n_max+1) + n.
struct CompositeSpace {
    int n_max;

    explicit CompositeSpace(int n_max_) : n_max(n_max_) {
        require(n_max >= 1, errc::invalid_cutoff,
                "Fock cutoff must be at least 1, got " + std::to_string(n_max));
    }

    int fock_dim() const { return n_max + 1; }
    int dim() const { return 2 * (n_max + 1); }

    friend bool operator==(const CompositeSpace&, const CompositeSpace&) = default;
};

/// Which slot of the composite space an operator acts on. Single-slot
/// operators must be embedded (via tensor) before they can be combined with
/// composite ones.
enum class Slot { emitter, field, composite };

/// Dense complex matrix together with the slot it acts on.
struct OperatorMatrix {
    Matrix entries;
    Slot slot = Slot::composite;

    int dim() const { return static_cast<int>(entries.rows()); }

    OperatorMatrix adjoint() const { return {entries.adjoint(), slot}; }

    bool is_hermitian(double tol = 1e-12) const {
        return (entries - entries.adjoint()).cwiseAbs().maxCoeff() <= tol;
    }
};

/// Fock-space annihilation operator: <n|a|n+1> = sqrt(n+1).
inline OperatorMatrix annihilation(int n_max) {
    require(n_max >= 1, errc::invalid_cutoff,
            "annihilation requires n_max >= 1, got " + std::to_string(n_max));
    const int nf = n_max + 1;
    Matrix a = Matrix::Zero(nf, nf);
    for (int n = 0; n < n_max; ++n)
        a(n, n + 1) = std::sqrt(static_cast<double>(n + 1));
    return {a, Slot::field};
}

struct EmitterOps {
    OperatorMatrix sigma_minus; ///< |g><e|
    OperatorMatrix sigma_plus;  ///< |e><g|
    OperatorMatrix sigma_z;     ///< |e><e| - |g><g|; ground state gives -1
};

/// Emitter-slot dipole operators in the fixed basis {g,e}.
inline EmitterOps emitter_operators() {
    Matrix sm = Matrix::Zero(2, 2);
    sm(0, 1) = 1.0;
    Matrix sz = Matrix::Zero(2, 2);
    sz(0, 0) = -1.0;
    sz(1, 1) = 1.0;
    return {{sm, Slot::emitter}, {sm.adjoint().eval(), Slot::emitter}, {sz, Slot::emitter}};
}

inline OperatorMatrix identity(Slot slot, int dim) {
    return {Matrix::Identity(dim, dim), slot};
}

/// Kronecker product in the fixed slot order (emitter x field).
inline OperatorMatrix tensor(const OperatorMatrix& a, const OperatorMatrix& b) {
    require(a.slot == Slot::emitter && b.slot == Slot::field, errc::composition_error,
            "tensor expects (emitter, field) operands in that order");
    const auto ra = a.entries.rows(), ca = a.entries.cols();
    const auto rb = b.entries.rows(), cb = b.entries.cols();
    Matrix out(ra * rb, ca * cb);
    for (Eigen::Index i = 0; i < ra; ++i)
        for (Eigen::Index j = 0; j < ca; ++j)
            out.block(i * rb, j * cb, rb, cb) = a.entries(i, j) * b.entries;
    return {out, Slot::composite};
}

/// Operators of the composite space used by the generator builders.
struct SpaceOps {
    CompositeSpace space;
    Matrix a;       ///< annihilation on the field slot
    Matrix ad;      ///< creation
    Matrix sm;      ///< sigma_-
    Matrix sp;      ///< sigma_+
    Matrix sz;      ///< sigma_z
    Matrix num;     ///< a^dag a
    Matrix proj_e;  ///< sigma_+ sigma_-
};

inline SpaceOps make_space_ops(const CompositeSpace& space) {
    const auto em = emitter_operators();
    const auto id2 = identity(Slot::emitter, 2);
    const auto idf = identity(Slot::field, space.fock_dim());
    const Matrix a = tensor(id2, annihilation(space.n_max)).entries;
    const Matrix sm = tensor(em.sigma_minus, idf).entries;
    const Matrix sz = tensor(em.sigma_z, idf).entries;
    SpaceOps ops{space, a, a.adjoint(), sm, sm.adjoint(), sz, Matrix(), Matrix()};
    ops.num = ops.ad * ops.a;
    ops.proj_e = ops.sp * ops.sm;
    return ops;
}

} // namespace cqed
