#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cqed/hilbert.hpp"

using namespace cqed;

namespace {

Matrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = complexd(unif(rng), unif(rng));
    return m;
}

} // namespace

TEST_CASE("annihilation operator matrix elements") {
    const auto a = annihilation(1);
    REQUIRE(a.dim() == 2);
    CHECK(a.entries(0, 1) == complexd(1.0, 0.0));
    CHECK(a.entries(0, 0) == complexd(0.0, 0.0));
    CHECK(a.entries(1, 0) == complexd(0.0, 0.0));
    CHECK(a.entries(1, 1) == complexd(0.0, 0.0));

    const auto a3 = annihilation(3);
    const Matrix num = a3.entries.adjoint() * a3.entries;
    for (int n = 0; n <= 3; ++n)
        CHECK(num(n, n).real() == Catch::Approx(n).margin(1e-15));

    // exact sqrt-integer entries
    for (int n = 0; n < 3; ++n)
        CHECK(a3.entries(n, n + 1).real() ==
              Catch::Approx(std::sqrt(double(n + 1))).margin(1e-15));

    CHECK_THROWS_AS(annihilation(0), error);
}

TEST_CASE("commutator of a with a-dagger shows the truncation artifact") {
    const int n_max = 10;
    const auto a = annihilation(n_max);
    const Matrix comm = a.entries * a.entries.adjoint() -
                        a.entries.adjoint() * a.entries;
    for (int n = 0; n < n_max; ++n)
        CHECK(comm(n, n).real() == Catch::Approx(1.0).margin(1e-14));
    CHECK(comm(n_max, n_max).real() == Catch::Approx(-double(n_max)).margin(1e-13));
}

TEST_CASE("commutator identity on the untruncated block for every cutoff") {
    for (int n_max = 1; n_max <= 8; ++n_max) {
        const auto a = annihilation(n_max);
        const Matrix comm = a.entries * a.entries.adjoint() -
                            a.entries.adjoint() * a.entries;
        for (int n = 0; n < n_max; ++n)
            for (int m = 0; m <= n_max; ++m) {
                const double expect = (n == m) ? 1.0 : 0.0;
                CHECK(std::abs(comm(n, m) - expect) < 1e-14);
            }
    }
}

TEST_CASE("emitter operators") {
    const auto em = emitter_operators();
    const Matrix proj_e = em.sigma_plus.entries * em.sigma_minus.entries;
    CHECK(proj_e(1, 1) == complexd(1.0, 0.0));
    CHECK(proj_e(0, 0) == complexd(0.0, 0.0));

    const Matrix lhs = em.sigma_plus.entries * em.sigma_minus.entries -
                       em.sigma_minus.entries * em.sigma_plus.entries;
    CHECK((lhs - em.sigma_z.entries).cwiseAbs().maxCoeff() == 0.0);

    // ground state gives <sigma_z> = -1
    CHECK(em.sigma_z.entries(0, 0) == complexd(-1.0, 0.0));

    const Matrix sm2 = em.sigma_minus.entries * em.sigma_minus.entries;
    CHECK(sm2.cwiseAbs().maxCoeff() == 0.0);

    const Matrix anti = em.sigma_plus.entries * em.sigma_minus.entries +
                        em.sigma_minus.entries * em.sigma_plus.entries;
    CHECK((anti - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("tensor products") {
    const auto id2 = identity(Slot::emitter, 2);
    const auto id3 = identity(Slot::field, 3);
    const auto id6 = tensor(id2, id3);
    CHECK((id6.entries - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(id6.slot == Slot::composite);

    // hand Kronecker product for n_max = 1: single nonzero entry
    const auto em = emitter_operators();
    const auto sm_a = tensor(em.sigma_minus, annihilation(1));
    REQUIRE(sm_a.dim() == 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double expect = (i == 0 && j == 3) ? 1.0 : 0.0;
            CHECK(sm_a.entries(i, j) == complexd(expect, 0.0));
        }

    // mixed-product property: (sm x 1)(1 x a) = sm x a
    const Matrix lhs = tensor(em.sigma_minus, identity(Slot::field, 2)).entries *
                       tensor(id2, annihilation(1)).entries;
    CHECK((lhs - sm_a.entries).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(tensor(annihilation(1), em.sigma_minus), error);
    CHECK_THROWS_AS(tensor(id3, id3), error);
}

TEST_CASE("Kronecker mixed-product property on random operators") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        OperatorMatrix a{random_matrix(2, 2, rng), Slot::emitter};
        OperatorMatrix b{random_matrix(2, 2, rng), Slot::emitter};
        OperatorMatrix c{random_matrix(3, 3, rng), Slot::field};
        OperatorMatrix d{random_matrix(3, 3, rng), Slot::field};
        const Matrix lhs = tensor(a, c).entries * tensor(b, d).entries;
        const Matrix rhs =
            tensor({a.entries * b.entries, Slot::emitter},
                   {c.entries * d.entries, Slot::field})
                .entries;
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("composite space bookkeeping") {
    CHECK_THROWS_AS(CompositeSpace(0), error);
    const CompositeSpace space(5);
    CHECK(space.dim() == 12);
    CHECK(space.fock_dim() == 6);
    const auto ops = make_space_ops(space);
    CHECK(ops.a.rows() == 12);
    // slot order: |e, n> index = e * fock_dim + n
    CHECK(ops.sz(0, 0) == complexd(-1.0, 0.0));
    CHECK(ops.sz(6, 6) == complexd(1.0, 0.0));
    CHECK(ops.a(0, 1) == complexd(1.0, 0.0));
}
