#include <catch2/catch.hpp>

#include "iontrap/fockspace.hpp"

using namespace iontrap;

TEST_CASE("space dims validate the truncation size") {
    CHECK_THROWS_AS(SpaceDims(1), Error);
    CHECK(SpaceDims(2).total() == 4);
    CHECK(SpaceDims(64).total() == 128);
}

TEST_CASE("annihilation operator has the textbook ladder entries") {
    OperatorMatrix a = build_annihilation(SpaceDims(2));
    CHECK(a.m(0, 0) == cplx(0.0, 0.0));
    CHECK(a.m(0, 1) == cplx(1.0, 0.0));
    CHECK(a.m(1, 0) == cplx(0.0, 0.0));
    CHECK(a.m(1, 1) == cplx(0.0, 0.0));

    OperatorMatrix a8 = build_annihilation(SpaceDims(8));
    for (int n = 1; n < 8; ++n)
        CHECK(a8.m(n - 1, n) == cplx(std::sqrt(double(n)), 0.0));
}

TEST_CASE("annihilation kills the vacuum") {
    OperatorMatrix a = build_annihilation(SpaceDims(16));
    Vector vac = Vector::Zero(16);
    vac(0) = 1.0;
    CHECK((a.m * vac).norm() == 0.0);
}

TEST_CASE("ladder commutator is the identity away from the boundary") {
    const int n_max = 32;
    OperatorMatrix a = build_annihilation(SpaceDims(n_max));
    Matrix comm = a.m * a.m.adjoint() - a.m.adjoint() * a.m;
    comm.diagonal().array() -= 1.0;
    // identity on levels 0..n_max-2 up to sqrt(n)*sqrt(n) rounding;
    // the top diagonal entry carries -n_max
    CHECK(max_abs_interior(comm, n_max, false, n_max - 1) < 1e-13);
    CHECK(std::abs(comm(n_max - 1, n_max - 1)) ==
          Approx(double(n_max)).epsilon(1e-13));
}

TEST_CASE("displacement at beta=0 is the identity") {
    Matrix d = build_displacement(cplx(0.0, 0.0), 16).m;
    CHECK(identity_defect_interior(d, 16, false, 16) < 1e-14);
}

TEST_CASE("displacement column 0 carries coherent amplitudes") {
    const cplx beta(0.3, 0.2);
    const int n_max = 32;
    Matrix d = build_displacement(beta, n_max).m;
    for (int n = 0; n < 20; ++n)
        CHECK(std::abs(d(n, 0) - detail::coherent_amp(beta, n)) < 1e-10);
}

TEST_CASE("displacement inverse on the truncated space") {
    const cplx beta(0.0, 0.25);
    const int n_max = 64;
    Matrix d = build_displacement(beta, n_max).m;
    Matrix dm = build_displacement(-beta, n_max).m;
    const int interior = n_max - displacement_margin(std::abs(beta));
    CHECK(identity_defect_interior(Matrix(d * dm), n_max, false, interior) <
          1e-8);
    // built from one generator family, the product is exact everywhere
    CHECK(identity_defect_interior(Matrix(d * dm), n_max, false, n_max) <
          1e-13);
}

TEST_CASE("displacement composition law with its geometric phase") {
    const int n_max = 64;
    const struct { cplx b1, b2; } pairs[] = {
        {cplx(0.0, 1.0), cplx(0.0, 0.5)},    // collinear: exact everywhere
        {cplx(0.3, 0.4), cplx(-0.5, 0.2)},
        {cplx(1.0, 0.0), cplx(0.0, 1.0)},
        {cplx(0.9, -0.3), cplx(0.7, 0.6)},
    };
    for (const auto& [b1, b2] : pairs) {
        Matrix d1 = build_displacement(b1, n_max).m;
        Matrix d2 = build_displacement(b2, n_max).m;
        Matrix d12 = build_displacement(b1 + b2, n_max).m;
        const cplx phase = std::exp(cplx(0.0, std::imag(b1 * std::conj(b2))));
        Matrix diff = d1 * d2 - phase * d12;
        const int interior =
            n_max - product_chain_margin(std::abs(b1) + std::abs(b2));
        CHECK(max_abs_interior(diff, n_max, false, interior) < 1e-6);
    }
}

TEST_CASE("coherent state basics") {
    SECTION("alpha = 0 gives the vacuum") {
        StateVector s = coherent_state(cplx(0.0, 0.0), 16);
        CHECK(std::abs(s.v(0) - 1.0) < 1e-15);
        CHECK(s.v.segment(1, 15).norm() == 0.0);
    }
    SECTION("mean occupation is |alpha|^2") {
        const cplx alpha(0.5, 5.0);
        StateVector s = coherent_state(alpha, 128);
        CHECK(mean_fock_number(s) == Approx(std::norm(alpha)).margin(1e-8));
    }
    SECTION("occupation variance is Poissonian") {
        const cplx alpha(1.5, -2.0);
        StateVector s = coherent_state(alpha, 96);
        double m1 = 0.0, m2 = 0.0;
        for (int n = 0; n < 96; ++n) {
            const double pn = std::norm(s.v(n));
            m1 += n * pn;
            m2 += double(n) * n * pn;
        }
        const double var = m2 - m1 * m1;
        CHECK(var == Approx(std::norm(alpha)).epsilon(1e-6));
    }
    SECTION("truncation precondition enforced") {
        CHECK_THROWS_AS(coherent_state(cplx(5.0, 0.0), 32), TruncationTooSmall);
    }
    SECTION("matches the displaced vacuum") {
        const cplx alpha(0.5, 5.0);
        StateVector s = coherent_state(alpha, 128);
        Matrix d = build_displacement(alpha, 128).m;
        Vector displaced = d.col(0);
        CHECK((s.v - displaced).cwiseAbs().maxCoeff() < 1e-8);
    }
    SECTION("norm deficit is recorded") {
        double deficit = -1.0;
        coherent_state(cplx(2.0, 0.0), 64, &deficit);
        CHECK(std::abs(deficit) < 1e-12);  // far from the boundary
    }
}

TEST_CASE("electronic tensor products in the fixed basis ordering") {
    const int n_max = 4;
    SpaceDims dims(n_max);
    OperatorMatrix eye =
        OperatorMatrix::fock(n_max, Matrix::Identity(n_max, n_max));

    SECTION("sigma_z is -1 on the ground block, +1 on the excited block") {
        Matrix sz = tensor_electronic(eye, ElectronicOp::sigma_z).m;
        for (int n = 0; n < n_max; ++n) {
            CHECK(sz(n, n) == cplx(-1.0, 0.0));
            CHECK(sz(n_max + n, n_max + n) == cplx(1.0, 0.0));
        }
        CHECK(sz.cwiseAbs().sum() == Approx(2 * n_max));
    }

    SECTION("number (x) identity doubles each eigenvalue") {
        Matrix nf = tensor_electronic(build_number(dims),
                                      ElectronicOp::identity).m;
        Eigen::SelfAdjointEigenSolver<Matrix> es(nf);
        for (int n = 0; n < n_max; ++n) {
            CHECK(es.eigenvalues()(2 * n) == Approx(n).margin(1e-12));
            CHECK(es.eigenvalues()(2 * n + 1) == Approx(n).margin(1e-12));
        }
    }

    SECTION("a sigma_+ connects |g,1> to |e,0>") {
        Matrix op = tensor_electronic(build_annihilation(dims),
                                      ElectronicOp::sigma_plus).m;
        const int row = basis_index(true, 0, dims);
        const int col = basis_index(false, 1, dims);
        CHECK(op(row, col) == cplx(1.0, 0.0));
    }

    SECTION("Pauli algebra is exact") {
        Matrix sp = tensor_electronic(eye, ElectronicOp::sigma_plus).m;
        Matrix sm = tensor_electronic(eye, ElectronicOp::sigma_minus).m;
        Matrix sz = tensor_electronic(eye, ElectronicOp::sigma_z).m;
        Matrix id = tensor_electronic(eye, ElectronicOp::identity).m;
        CHECK(max_abs(Matrix(sp * sm + sm * sp - id)) == 0.0);
        CHECK(max_abs(Matrix(sp * sm - sm * sp - sz)) == 0.0);
    }
}

TEST_CASE("state embedding and expectation helpers") {
    const int n_max = 16;
    StateVector vib = coherent_state(cplx(0.0, 0.0), n_max);
    StateVector up = embed_electronic(vib, true);
    CHECK(up.dim() == 2 * n_max);
    CHECK(std::abs(up.v(basis_index(true, 0, SpaceDims(n_max))) - 1.0) <
          1e-15);

    OperatorMatrix nf = tensor_electronic(build_number(SpaceDims(n_max)),
                                          ElectronicOp::identity);
    CHECK(std::abs(expectation(nf, up)) < 1e-15);
    CHECK(mean_fock_number(up) == 0.0);
}

TEST_CASE("state vectors must be normalized at construction") {
    Vector v = Vector::Zero(4);
    v(0) = 2.0;
    CHECK_THROWS_AS(StateVector::make(v, 4, false), Error);
}

TEST_CASE("hermitian exponential rejects non-hermitian generators") {
    Matrix k = Matrix::Zero(3, 3);
    k(0, 1) = 1.0;  // not symmetric
    CHECK_THROWS_AS(exp_i_hermitian(k), Error);
}
