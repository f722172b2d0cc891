#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "feop/error.hpp"
#include "feop/linalg.hpp"
#include "feop/rng.hpp"

using namespace feop;

TEST_CASE("csr from triplets sums duplicates and sorts columns") {
    std::vector<Triplet> t = {{0, 1, 2.0}, {0, 0, 1.0}, {0, 1, 3.0}, {1, 1, 4.0}};
    const CsrMatrix m = CsrMatrix::from_triplets(2, 2, t);
    CHECK(m.at(0, 0) == 1.0);
    CHECK(m.at(0, 1) == 5.0);
    CHECK(m.at(1, 0) == 0.0);
    CHECK(m.at(1, 1) == 4.0);
    CHECK(m.bandwidth() == 1);

    std::ostringstream os;
    m.write_triplets(os);
    CHECK(os.str() == "0 0 1\n0 1 5\n1 1 4\n");

    CHECK_THROWS_AS(CsrMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), std::invalid_argument);
}

TEST_CASE("dense lu solves random systems to machine residual") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 40);
        Matrix a(n, n);
        for (auto& v : a.data) v = rng.uniform(-1.0, 1.0);
        std::vector<double> x_true(n);
        for (auto& v : x_true) v = rng.uniform(-1.0, 1.0);
        std::vector<double> b(n, 0.0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) b[i] += a(i, j) * x_true[j];
        }
        DenseLu f;
        try {
            f = lu_factor(a);
        } catch (const SingularMatrixError&) {
            continue;
        }
        const std::vector<double> x = lu_solve(f, b);
        for (int i = 0; i < n; ++i) {
            CHECK(x[i] == doctest::Approx(x_true[i]).epsilon(1e-8));
        }
    }
}

TEST_CASE("lu_factor rejects singular matrices") {
    Matrix a(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = 2.0;
    a(1, 0) = 2.0;
    a(1, 1) = 4.0;
    CHECK_THROWS_AS(lu_factor(a), SingularMatrixError);
}

TEST_CASE("banded lu matches dense lu on random band matrices") {
    Rng rng(42);
    int solved = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 5 + static_cast<int>(rng.next_u64() % 60);
        const int kl = 1 + static_cast<int>(rng.next_u64() % 3);
        const int ku = 1 + static_cast<int>(rng.next_u64() % 3);
        std::vector<Triplet> trips;
        for (int i = 0; i < n; ++i) {
            for (int j = std::max(0, i - kl); j <= std::min(n - 1, i + ku); ++j) {
                trips.push_back({i, j, rng.uniform(-1.0, 1.0) + (i == j ? 0.5 : 0.0)});
            }
        }
        const CsrMatrix a = CsrMatrix::from_triplets(n, n, trips);
        std::vector<double> b(n);
        for (auto& v : b) v = rng.uniform(-1.0, 1.0);
        try {
            const BandLu bf = band_factor(a);
            const std::vector<double> xb = band_solve(bf, b);
            const DenseLu df = lu_factor(a.to_dense());
            const std::vector<double> xd = lu_solve(df, b);
            for (int i = 0; i < n; ++i) {
                CHECK(xb[i] == doctest::Approx(xd[i]).epsilon(1e-8));
            }
            ++solved;
        } catch (const SingularMatrixError&) {
            continue;
        }
    }
    CHECK(solved > 200);
}

TEST_CASE("cholesky detects definiteness") {
    Matrix spd(2, 2);
    spd(0, 0) = 4.0;
    spd(0, 1) = 1.0;
    spd(1, 0) = 1.0;
    spd(1, 1) = 3.0;
    CHECK(is_positive_definite(spd));
    Matrix indef = spd;
    indef(1, 1) = -3.0;
    CHECK_FALSE(is_positive_definite(indef));
}

TEST_CASE("matmul helpers agree with naive products") {
    Rng rng(3);
    Matrix a(4, 6), b(5, 6), c;
    for (auto& v : a.data) v = rng.uniform(-1, 1);
    for (auto& v : b.data) v = rng.uniform(-1, 1);
    matmul_abt(a, b, c);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < 6; ++k) s += a(i, k) * b(j, k);
            CHECK(c(i, j) == doctest::Approx(s).epsilon(1e-13));
        }
    }
    Matrix d(6, 3), e;
    for (auto& v : d.data) v = rng.uniform(-1, 1);
    matmul_ab(a, d, e);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < 6; ++k) s += a(i, k) * d(k, j);
            CHECK(e(i, j) == doctest::Approx(s).epsilon(1e-13));
        }
    }
    Matrix g(4, 3), h;
    for (auto& v : g.data) v = rng.uniform(-1, 1);
    matmul_atb(a, g, h);
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < 4; ++k) s += a(k, i) * g(k, j);
            CHECK(h(i, j) == doctest::Approx(s).epsilon(1e-13));
        }
    }
}

TEST_CASE("linear solver picks the banded path for narrow bands") {
    std::vector<Triplet> trips;
    const int n = 400;
    for (int i = 0; i < n; ++i) {
        trips.push_back({i, i, 2.0});
        if (i > 0) trips.push_back({i, i - 1, -1.0});
        if (i + 1 < n) trips.push_back({i, i + 1, -1.0});
    }
    const CsrMatrix a = CsrMatrix::from_triplets(n, n, trips);
    const LinearSolver solver(a);
    CHECK(solver.banded());
    std::vector<double> b(n, 1.0);
    const std::vector<double> x = solver.solve(b);
    const std::vector<double> r = a.matvec(x);
    for (int i = 0; i < n; ++i) CHECK(r[i] == doctest::Approx(1.0).epsilon(1e-10));
}
