#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "feop/error.hpp"
#include "feop/forcing.hpp"

using namespace feop;

namespace {

struct Fixture {
    Mesh mesh = generate_interval_mesh(-1.0, 1.0, 16);
    DofMap dofmap;
    AssembledSystem sys;
    Fixture() {
        dofmap = build_dofmap(mesh, ElemOrder::P1);
        ProblemSpec spec;
        spec.epsilon = 0.1;
        sys = assemble_bilinear(spec, mesh, dofmap);
    }
    LoadAssembler assembler() const {
        const Mesh* m = &mesh;
        const DofMap* dm = &dofmap;
        return [m, dm](const ScalarField& f) {
            return assemble_load(*m, *dm, f, BcKind::Dirichlet0);
        };
    }
};

}  // namespace

TEST_CASE("sampling stays in range and is reproducible") {
    ForcingFamily fam;  // m in [3,5], n in [0, 2pi]
    Rng a(77), b(77), c(78);
    for (int i = 0; i < 500; ++i) {
        const ForcingSample s1 = sample_forcing(fam, a);
        const ForcingSample s2 = sample_forcing(fam, b);
        const ForcingSample s3 = sample_forcing(fam, c);
        CHECK(s1.omega == s2.omega);
        CHECK(s1.omega != s3.omega);
        CHECK(s1.omega[0] >= 3.0);
        CHECK(s1.omega[0] <= 5.0);
        CHECK(s1.omega[2] >= 3.0);
        CHECK(s1.omega[2] <= 5.0);
        CHECK(s1.omega[1] >= 0.0);
        CHECK(s1.omega[1] <= 6.2832);
        CHECK(s1.omega[3] >= 0.0);
        CHECK(s1.omega[3] <= 6.2832);
    }
}

TEST_CASE("degenerate amplitude range gives the zero function") {
    ForcingFamily fam;
    fam.m_lo = fam.m_hi = 0.0;
    Rng rng(5);
    const ForcingSample s = sample_forcing(fam, rng);
    for (double x = -1.0; x <= 1.0; x += 0.1) CHECK(eval_forcing(s, x) == 0.0);
}

TEST_CASE("empirical amplitude mean within three standard errors") {
    ForcingFamily fam;
    Rng rng(2025);
    const int n = 10000;
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += sample_forcing(fam, rng).omega[0];
    mean /= n;
    const double se = (2.0 / std::sqrt(12.0)) / std::sqrt(static_cast<double>(n));
    CHECK(std::fabs(mean - 4.0) <= 3.0 * se);
}

TEST_CASE("eval matches the closed form at random points") {
    Rng rng(3);
    ForcingFamily fam1;
    ForcingFamily fam2;
    fam2.dim = 2;
    for (int trial = 0; trial < 20; ++trial) {
        const ForcingSample s1 = sample_forcing(fam1, rng);
        const ForcingSample s2 = sample_forcing(fam2, rng);
        for (int p = 0; p < 100; ++p) {
            const double x = rng.uniform(-1.0, 1.0);
            const double y = rng.uniform(-1.0, 1.0);
            const double want1 = s1.omega[0] * std::sin(s1.omega[1] * x) +
                                 s1.omega[2] * std::cos(s1.omega[3] * x);
            CHECK(std::fabs(eval_forcing(s1, x) - want1) <= 1e-14 * (1.0 + std::fabs(want1)));
            const double want2 =
                s2.omega[0] * std::sin(s2.omega[2] * x + s2.omega[3] * y) +
                s2.omega[1] * std::cos(s2.omega[4] * x + s2.omega[5] * y);
            CHECK(std::fabs(eval_forcing(s2, x, y) - want2) <=
                  1e-14 * (1.0 + std::fabs(want2)));
        }
    }
    // Hand-picked omegas.
    ForcingSample zero;
    zero.dim = 1;
    zero.omega = {1.0, 0.0, 0.0, 0.0};  // sin(0 x) scaled by 1, cos term zeroed
    CHECK(eval_forcing(zero, 0.37) == 0.0);
    ForcingSample one;
    one.dim = 1;
    one.omega = {0.0, 1.0, 1.0, 0.0};  // cos(0 x) = 1
    CHECK(eval_forcing(one, -0.7) == 1.0);
}

TEST_CASE("datasets: determinism, emptiness, load consistency") {
    Fixture fx;
    ForcingFamily fam;

    const Dataset empty = build_dataset(fam, 0, 9, fx.assembler());
    CHECK(empty.size() == 0);

    const Dataset a = build_dataset(fam, 50, 42, fx.assembler());
    const Dataset b = build_dataset(fam, 50, 42, fx.assembler());
    const Dataset c = build_dataset(fam, 50, 43, fx.assembler());
    REQUIRE(a.size() == 50);
    bool all_equal = true;
    bool any_diff_seed = false;
    for (int m = 0; m < 50; ++m) {
        if (a.samples[m].omega != b.samples[m].omega) all_equal = false;
        if (a.samples[m].omega != c.samples[m].omega) any_diff_seed = true;
        // loads match a one-by-one reassembly
        const LoadVector direct = fx.assembler()(forcing_field(a.samples[m]));
        REQUIRE(direct.f.size() == a.loads[m].f.size());
        for (std::size_t i = 0; i < direct.f.size(); ++i) {
            CHECK(a.loads[m].f[i] == direct.f[i]);
        }
    }
    CHECK(all_equal);
    CHECK(any_diff_seed);
}

TEST_CASE("load linearity in the forcing amplitudes") {
    Fixture fx;
    ForcingSample s1, s2, sum;
    s1.dim = s2.dim = sum.dim = 1;
    s1.omega = {2.0, 1.5, 0.0, 2.5};
    s2.omega = {1.0, 1.5, 3.0, 2.5};
    sum.omega = {3.0, 1.5, 3.0, 2.5};  // same frequencies, amplitudes add
    const LoadVector f1 = fx.assembler()(forcing_field(s1));
    const LoadVector f2 = fx.assembler()(forcing_field(s2));
    const LoadVector fs = fx.assembler()(forcing_field(sum));
    for (std::size_t i = 0; i < fs.f.size(); ++i) {
        CHECK(fs.f[i] == doctest::Approx(f1.f[i] + f2.f[i]).epsilon(1e-12));
    }
}

TEST_CASE("dataset text round trip") {
    Fixture fx;
    ForcingFamily fam;
    Dataset ds = build_dataset(fam, 20, 7, fx.assembler());
    const std::string path =
        (std::filesystem::temp_directory_path() / "feop_dataset.txt").string();
    save_dataset(ds, path);
    Dataset back = load_dataset(path);
    CHECK(back.seed == ds.seed);
    CHECK(back.family.dim == 1);
    REQUIRE(back.size() == ds.size());
    for (int m = 0; m < ds.size(); ++m) CHECK(back.samples[m].omega == ds.samples[m].omega);
    rebuild_loads(back, fx.assembler());
    for (int m = 0; m < ds.size(); ++m) {
        for (std::size_t i = 0; i < ds.loads[m].f.size(); ++i) {
            CHECK(back.loads[m].f[i] == ds.loads[m].f[i]);
        }
    }
    std::filesystem::remove(path);
}

TEST_CASE("reaction-coefficient datasets carry per-sample systems") {
    Fixture fx;
    ForcingFamily fam;
    fam.kind = InputKind::ReactionCoefficient;
    fam.m_lo = 1.0;
    fam.m_hi = 2.0;
    const Mesh* mesh = &fx.mesh;
    const DofMap* dm = &fx.dofmap;
    const Dataset ds = build_dataset_reaction(
        fam, 5, 11, [mesh, dm](const ScalarField& c) {
            ProblemSpec spec;
            spec.epsilon = 0.1;
            spec.b = [](double x, double) { return std::array<double, 2>{x * x + 1.0, 0.0}; };
            spec.c = c;
            AssembledSystem sys = assemble_bilinear(spec, *mesh, *dm);
            LoadVector load = assemble_load(*mesh, *dm, constant_field(1.0), spec.bc);
            return std::make_pair(std::move(sys), std::move(load));
        });
    REQUIRE(ds.per_sample_systems());
    REQUIRE(ds.systems.size() == 5);
    // Different coefficients produce different operators.
    bool differ = false;
    for (int i = 0; i < ds.systems[0].A.n_rows && !differ; ++i) {
        if (std::fabs(ds.systems[0].A.at(i, i) - ds.systems[1].A.at(i, i)) > 1e-12) {
            differ = true;
        }
    }
    CHECK(differ);
}

TEST_CASE("family validation") {
    ForcingFamily fam;
    fam.m_lo = 2.0;
    fam.m_hi = 1.0;
    Rng rng(1);
    CHECK_THROWS_AS(sample_forcing(fam, rng), std::invalid_argument);
}
