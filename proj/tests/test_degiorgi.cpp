#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "fvbs/assemble.hpp"
#include "fvbs/degiorgi.hpp"
#include "fvbs/errors.hpp"
#include "fvbs/mesh.hpp"
#include "fvbs/problem.hpp"
#include "fvbs/runner.hpp"

using namespace fvbs;

namespace {

const Rect kUnit{0.0, 0.0, 1.0, 1.0};

std::vector<double> solve_on(const Mesh& mesh, const ProblemSpec& spec, const BFunction& B,
                             DiscreteData* data_out = nullptr, Norms* norms_out = nullptr) {
    DiscreteData data = discretize_data(mesh, spec);
    if (norms_out) *norms_out = compute_norms(mesh, spec, data);
    auto v = solve(assemble(mesh, data, B));
    if (data_out) *data_out = data;
    return v;
}

// two cells joined by a single interior edge with tau = 2; no boundary
Mesh two_cell_mesh() {
    Mesh mesh;
    mesh.cells.resize(2);
    mesh.cells[0] = {0, {0.25, 0.5}, 0.5, {0}};
    mesh.cells[1] = {1, {0.75, 0.5}, 0.5, {0}};
    Edge e;
    e.id = 0;
    e.kind = EdgeKind::Interior;
    e.cell_a = 0;
    e.cell_b = 1;
    e.measure = 1.0;
    e.d_sigma = 0.5;
    e.tau = 2.0;
    e.midpoint = {0.5, 0.5};
    e.normal = {1.0, 0.0};
    mesh.edges.push_back(e);
    mesh.domain_measure = 1.0;
    mesh.domain_diameter = std::sqrt(2.0);
    mesh.size_h = 0.5;
    mesh.xi = 0.5;
    return mesh;
}

}  // namespace

TEST_CASE("truncation thresholds") {
    CHECK(truncation_threshold(1) == 1.0);
    CHECK(truncation_threshold(2) == 1.5);
    CHECK(truncation_threshold(20) == 2.0 - std::ldexp(1.0, -19));
    for (int m = 2; m <= 50; ++m)
        CHECK(truncation_threshold(m) - truncation_threshold(m - 1) == std::ldexp(1.0, 1 - m));
    CHECK_THROWS_AS(truncation_threshold(0), std::invalid_argument);
}

TEST_CASE("energy hand values on a single interior edge") {
    Mesh mesh = two_cell_mesh();
    std::vector<double> v{3.0, 1.0};
    std::vector<double> vd;  // no boundary edges
    auto en = energy(mesh, v, vd, 1);
    // log side: tau (log 3 - log 1)^2; product side: tau * 2 * (2/3)
    CHECK(en.e == doctest::Approx(2.0 * std::log(3.0) * std::log(3.0)).epsilon(1e-15));
    CHECK(en.f == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
    CHECK(en.e <= en.f);

    auto rev = energy(mesh, v, vd, 1, /*reverse_interior=*/true);
    CHECK(rev.e == en.e);
    CHECK(rev.f == en.f);

    // level 2: threshold 1.5 truncates the smaller cell to zero
    auto en2 = energy(mesh, v, vd, 2);
    CHECK(en2.e == doctest::Approx(2.0 * std::log1p(1.5) * std::log1p(1.5)).epsilon(1e-15));
}

TEST_CASE("energy counts Dirichlet edges") {
    Mesh mesh = build_rectangular_mesh(1, 1, kUnit, all_dirichlet());
    std::vector<double> v{3.0};
    std::vector<double> vd(mesh.edges.size(), 0.0);
    auto en = energy(mesh, v, vd, 1);
    CHECK(en.e == doctest::Approx(8.0 * std::log(3.0) * std::log(3.0)).epsilon(1e-14));
}

TEST_CASE("energy orientation invariance on random fields") {
    Mesh mesh = build_rectangular_mesh(6, 5, kUnit, dirichlet_west_only());
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> uni(-0.5, 4.0);
    std::vector<double> vd(mesh.edges.size(), 0.4);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> v(mesh.cells.size());
        for (auto& x : v) x = uni(rng);
        for (int m = 1; m <= 4; ++m) {
            auto a = energy(mesh, v, vd, m);
            auto b = energy(mesh, v, vd, m, true);
            CHECK(a.e == doctest::Approx(b.e).epsilon(1e-13));
            CHECK(a.f == doctest::Approx(b.f).epsilon(1e-13));
        }
    }
}

TEST_CASE("beta_u reference values") {
    CHECK(beta_u(BFunction::upwind(), 7.0, 3.0) == 1.0);
    CHECK(beta_u(BFunction::scharfetter_gummel(), 0.0, 1.0) == 1.0);
    double s = std::sqrt(2.0);
    CHECK(beta_u(BFunction::scharfetter_gummel(), 1.0, s) ==
          doctest::Approx(s / std::expm1(s)).epsilon(1e-14));
    // custom: decreasing exponential, infimum at the right endpoint
    auto B = BFunction::make_custom([](double t) { return std::exp(-t / 2.0); });
    CHECK(beta_u(B, 2.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
    CHECK_THROWS_AS(beta_u(BFunction::make_custom([](double) { return -1.0; }), 1.0, 1.0),
                    AssemblyError);
    CHECK_THROWS_AS(beta_u(BFunction::upwind(), -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("fundamental estimate holds on compliant random problems") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 8; ++trial) {
        ProblemSpec spec = random_compliant_problem(rng);
        BFunction B = trial % 2 ? BFunction::scharfetter_gummel() : BFunction::upwind();
        Mesh mesh = build_rectangular_mesh(8, 8, kUnit, all_dirichlet());
        DiscreteData data;
        Norms norms;
        auto v = solve_on(mesh, spec, B, &data, &norms);
        for (int m = 1; m <= 8; ++m) {
            auto rep = check_fundamental_estimate(mesh, v, data, norms, B, m);
            REQUIRE(rep.applicable);
            CHECK(rep.holds);
            CHECK(rep.e_m <= rep.f_m * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("fundamental estimate flags inapplicable data") {
    Mesh mesh = build_rectangular_mesh(4, 4, kUnit, all_dirichlet());
    ProblemSpec spec;
    spec.velocity = {constant_field(0.0), constant_field(0.0)};
    spec.reaction = constant_field(0.0);
    spec.source = constant_field(-1.0);  // violates f >= 0
    spec.dirichlet_value = constant_field(0.0);
    DiscreteData data;
    Norms norms;
    auto v = solve_on(mesh, spec, BFunction::upwind(), &data, &norms);
    auto rep = check_fundamental_estimate(mesh, v, data, norms, BFunction::upwind(), 1);
    CHECK_FALSE(rep.applicable);
}

TEST_CASE("sequence bound exact cases") {
    CHECK(sequence_bound(0.0, 3.0, 2.0, 2.0, 17).bound_n == 0.0);
    // K = rho = 1 collapses to u0^(alpha^n): (1/2)^8 = 1/256 exactly
    CHECK(sequence_bound(0.5, 1.0, 1.0, 2.0, 3).bound_n == 1.0 / 256.0);
    CHECK_THROWS_AS(sequence_bound(1.0, 1.0, 1.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sequence_bound(1.0, 0.0, 1.0, 2.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sequence_bound(-1.0, 1.0, 1.0, 2.0, 1), std::invalid_argument);
}

TEST_CASE("sequence bound dominates the recursion below the smallness threshold") {
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> ua(1.05, 3.0), ur(1.0, 10.0), uk(0.5, 5.0),
        uf(0.05, 0.95);
    for (int trial = 0; trial < 100; ++trial) {
        double alpha = ua(rng), rho = ur(rng), K = uk(rng);
        double thresh = sequence_bound(1.0, K, rho, alpha, 0).smallness_threshold;
        double u0 = uf(rng) * thresh;
        long double u = u0;
        for (int n = 0; n <= 60; ++n) {
            double bound = sequence_bound(u0, K, rho, alpha, n).bound_n;
            CHECK(static_cast<double>(u) <= bound * (1.0 + 1e-9) + 1e-300);
            u = static_cast<long double>(K) * std::pow(static_cast<long double>(rho), n) *
                std::pow(u, static_cast<long double>(alpha));
            if (u == 0.0L) break;
        }
    }
}

TEST_CASE("signed decomposition") {
    Mesh mesh = build_rectangular_mesh(10, 10, kUnit, all_dirichlet());
    auto B = BFunction::scharfetter_gummel();

    SUBCASE("nonnegative data leaves the negative part at zero") {
        ProblemSpec spec;
        spec.velocity = {constant_field(1.0), constant_field(0.5)};
        spec.reaction = constant_field(0.1);
        spec.source = constant_field(1.0);
        spec.dirichlet_value = constant_field(0.25);
        auto d = decompose_signed(mesh, spec, B);
        CHECK(d.residual <= 1e-11);
        for (double n : d.negative_part) CHECK(std::abs(n) <= 1e-12);
    }

    SUBCASE("mixed-sign data splits with a small residual") {
        std::mt19937_64 rng(99);
        for (int trial = 0; trial < 5; ++trial) {
            ProblemSpec spec = random_mixed_problem(rng);
            auto d = decompose_signed(mesh, spec, B);
            CHECK(d.residual <= 1e-11);
            for (size_t i = 0; i < d.solution.size(); ++i) {
                CHECK(d.positive_part[i] >= -1e-12);
                CHECK(d.negative_part[i] >= -1e-12);
            }
        }
    }

    SUBCASE("negating the data swaps the parts") {
        std::mt19937_64 rng(7);
        ProblemSpec spec = random_mixed_problem(rng);
        ProblemSpec neg = spec;
        auto f = spec.source;
        auto vd = spec.dirichlet_value;
        neg.source = [f](double x, double y) { return -f(x, y); };
        neg.dirichlet_value = [vd](double x, double y) { return -vd(x, y); };
        auto d1 = decompose_signed(mesh, spec, B);
        auto d2 = decompose_signed(mesh, neg, B);
        for (size_t i = 0; i < d1.solution.size(); ++i) {
            CHECK(d1.positive_part[i] == doctest::Approx(d2.negative_part[i]).epsilon(1e-12));
            CHECK(d1.negative_part[i] == doctest::Approx(d2.positive_part[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("a priori bound degenerates to the data scale") {
    Norms norms;  // all zeros
    BoundConstants c;
    double m = a_priori_bound(norms, c, BoundSign::Plus);
    CHECK(m >= 1.0);
    CHECK(m <= 1.0 + 1e-5);
}

TEST_CASE("a priori bound is monotone in the data and the constant") {
    BoundConstants c;
    c.beta_u = 0.5;
    Norms small;
    small.u_inf = 1.0;
    small.f_plus_inf = 0.5;
    Norms big = small;
    big.f_plus_inf = 5.0;
    double mb_small = a_priori_bound(small, c, BoundSign::Plus);
    double mb_big = a_priori_bound(big, c, BoundSign::Plus);
    CHECK(mb_small <= mb_big);

    BoundConstants generous = c;
    generous.boundm_c = 10.0;
    CHECK(a_priori_bound(small, generous, BoundSign::Plus) <= mb_small * (1.0 + 1e-6));

    CHECK(std::isfinite(a_priori_bound(big, c, BoundSign::Minus)));
    BoundConstants bad = c;
    bad.boundm_c = 0.0;
    CHECK_THROWS_AS(a_priori_bound(small, bad, BoundSign::Plus), std::invalid_argument);
}

TEST_CASE("uniform bound study on the Laplace reference problem") {
    ProblemSpec spec;
    spec.velocity = {constant_field(0.0), constant_field(0.0)};
    spec.reaction = constant_field(0.0);
    spec.source = constant_field(1.0);
    spec.dirichlet_value = constant_field(0.0);
    auto mesh_for = [](int nx, int ny) {
        return build_rectangular_mesh(nx, ny, kUnit, all_dirichlet());
    };
    auto rep = verify_uniform_bound(spec, BFunction::upwind(), mesh_for,
                                    {{16, 16}, {32, 32}, {64, 64}}, BoundConstants{});
    REQUIRE(rep.levels.size() == 3);
    for (const auto& lev : rep.levels) CHECK(lev.solved);
    // max of the Dirichlet-Laplace solution with unit source on the unit square
    CHECK(rep.levels.back().v_max == doctest::Approx(0.0736713).epsilon(5e-3));
    CHECK(rep.bounded);
    CHECK(rep.h_independent);
    CHECK(rep.m_bar >= rep.levels.back().v_max);
}

TEST_CASE("uniform bound study with boundary-driven solution") {
    ProblemSpec spec;
    spec.velocity = {constant_field(0.0), constant_field(0.0)};
    spec.reaction = constant_field(0.0);
    spec.source = constant_field(0.0);
    spec.dirichlet_value = [](double x, double) { return x; };
    auto mesh_for = [](int nx, int ny) {
        return build_rectangular_mesh(nx, ny, kUnit, all_dirichlet());
    };
    auto rep = verify_uniform_bound(spec, BFunction::scharfetter_gummel(), mesh_for,
                                    {{8, 8}, {16, 16}}, BoundConstants{});
    CHECK(rep.levels.back().v_max <= 1.0 + 1e-10);
    CHECK(rep.levels.back().v_min >= -1e-10);
    CHECK(rep.bounded);
}

TEST_CASE("energy cascade") {
    SUBCASE("all levels trivial below the first threshold") {
        Mesh mesh = build_rectangular_mesh(4, 4, kUnit, all_dirichlet());
        ProblemSpec spec;
        spec.velocity = {constant_field(0.0), constant_field(0.0)};
        spec.reaction = constant_field(0.0);
        spec.source = constant_field(1.0);
        spec.dirichlet_value = constant_field(0.0);
        DiscreteData data;
        Norms norms;
        auto v = solve_on(mesh, spec, BFunction::upwind(), &data, &norms);
        auto rep = verify_energy_cascade(mesh, v, data, norms, BFunction::upwind(), 6,
                                         BoundConstants{});
        for (const auto& lev : rep.levels) {
            CHECK(lev.trivial);
            CHECK(lev.fundamental_holds);
        }
        CHECK(rep.calibrated_poincare_c == 0.0);
        CHECK(rep.calibrated_recursion_c == 0.0);
    }

    SUBCASE("calibrated constants make every audited level pass") {
        // exponential boundary layer with values well above the thresholds
        Mesh mesh = build_rectangular_mesh(16, 1, kUnit, dirichlet_left_right());
        ProblemSpec spec;
        spec.velocity = {constant_field(5.0), constant_field(0.0)};
        spec.reaction = constant_field(0.0);
        spec.source = constant_field(0.0);
        spec.dirichlet_value = [](double x, double) { return std::exp(5.0 * x); };
        auto B = BFunction::scharfetter_gummel();
        DiscreteData data;
        Norms norms;
        auto v = solve_on(mesh, spec, B, &data, &norms);
        BoundConstants c;
        c.xi = mesh.xi;
        auto first = verify_energy_cascade(mesh, v, data, norms, B, 8, c);
        REQUIRE(first.calibrated_poincare_c > 0.0);
        REQUIRE(std::isfinite(first.calibrated_recursion_c));

        c.poincare_c = first.calibrated_poincare_c * (1.0 + 1e-9);
        c.eta = first.calibrated_recursion_c * (1.0 + 1e-9);
        auto second = verify_energy_cascade(mesh, v, data, norms, B, 8, c);
        for (const auto& lev : second.levels) {
            if (lev.m < 2 || lev.trivial) continue;
            CHECK(lev.measure_holds);
            CHECK(lev.recursion_holds);
        }
    }
}
