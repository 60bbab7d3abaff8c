#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "metagrav/propagator.hpp"

using namespace metagrav;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double position_std(const Field1D& psi) {
    const auto& g = psi.grid();
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < g.points(); ++i) {
        const double p = std::norm(psi(i));
        const double x = g.coord(i);
        m0 += p;
        m1 += p * x;
        m2 += p * x * x;
    }
    const double mean = m1 / m0;
    return std::sqrt(m2 / m0 - mean * mean);
}

double max_diff(const Field2D& a, const Field2D& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    return worst;
}

} // namespace

TEST_CASE("Grid: layout and validation", "[grid]") {
    const Grid g(10.0, 16);
    CHECK(g.spacing() == 0.625);
    CHECK(g.coord(8) == 0.0);
    CHECK(g.coord(0) == -5.0);
    CHECK(g.mirror(0) == 0);
    CHECK(g.mirror(3) == 13);
    CHECK(g.coord(g.mirror(3)) == -g.coord(3));
    CHECK_THAT(g.wavenumber(1), WithinRel(2.0 * std::numbers::pi / 10.0, 1e-15));
    CHECK(g.wavenumber(15) == -g.wavenumber(1));
    CHECK_THROWS_AS(Grid(10.0, 12), DomainError);
    CHECK_THROWS_AS(Grid(10.0, 4), DomainError);
    CHECK_THROWS_AS(Grid(-1.0, 16), DomainError);
}

TEST_CASE("FftPlan: round trip and derivative", "[fft]") {
    const Grid g(2.0 * std::numbers::pi, 64);
    auto f = sample(g, [](double x) { return cplx(std::sin(3.0 * x), std::cos(x)); });
    const auto orig = f;
    FftPlan<1> plan(64);
    plan.forward(f.data());
    plan.inverse(f.data());
    for (std::size_t i = 0; i < 64; ++i) CHECK(std::abs(f(i) - orig(i)) < 1e-14);

    // -d^2/dx^2 sin(3x) = 9 sin(3x) through the kinetic symbol with c = 1.
    Hamiltonian<1> h(g, std::vector<double>(64, 0.0), 1.0);
    const auto s = sample(g, [](double x) { return cplx(std::sin(3.0 * x)); });
    const auto ts = h.apply(s);
    for (std::size_t i = 0; i < 64; ++i) CHECK(std::abs(ts(i) - 9.0 * s(i)) < 1e-12);
}

TEST_CASE("Hamiltonian: input validation", "[propagator]") {
    const Grid g(10.0, 16);
    CHECK_THROWS_AS(Hamiltonian<1>(g, std::vector<double>(8, 0.0), 1.0), DataError);
    CHECK_THROWS_AS(Hamiltonian<1>(g, std::vector<double>(16, 0.0), 0.0), DomainError);
    std::vector<double> bad(16, 0.0);
    bad[3] = std::nan("");
    CHECK_THROWS_AS(Hamiltonian<1>(g, bad, 1.0), DataError);
    Hamiltonian<1> h(g, std::vector<double>(16, 0.0), 1.0);
    CHECK_THROWS_AS(h.energy(Field1D(Grid(10.0, 32))), DataError);
}

TEST_CASE("split step: dt limit and configuration", "[propagator]") {
    const Grid g(100.0, 256);
    auto h = meta_hamiltonian(g, 25.0);
    const double limit = std::numbers::pi / h->max_kinetic();
    PropagatorConfig ok;
    ok.dt = 0.99 * limit;
    CHECK_NOTHROW(SplitStepPropagator<2>(h, ok));
    PropagatorConfig bad;
    bad.dt = 1.01 * limit;
    CHECK_THROWS_AS(SplitStepPropagator<2>(h, bad), ConfigError);
    PropagatorConfig neg;
    neg.dt = -0.1;
    CHECK_THROWS_AS(SplitStepPropagator<2>(h, neg), ConfigError);
    PropagatorConfig wide;
    wide.mask_width = 0.25;
    CHECK_THROWS_AS(SplitStepPropagator<2>(h, wide), ConfigError);
    CHECK_THAT(stable_dt(*h) * h->max_kinetic(), WithinRel(std::numbers::pi / 4.0, 1e-14));
    CHECK_THROWS_AS(meta_hamiltonian(g, 0.0), DomainError);
}

TEST_CASE("split step: free Gaussian spreading", "[propagator][analytic]") {
    // i psi_t = -c psi'' with psi(x, 0) ~ exp(-x^2 / (2 a^2)):
    // sigma(t) = (a / sqrt 2) sqrt(1 + (2 c t / a^2)^2), doubling at t = sqrt(3) a^2 / (2 c).
    const double a = 2.0, c = 0.5;
    const Grid g(160.0, 2048);
    auto h = std::make_shared<Hamiltonian<1>>(g, std::vector<double>(g.points(), 0.0), c);
    PropagatorConfig cfg;
    const double t_double = std::sqrt(3.0) * a * a / (2.0 * c);
    const auto steps = static_cast<std::size_t>(std::lround(t_double / 0.002));
    cfg.dt = t_double / static_cast<double>(steps);
    SplitStepPropagator<1> prop(h, cfg);
    auto psi = sample(g, [&](double x) { return cplx(std::exp(-x * x / (2.0 * a * a))); });
    psi.normalize();
    const double sigma0 = a / std::numbers::sqrt2;
    CHECK_THAT(position_std(psi), WithinRel(sigma0, 1e-12));
    prop.advance(psi, steps);
    const double r = 2.0 * c * t_double / (a * a);
    const double expected = sigma0 * std::sqrt(1.0 + r * r);
    CHECK_THAT(expected, WithinRel(2.0 * sigma0, 1e-14));
    CHECK_THAT(position_std(psi), WithinRel(expected, 1e-4));
    CHECK_THAT(psi.norm2(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("split step: harmonic coherent state returns after one period", "[propagator][analytic]") {
    // c = 1/2, V = x^2/2: unit frequency, period 2 pi.
    const Grid g(40.0, 512);
    auto h = std::make_shared<Hamiltonian<1>>(g, line_potential(g, [](double x) { return 0.5 * x * x; }), 0.5);
    PropagatorConfig cfg;
    const std::size_t steps = 4000;
    cfg.dt = 2.0 * std::numbers::pi / steps;
    SplitStepPropagator<1> prop(h, cfg);
    auto psi0 = sample(g, [](double x) { return cplx(std::exp(-0.5 * (x - 3.0) * (x - 3.0))); });
    psi0.normalize();
    auto psi = psi0;
    prop.advance(psi, steps / 2);
    // Half a period later the packet sits at -3.
    CHECK(fidelity(psi, sample(g, [](double x) { return cplx(std::exp(-0.5 * (x + 3.0) * (x + 3.0))); })) > 0.999);
    prop.advance(psi, steps / 2);
    CHECK(fidelity(psi, psi0) > 0.999);
}

TEST_CASE("split step: time reversal", "[propagator]") {
    const Grid g(100.0, 64);
    auto h = meta_hamiltonian(g, 25.0);
    PropagatorConfig cfg;
    cfg.dt = 0.05;
    SplitStepPropagator<2> fwd(h, cfg);
    const auto back = fwd.reversed();
    CHECK(back.dt() == -0.05);
    const auto xi0 = init_gaussian_meta(10.0, g);
    auto xi = xi0;
    fwd.advance(xi, 200);
    CHECK(max_diff(xi, xi0) > 1e-3);
    back.advance(xi, 200);
    CHECK(max_diff(xi, xi0) < 1e-10);
}

TEST_CASE("split step: norm and energy conservation, swap symmetry", "[propagator][conservation]") {
    const Grid g(100.0, 128);
    auto h = meta_hamiltonian(g, 25.0);
    PropagatorConfig cfg;
    cfg.dt = 0.01;
    SplitStepPropagator<2> prop(h, cfg);
    auto xi = init_gaussian_meta(10.0, g);
    CHECK_THAT(xi.norm2(), WithinAbs(1.0, 1e-12));
    CHECK(swap_asymmetry(xi) == 0.0);
    const double e0 = h->energy(xi).expect;
    CHECK(e0 < 0.0);
    double worst_e = 0.0, worst_n = 0.0, worst_swap = 0.0;
    for (int block = 0; block < 20; ++block) {
        prop.advance(xi, 100);
        worst_e = std::max(worst_e, std::abs(h->energy(xi).expect / e0 - 1.0));
        worst_n = std::max(worst_n, std::abs(xi.norm2() - 1.0));
        worst_swap = std::max(worst_swap, swap_asymmetry(xi));
    }
    CHECK(worst_n < 1e-10);
    CHECK(worst_e < 1e-6);
    CHECK(worst_swap < 1e-10);
}

TEST_CASE("split step: 1D norm and energy over 1e4 steps", "[propagator][conservation]") {
    const Grid g(200.0, 512);
    auto h = relative_hamiltonian(g, 25.0);
    PropagatorConfig cfg;
    cfg.dt = 0.01;
    SplitStepPropagator<1> prop(h, cfg);
    auto psi = sample(g, [](double x) { return cplx(std::exp(-x * x / 200.0)); });
    psi.normalize();
    const double e0 = h->energy(psi).expect;
    double worst_e = 0.0;
    for (int block = 0; block < 100; ++block) {
        prop.advance(psi, 100);
        worst_e = std::max(worst_e, std::abs(h->energy(psi).expect / e0 - 1.0));
    }
    CHECK(std::abs(psi.norm2() - 1.0) < 1e-10);
    CHECK(worst_e < 1e-6);
}

TEST_CASE("split step: energy error is second order in dt", "[propagator]") {
    // The Strang error in <H> after a fixed time shrinks ~4x when dt halves.
    const Grid g(200.0, 512);
    auto h = relative_hamiltonian(g, 25.0);
    auto run = [&](double dt) {
        PropagatorConfig cfg;
        cfg.dt = dt;
        SplitStepPropagator<1> prop(h, cfg);
        auto psi = sample(g, [](double x) { return cplx(std::exp(-x * x / 200.0)); });
        psi.normalize();
        const double e0 = h->energy(psi).expect;
        double worst = 0.0;
        const auto steps = static_cast<std::size_t>(std::lround(20.0 / dt));
        for (std::size_t s = 0; s < steps; s += steps / 40) {
            prop.advance(psi, steps / 40);
            worst = std::max(worst, std::abs(h->energy(psi).expect - e0));
        }
        return worst;
    };
    const double coarse = run(0.2);
    const double fine = run(0.1);
    CHECK(coarse / fine > 3.0);
    CHECK(coarse / fine < 5.0);
}

TEST_CASE("absorbing mask removes norm at the edges only", "[propagator]") {
    const Grid g(40.0, 256);
    const auto m = absorbing_mask(g, 0.1, 0.5);
    CHECK(m[g.points() / 2] == 1.0);
    CHECK_THAT(m[0], WithinAbs(0.5, 1e-12));
    for (double x : m) {
        CHECK(x <= 1.0);
        CHECK(x >= 0.5);
    }
    // A packet heading into the edge loses norm with the mask on, none with it off.
    auto h = std::make_shared<Hamiltonian<1>>(g, std::vector<double>(g.points(), 0.0), 0.5);
    auto packet = sample(g, [](double x) { return std::exp(-x * x / 2.0) * std::polar(1.0, 5.0 * x); });
    packet.normalize();
    PropagatorConfig off;
    off.dt = 0.01;
    PropagatorConfig on = off;
    on.mask_width = 0.1;
    on.mask_strength = 0.05;
    auto a = packet, b = packet;
    SplitStepPropagator<1>(h, off).advance(a, 500);
    SplitStepPropagator<1>(h, on).advance(b, 500);
    CHECK_THAT(a.norm2(), WithinAbs(1.0, 1e-12));
    CHECK(b.norm2() < 0.5);
}

TEST_CASE("init_gaussian_meta", "[propagator]") {
    const Grid g(100.0, 128);
    const auto xi = init_gaussian_meta(10.0, g);
    CHECK_THAT(xi.norm2(), WithinAbs(1.0, 1e-12));
    CHECK(swap_asymmetry(xi) == 0.0);
    // Equal to the rotated form exp(-(x-y)^2 / 2 l^2) exp(-(x+y)^2 / 2 l^2).
    auto rotated = sample2d(g, [](double x, double y) {
        return cplx(std::exp(-(x - y) * (x - y) / 200.0) * std::exp(-(x + y) * (x + y) / 200.0));
    });
    CHECK(fidelity(xi, rotated) > 1.0 - 1e-12);
    CHECK_THROWS_AS(init_gaussian_meta(12.5, g), DomainError);
    CHECK_THROWS_AS(init_gaussian_meta(0.0, g), DomainError);
}

TEST_CASE("energy of the Gaussian meta-state", "[propagator][reduction]") {
    const double kappa = 25.0, lambda0 = 10.0;
    const Grid g(100.0, 128);
    const auto xi = init_gaussian_meta(lambda0, g);
    // Gravity on: negative.
    CHECK(meta_hamiltonian(g, kappa)->energy(xi).expect < 0.0);
    // Gravity off: only kinetic, 1/(kappa lambda0^2).
    auto free = meta_hamiltonian(g, kappa, [](double) { return 0.0; });
    const auto e = free->energy(xi);
    CHECK(e.potential == 0.0);
    CHECK_THAT(e.expect, WithinRel(1.0 / (kappa * lambda0 * lambda0), 1e-10));
}
