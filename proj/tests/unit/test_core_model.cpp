#include <doctest.h>

#include "excitrans/disorder.hpp"
#include "excitrans/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

using namespace excitrans;

namespace {

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double std_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (v.size() - 1));
}

ChainSpec random_spec(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> sites(1, 12);
    std::uniform_int_distribution<int> leads(0, 6);
    std::uniform_real_distribution<double> energy(-3.0, 3.0);
    std::uniform_int_distribution<int> model(0, 3);
    ChainSpec spec;
    spec.N = sites(rng);
    spec.M = leads(rng);
    spec.omega0 = energy(rng);
    spec.omega = energy(rng);
    spec.Jprime = std::abs(energy(rng)) + 0.1;
    spec.g = energy(rng);
    spec.disorder.seed = rng();
    switch (model(rng)) {
        case 0: spec.disorder.kind = TunnelingGaussian{0.3}; break;
        case 1:
            spec.hopping = DipolarLongRange{1.0, false};
            spec.disorder.kind = Positional{0.05};
            break;
        case 2:
            spec.hopping = AllToAll{0.7};
            spec.g = 0.0;
            break;
        default:
            spec.g_per_site.resize(static_cast<std::size_t>(spec.N));
            for (double& gi : spec.g_per_site) gi = energy(rng);
            break;
    }
    return spec;
}

}  // namespace

TEST_CASE("site energies place omega0 on the cavity region") {
    ChainSpec homogeneous;
    homogeneous.M = 0;
    homogeneous.N = 3;
    CHECK(build_site_energies(homogeneous) == std::vector<double>{0.0, 0.0, 0.0});

    ChainSpec offset;
    offset.M = 1;
    offset.N = 2;
    set_detuning(offset, 2.5);
    CHECK(build_site_energies(offset) == std::vector<double>{2.5, 0.0, 0.0, 2.5});

    ChainSpec leads;
    leads.M = 20;
    leads.N = 50;
    set_detuning(leads, 69.0);
    const auto e = build_site_energies(leads);
    REQUIRE(e.size() == 90);
    for (int i = 0; i < 90; ++i) {
        CHECK(e[static_cast<std::size_t>(i)] == (leads.in_cavity_region(i) ? 0.0 : 69.0));
    }
}

TEST_CASE("tunnelings follow the entrance/exit boundary rule") {
    ChainSpec clean;
    clean.M = 0;
    clean.N = 6;
    CHECK(sample_tunnelings(clean) == std::vector<double>(5, 1.0));

    ChainSpec boundary;
    boundary.M = 2;
    boundary.N = 3;
    boundary.Jprime = 10.0;
    CHECK(sample_tunnelings(boundary) == std::vector<double>{1, 10, 1, 1, 10, 1});

    SUBCASE("disorder leaves J' bonds untouched") {
        boundary.disorder = {TunnelingGaussian{0.2}, 99};
        const auto bonds = sample_tunnelings(boundary);
        CHECK(bonds[1] == 10.0);
        CHECK(bonds[4] == 10.0);
        CHECK(bonds[0] != 1.0);
    }
}

TEST_CASE("tunneling disorder has the requested normal statistics") {
    ChainSpec spec;
    spec.M = 0;
    spec.N = 100001;
    spec.disorder = {TunnelingGaussian{0.2}, 12345};
    const auto bonds = sample_tunnelings(spec);
    REQUIRE(bonds.size() == 100000);
    CHECK(std::abs(mean_of(bonds) - 1.0) < 0.01);
    CHECK(std::abs(std_of(bonds) - 0.2) < 0.01);
}

TEST_CASE("growing chains share the disorder prefix of one seed") {
    ChainSpec small;
    small.N = 10;
    small.disorder = {TunnelingGaussian{0.2}, 7};
    ChainSpec large = small;
    large.N = 40;
    const auto a = sample_tunnelings(small);
    const auto b = sample_tunnelings(large);
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
}

TEST_CASE("positions are exact without disorder and Gaussian with it") {
    ChainSpec spec;
    spec.N = 12;
    spec.hopping = DipolarLongRange{};
    const auto exact = sample_positions(spec);
    for (std::size_t i = 0; i < exact.size(); ++i) CHECK(exact[i] == static_cast<double>(i));

    spec.N = 100000;
    spec.M = 20;
    spec.disorder = {Positional{0.05}, 2024};
    const auto x = sample_positions(spec);
    std::vector<double> displacement;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - static_cast<double>(i);
        if (spec.in_cavity_region(static_cast<int>(i))) {
            displacement.push_back(d);
        } else {
            CHECK(d == 0.0);  // leads stay on the lattice
        }
    }
    CHECK(displacement.size() == 100000);
    CHECK(std::abs(std_of(displacement) - 0.05) < 0.001);
    CHECK(sample_positions(spec) == x);
}

TEST_CASE("single spin in a resonant cavity forms the +-g doublet") {
    ChainSpec spec;
    spec.N = 1;
    spec.g = 1.0;
    const auto ev = symmetric_eigenvalues(build_hamiltonian(spec).dense());
    REQUIRE(ev.size() == 2);
    CHECK(ev(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(ev(1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("collective coupling gives polaritons at +-g sqrt(N) and N-1 dark states") {
    ChainSpec spec;
    spec.N = 4;
    spec.J = 0.0;
    spec.g = 1.0;
    const auto ev = symmetric_eigenvalues(build_hamiltonian(spec).dense());
    REQUIRE(ev.size() == 5);
    CHECK(ev(0) == doctest::Approx(-2.0).epsilon(1e-13));
    CHECK(ev(4) == doctest::Approx(2.0).epsilon(1e-13));
    for (int k = 1; k <= 3; ++k) CHECK(std::abs(ev(k)) < 1e-12);
}

TEST_CASE("all-to-all block has dominant eigenvalue N Jinf") {
    ChainSpec spec;
    spec.N = 3;
    spec.J = 0.0;
    spec.hopping = AllToAll{1.0};
    const auto ev = symmetric_eigenvalues(build_hamiltonian(spec).dense());
    CHECK(ev.maxCoeff() == doctest::Approx(3.0).epsilon(1e-13));

    SUBCASE("effective cavity uses 2 g^2 / kappa") {
        spec.hopping = EffectiveCavity{1.0, 4.0};
        const auto eff = symmetric_eigenvalues(build_hamiltonian(spec).dense());
        CHECK(eff.maxCoeff() == doctest::Approx(1.5).epsilon(1e-13));
    }
}

TEST_CASE("periodic homogeneous chain reproduces the cosine band") {
    ChainSpec spec;
    spec.N = 9;
    spec.omega0 = 0.3;
    spec.boundary = Boundary::Periodic;
    const Eigen::MatrixXd h = build_hamiltonian(spec).dense().topLeftCorner(9, 9);
    const auto ev = symmetric_eigenvalues(h);
    std::vector<double> expected;
    for (int k = 0; k < 9; ++k) expected.push_back(0.3 - 2.0 * std::cos(2.0 * std::numbers::pi * k / 9));
    std::sort(expected.begin(), expected.end());
    for (int k = 0; k < 9; ++k) CHECK(std::abs(ev(k) - expected[static_cast<std::size_t>(k)]) < 1e-12);
}

TEST_CASE("dipolar hopping uses Jbar / r^3 and scales the boundary bonds") {
    ChainSpec spec;
    spec.M = 2;
    spec.N = 2;
    spec.Jprime = 3.0;
    spec.hopping = DipolarLongRange{1.0, false};
    const Eigen::MatrixXd h = build_hamiltonian(spec).dense();
    CHECK(h(0, 1) == doctest::Approx(1.0));
    CHECK(h(0, 2) == doctest::Approx(1.0 / 8.0));
    CHECK(h(0, 3) == doctest::Approx(1.0 / 27.0));
    CHECK(h(1, 2) == doctest::Approx(3.0));  // entrance
    CHECK(h(3, 4) == doctest::Approx(3.0));  // exit

    spec.hopping = DipolarLongRange{1.0, true};
    const Eigen::MatrixXd nn = build_hamiltonian(spec).dense();
    CHECK(nn(0, 2) == 0.0);
    CHECK(nn(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("disorder kinds are model specific") {
    ChainSpec spec;
    spec.N = 4;
    spec.hopping = DipolarLongRange{};
    spec.disorder.kind = TunnelingGaussian{0.1};
    CHECK_THROWS_AS((void)build_hamiltonian(spec), std::invalid_argument);

    ChainSpec nn;
    nn.N = 4;
    nn.disorder.kind = Positional{0.1};
    CHECK_THROWS_AS((void)build_hamiltonian(nn), std::invalid_argument);

    ChainSpec bad;
    bad.N = 3;
    bad.g_per_site = {1.0, 2.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("property: every model is Hermitian, sector-preserving and seed-deterministic") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 200; ++trial) {
        const ChainSpec spec = random_spec(rng);
        const HamiltonianMatrix h = build_hamiltonian(spec);
        CHECK(h.hermiticity_defect() < 1e-12);
        CHECK(h.dim() == spec.sector_dim());

        // The photon couples only to cavity-region sites, with g_i.
        const Eigen::MatrixXd dense = h.dense();
        const int c = spec.cavity_index();
        CHECK(dense(c, c) == spec.cavity_energy());
        for (int i = 0; i < spec.total_sites(); ++i) {
            const bool coupled_model = std::holds_alternative<NearestNeighbor>(spec.hopping) ||
                                       std::holds_alternative<DipolarLongRange>(spec.hopping);
            const double expected =
                spec.in_cavity_region(i) && coupled_model ? spec.coupling(i - spec.M) : 0.0;
            CHECK(dense(i, c) == expected);
        }

        const HamiltonianMatrix again = build_hamiltonian(spec);
        CHECK((again.dense() - dense).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("property: g = 0 decouples the photon and leaves the bare chain spectrum") {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 50; ++trial) {
        ChainSpec spec = random_spec(rng);
        spec.g = 0.0;
        spec.g_per_site.clear();
        const Eigen::MatrixXd full = build_hamiltonian(spec).dense();
        const int s = spec.total_sites();
        const auto chain = symmetric_eigenvalues(full.topLeftCorner(s, s));
        auto all = symmetric_eigenvalues(full);
        std::vector<double> rest(all.data(), all.data() + all.size());
        // Remove the photon eigenvalue omega_c.
        const auto it = std::min_element(rest.begin(), rest.end(), [&](double a, double b) {
            return std::abs(a - spec.cavity_energy()) < std::abs(b - spec.cavity_energy());
        });
        rest.erase(it);
        for (int k = 0; k < s; ++k) CHECK(std::abs(rest[static_cast<std::size_t>(k)] - chain(k)) < 1e-12);
    }
}
