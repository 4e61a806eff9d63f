#include "excitrans/disorder.hpp"

#include <random>
#include <stdexcept>

namespace excitrans {

std::uint64_t mix_seed(std::uint64_t seed, RandomStream stream) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(stream) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<double> sample_tunnelings(const ChainSpec& spec) {
    spec.validate();
    if (std::holds_alternative<DipolarLongRange>(spec.hopping)) {
        throw std::invalid_argument("sample_tunnelings: dipolar hopping is built from positions, not bonds");
    }
    const int sites = spec.total_sites();
    std::vector<double> bonds(static_cast<std::size_t>(sites > 0 ? sites - 1 : 0));

    double deltaJ = 0.0;
    if (const auto* d = std::get_if<TunnelingGaussian>(&spec.disorder.kind)) {
        deltaJ = d->deltaJ;
    }

    std::mt19937_64 engine(mix_seed(spec.disorder.seed, RandomStream::Tunneling));
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int b = 0; b + 1 < sites; ++b) {
        const bool inner = spec.in_cavity_region(b) && spec.in_cavity_region(b + 1);
        const double mean = inner ? spec.inner_hopping() : spec.J;
        // Draw even when deltaJ = 0 so every bond keeps its position in the stream.
        const double z = noise(engine);
        bonds[static_cast<std::size_t>(b)] = mean + deltaJ * z;
    }
    if (spec.M > 0) {
        bonds[static_cast<std::size_t>(spec.M - 1)] = spec.Jprime;
        bonds[static_cast<std::size_t>(spec.M + spec.N - 1)] = spec.Jprime;
    }
    return bonds;
}

std::vector<double> sample_positions(const ChainSpec& spec) {
    spec.validate();
    const int sites = spec.total_sites();
    std::vector<double> x(static_cast<std::size_t>(sites));

    double sigma = 0.0;
    if (const auto* d = std::get_if<Positional>(&spec.disorder.kind)) {
        sigma = d->sigma_frac;
    }
    std::mt19937_64 engine(mix_seed(spec.disorder.seed, RandomStream::Positions));
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int i = 0; i < sites; ++i) {
        const double z = noise(engine);
        const double shift = spec.in_cavity_region(i) ? sigma * z : 0.0;
        x[static_cast<std::size_t>(i)] = static_cast<double>(i) + shift;
    }
    return x;
}

}  // namespace excitrans
