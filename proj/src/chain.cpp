#include "excitrans/chain.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace excitrans {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double ChainSpec::coupling(int k) const {
    if (k < 0 || k >= N) {
        throw std::out_of_range("ChainSpec::coupling: index " + std::to_string(k) + " outside cavity region");
    }
    return g_per_site.empty() ? g : g_per_site[static_cast<std::size_t>(k)];
}

double ChainSpec::collective_coupling() const {
    if (g_per_site.empty()) {
        return std::abs(g) * std::sqrt(static_cast<double>(N));
    }
    const double sum_sq = std::inner_product(g_per_site.begin(), g_per_site.end(), g_per_site.begin(), 0.0);
    return std::sqrt(sum_sq);
}

void ChainSpec::validate() const {
    if (N < 1) {
        throw std::invalid_argument("ChainSpec: N must be >= 1 (got " + std::to_string(N) + ")");
    }
    if (M < 0) {
        throw std::invalid_argument("ChainSpec: M must be >= 0 (got " + std::to_string(M) + ")");
    }
    if (!g_per_site.empty() && static_cast<int>(g_per_site.size()) != N) {
        throw std::invalid_argument("ChainSpec: g_per_site has length " + std::to_string(g_per_site.size()) +
                                    ", expected N = " + std::to_string(N));
    }
    if (boundary == Boundary::Periodic && (M != 0 || N < 3)) {
        throw std::invalid_argument("ChainSpec: periodic boundary requires M = 0 and N >= 3");
    }
    std::visit(overloaded{
                   [](const NoDisorder&) {},
                   [](const TunnelingGaussian& d) {
                       if (!(d.deltaJ >= 0.0)) throw std::invalid_argument("ChainSpec: deltaJ must be >= 0");
                   },
                   [](const Positional& d) {
                       if (!(d.sigma_frac >= 0.0)) throw std::invalid_argument("ChainSpec: sigma_frac must be >= 0");
                   },
               },
               disorder.kind);
    std::visit(overloaded{
                   [](const NearestNeighbor&) {},
                   [](const DipolarLongRange&) {},
                   [](const AllToAll&) {},
                   [](const EffectiveCavity& e) {
                       if (!(e.kappa > 0.0)) throw std::invalid_argument("ChainSpec: effective cavity needs kappa > 0");
                   },
               },
               hopping);
}

std::string hopping_name(const HoppingModel& model) {
    return std::visit(overloaded{
                          [](const NearestNeighbor&) { return std::string("nearest_neighbor"); },
                          [](const DipolarLongRange& d) {
                              return std::string(d.nearest_only ? "dipolar_nn" : "dipolar_lr");
                          },
                          [](const AllToAll&) { return std::string("all_to_all"); },
                          [](const EffectiveCavity&) { return std::string("effective_cavity"); },
                      },
                      model);
}

std::string disorder_name(const DisorderKind& kind) {
    return std::visit(overloaded{
                          [](const NoDisorder&) { return std::string("none"); },
                          [](const TunnelingGaussian&) { return std::string("tunneling"); },
                          [](const Positional&) { return std::string("positional"); },
                      },
                      kind);
}

int lead_hopping_sign(const HoppingModel& model) noexcept {
    if (const auto* dipolar = std::get_if<DipolarLongRange>(&model)) return dipolar->Jbar < 0.0 ? -1 : +1;
    return -1;
}

}  // namespace excitrans
