#include "pfw/sampling.hpp"

namespace pfw {

Polynomial random_polynomial(const std::vector<std::string>& vars, int max_degree,
                             int terms, SplitMix64& rng) {
    std::vector<std::pair<Polynomial::Exponents, Rational>> built;
    for (int t = 0; t < terms; ++t) {
        Polynomial::Exponents e(vars.size(), 0);
        int budget = static_cast<int>(rng.uniform_int(0, max_degree));
        for (int d = 0; d < budget; ++d) {
            if (vars.empty()) break;
            e[static_cast<size_t>(rng.uniform_int(0, static_cast<long long>(vars.size()) - 1))]++;
        }
        built.emplace_back(std::move(e), rng.rational());
    }
    return Polynomial::from_terms(vars, built);
}

}  // namespace pfw
