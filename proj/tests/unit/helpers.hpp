#pragma once

#include <cmath>
#include <cstdint>

#include "prdm/ensembles.hpp"
#include "prdm/qcore.hpp"
#include "prdm/rng.hpp"

namespace testing {

inline prdm::qcore::DensityMatrix random_mixed(int n, int m, std::uint64_t stream, std::uint64_t seed = 99) {
    return prdm::ensembles::sample_ghse(prdm::ensembles::GhseParams(n, m), prdm::RngSeed{seed, stream});
}

inline prdm::qcore::PureState random_pure(int n, std::uint64_t stream, std::uint64_t seed = 77) {
    return prdm::ensembles::sample_haar_state(n, prdm::RngSeed{seed, stream});
}

inline prdm::qcore::PureState t_state() {
    prdm::qcore::ComplexVector v(2);
    v << 1.0, std::polar(1.0, std::acos(-1.0) / 4.0);
    return prdm::qcore::PureState::normalized(1, v);
}

inline prdm::qcore::PureState bell_pair() {
    prdm::qcore::ComplexVector v = prdm::qcore::ComplexVector::Zero(4);
    v(0) = 1.0;
    v(3) = 1.0;
    return prdm::qcore::PureState::normalized(2, v);
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

template <class Vec>
MeanSe mean_se(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x;
    const double n = static_cast<double>(v.size());
    const double mean = s / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace testing
