#include "latentflow/random.hpp"

#include <cmath>

#include "latentflow/hash.hpp"

namespace latentflow {

double Rng::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::size_t Rng::index(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = next();
        if (r >= threshold) {
            return static_cast<std::size_t>(r % bound);
        }
    }
}

double Rng::normal() {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    double u = 0.0, v = 0.0, s = 0.0;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    return u * scale;
}

double Rng::exponential(double mean) {
    // 1 - uniform() lies in (0, 1]
    return -mean * std::log(1.0 - uniform());
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ fmix64(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace latentflow
