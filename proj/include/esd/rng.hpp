#ifndef ESD_RNG_HPP
#define ESD_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace esd {

// Seeded random stream. All transforms are stateless functions of the
// engine so the full stream state is the engine state alone; that keeps
// checkpoint/resume bit-exact.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed = 0) : engine_(seed) {}

    double uniform01() {
        // 53-bit mantissa uniform in [0,1)
        return (engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Open interval (-pi, pi); resamples the measure-zero endpoint.
    double uniform_phase() {
        double k;
        do {
            k = uniform(-M_PI, M_PI);
        } while (k <= -M_PI || k >= M_PI);
        return k;
    }

    double normal() {
        // Box-Muller, no cached spare
        double u1;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Cauchy(0, scale) by inverse CDF: x = scale * tan(pi*(u - 1/2)).
    double cauchy(double scale) {
        return scale * std::tan(M_PI * (uniform01() - 0.5));
    }

    // Marsaglia-Tsang; shape < 1 handled by the boost u^(1/shape) trick.
    double gamma(double shape) {
        if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
        if (shape < 1.0) {
            double u;
            do {
                u = uniform01();
            } while (u <= 0.0);
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // IG(shape, scale): X = scale / Gamma(shape, 1)
    double inv_gamma(double shape, double scale) {
        if (!(scale > 0.0)) throw std::invalid_argument("inv_gamma: scale must be > 0");
        return scale / gamma(shape);
    }

    std::string serialize() const {
        std::ostringstream os;
        os << engine_;
        return os.str();
    }

    void deserialize(const std::string& s) {
        std::istringstream is(s);
        is >> engine_;
        if (is.fail()) throw std::runtime_error("RngStream: bad serialized state");
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace esd

#endif
