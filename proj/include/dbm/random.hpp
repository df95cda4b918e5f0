#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dbm/ratmat.hpp"

namespace dbm {

/// Seeded generator with platform-independent draws (raw engine output, no std distributions).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform integer in [lo, hi].
    long integer(long lo, long hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<long>(eng_() % span);
    }
    /// Uniform double in [0, 1).
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    GaussRational gaussian_int(long bound) { return {mpq_class(integer(-bound, bound)), mpq_class(integer(-bound, bound))}; }

    QPoly poly(int degree, long bound) {
        std::vector<GaussRational> c;
        for (int k = 0; k <= degree; ++k) c.push_back(gaussian_int(bound));
        while (c.back().is_zero()) c.back() = gaussian_int(bound);
        return QPoly(std::move(c));
    }

    QRat rational(int num_degree, int den_degree, long bound) {
        QPoly den = poly(den_degree, bound);
        return {poly(num_degree, bound), den};
    }

    QRatMat ratmat(std::size_t rows, std::size_t cols, int num_degree, int den_degree, long bound) {
        QRatMat m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = rational(num_degree, den_degree, bound);
        return m;
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

}  // namespace dbm
