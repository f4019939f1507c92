#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pdsolve/linops.hpp"
#include "pdsolve/rng.hpp"
#include "pdsolve/vec.hpp"

namespace pdsolve {

// In-place unnormalized Walsh-Hadamard transform, following the Sylvester
// recursion H_{2^j} = [[H, H], [H, -H]].  O(j 2^j) arithmetic; the caller
// applies the 2^{-j/2} normalization when an orthonormal transform is needed.
inline void fwht_in_place(Vec& u) {
    const std::size_t n = u.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fwht_in_place: length " + std::to_string(n) +
                                    " is not a power of two");
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t block = 0; block < n; block += h << 1) {
            for (std::size_t i = block; i < block + h; ++i) {
                const double a = u[i];
                const double b = u[i + h];
                u[i] = a + b;
                u[i + h] = a - b;
            }
        }
    }
}

// Randomized partial Walsh-Hadamard operator: q randomly chosen rows of the
// normalized transform W = 2^{-j/2} H_{2^j}, with the columns randomly
// permuted.  Since W is symmetric orthogonal and the column permutation is
// orthogonal, the operator has orthonormal rows: B B* = I_q, hence
// rho(B* B) = 1.  Row selection and the column permutation are drawn from a
// SeededRng recorded by its 64-bit seed, so instances are reproducible
// bit-for-bit across platforms.
class PartialWalshHadamardMap {
public:
    PartialWalshHadamardMap(std::size_t order_exp, std::vector<std::uint32_t> rows,
                            std::vector<std::uint32_t> col_perm, std::uint64_t seed = 0)
        : order_exp_(order_exp), rows_(std::move(rows)), col_perm_(std::move(col_perm)), seed_(seed) {
        if (order_exp_ > 30)
            throw std::invalid_argument("PartialWalshHadamardMap: transform order exponent too large");
        const std::size_t full = full_size();
        if (rows_.empty()) throw std::invalid_argument("PartialWalshHadamardMap: no rows selected");
        if (rows_.size() > full)
            throw std::invalid_argument("PartialWalshHadamardMap: more rows than the transform size");
        std::vector<bool> seen(full, false);
        for (auto r : rows_) {
            if (r >= full) throw std::invalid_argument("PartialWalshHadamardMap: row index out of range");
            if (seen[r]) throw std::invalid_argument("PartialWalshHadamardMap: duplicate row index");
            seen[r] = true;
        }
        if (col_perm_.size() != full)
            throw std::invalid_argument("PartialWalshHadamardMap: column permutation has wrong length");
        std::vector<bool> hit(full, false);
        for (auto c : col_perm_) {
            if (c >= full || hit[c])
                throw std::invalid_argument("PartialWalshHadamardMap: invalid column permutation");
            hit[c] = true;
        }
    }

    static PartialWalshHadamardMap randomized(std::size_t order_exp, std::size_t q,
                                              std::uint64_t seed) {
        if (order_exp > 30)
            throw std::invalid_argument("PartialWalshHadamardMap: transform order exponent too large");
        const auto full = static_cast<std::uint32_t>(std::size_t{1} << order_exp);
        if (q == 0 || q > full)
            throw std::invalid_argument("PartialWalshHadamardMap: row count must be in [1, 2^j]");
        SeededRng rng(seed);
        auto rows = rng.sample_without_replacement(full, static_cast<std::uint32_t>(q));
        auto perm = rng.permutation(full);
        return PartialWalshHadamardMap(order_exp, std::move(rows), std::move(perm), seed);
    }

    std::size_t order_exp() const { return order_exp_; }
    std::size_t full_size() const { return std::size_t{1} << order_exp_; }
    std::size_t row_count() const { return rows_.size(); }
    std::size_t in_dim() const { return full_size(); }
    std::size_t out_dim() const { return rows_.size(); }
    const std::vector<std::uint32_t>& rows() const { return rows_; }
    const std::vector<std::uint32_t>& col_perm() const { return col_perm_; }
    std::uint64_t seed() const { return seed_; }

    Vec forward(const Vec& x) const {
        check_dim("PartialWalshHadamardMap::forward", in_dim(), x.size());
        // Column c of B is column col_perm[c] of W, so scatter before the transform.
        Vec z(full_size(), 0.0);
        for (std::size_t c = 0; c < x.size(); ++c) z[col_perm_[c]] = x[c];
        fwht_in_place(z);
        const double scale = normalization();
        Vec out(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i) out[i] = scale * z[rows_[i]];
        return out;
    }

    Vec adjoint(const Vec& v) const {
        check_dim("PartialWalshHadamardMap::adjoint", out_dim(), v.size());
        Vec z(full_size(), 0.0);
        for (std::size_t i = 0; i < rows_.size(); ++i) z[rows_[i]] = v[i];
        fwht_in_place(z);  // W is symmetric
        const double scale = normalization();
        Vec out(full_size());
        for (std::size_t c = 0; c < out.size(); ++c) out[c] = scale * z[col_perm_[c]];
        return out;
    }

    LinearMap map() const {
        auto self = std::make_shared<const PartialWalshHadamardMap>(*this);
        return LinearMap(
            in_dim(), out_dim(), [self](const Vec& x) { return self->forward(x); },
            [self](const Vec& v) { return self->adjoint(v); }, 1.0);
    }

private:
    double normalization() const { return std::pow(2.0, -0.5 * static_cast<double>(order_exp_)); }

    std::size_t order_exp_;
    std::vector<std::uint32_t> rows_;
    std::vector<std::uint32_t> col_perm_;
    std::uint64_t seed_;
};

}  // namespace pdsolve
