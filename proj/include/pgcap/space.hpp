#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "pgcap/check.hpp"
#include "pgcap/field.hpp"

namespace pgcap {

using PointIndex = std::uint64_t;

// Number of points of PG(N,q): (q^{N+1} - 1)/(q - 1) = q^N + ... + q + 1.
// Overflow past the 64-bit unsigned range throws.
inline std::uint64_t theta(unsigned n, std::uint64_t q) {
    if (n < 1 || q < 2) throw std::invalid_argument("theta needs N >= 1, q >= 2");
    std::uint64_t acc = 1;
    for (unsigned i = 0; i < n; ++i) {
        if (acc > (std::numeric_limits<std::uint64_t>::max() - 1) / q)
            throw std::overflow_error("theta exceeds 64-bit range");
        acc = acc * q + 1;
    }
    return acc;
}

// Canonical enumeration of PG(N,q). Points are homogeneous coordinate
// vectors of length N+1, normalized so the first nonzero coordinate is 1;
// the index orders them by (position of first nonzero coordinate, then the
// base-q value of the trailing coordinates). Immutable and shareable.
class Space {
public:
    Space(unsigned n, Field field) : n_(n), f_(std::move(field)) {
        if (n_ < 2) throw std::invalid_argument("projective dimension must be >= 2");
        const std::uint64_t q = f_.q();
        theta_ = theta(n_, q);
        theta_hyper_ = theta(n_ - 1, q);
        // cross-check the closed form against the Horner sum
        {
            unsigned __int128 pw = 1;
            bool fits = true;
            for (unsigned i = 0; i < n_ + 1 && fits; ++i) {
                if (pw > (~(unsigned __int128)0) / q) fits = false;
                else pw *= q;
            }
            if (fits)
                PGCAP_CHECK((pw - 1) / (q - 1) == theta_,
                            "theta evaluations disagree");
        }

        q_pow_.assign(n_ + 1, 1);
        for (unsigned i = 1; i <= n_; ++i) q_pow_[i] = q_pow_[i - 1] * q;

        block_offset_.assign(n_ + 2, 0);
        for (unsigned j = 0; j <= n_; ++j)
            block_offset_[j + 1] = block_offset_[j] + q_pow_[n_ - j];
        PGCAP_CHECK(block_offset_[n_ + 1] == theta_, "block layout mismatch");

        build_coord_table();
    }

    unsigned dim() const { return n_; }
    const Field& field() const { return f_; }
    std::uint64_t num_points() const { return theta_; }       // theta_{N,q}
    std::uint64_t theta_hyper() const { return theta_hyper_; }  // theta_{N-1,q}
    std::uint64_t q() const { return f_.q(); }

    // Coordinate row of a point, length N+1.
    const std::uint16_t* coords_raw(PointIndex i) const {
        return coords_.data() + std::size_t(i) * (n_ + 1);
    }

    std::vector<Fe> point_coords(PointIndex i) const {
        if (i >= theta_) throw std::out_of_range("point index out of range");
        const std::uint16_t* row = coords_raw(i);
        return std::vector<Fe>(row, row + n_ + 1);
    }

    // Canonical representative: first nonzero coordinate scaled to 1.
    std::vector<Fe> normalized(std::vector<Fe> c) const {
        if (c.size() != n_ + 1)
            throw std::invalid_argument("coordinate vector has wrong length");
        unsigned j = 0;
        while (j <= n_ && c[j] == 0) ++j;
        if (j > n_) throw std::invalid_argument("zero vector is not a point");
        if (c[j] != 1) {
            Fe s = f_.inv(c[j]);
            for (unsigned i = j; i <= n_; ++i) c[i] = f_.mul(c[i], s);
        }
        return c;
    }

    PointIndex point_to_index(std::span<const Fe> c) const {
        if (c.size() != n_ + 1)
            throw std::invalid_argument("coordinate vector has wrong length");
        unsigned j = 0;
        while (j <= n_ && c[j] == 0) ++j;
        if (j > n_) throw std::invalid_argument("zero vector is not a point");
        PointIndex idx = block_offset_[j];
        if (c[j] == 1) {
            for (unsigned i = j + 1; i <= n_; ++i)
                idx += std::uint64_t(c[i]) * q_pow_[n_ - i];
        } else {
            Fe s = f_.inv(c[j]);
            for (unsigned i = j + 1; i <= n_; ++i)
                idx += std::uint64_t(f_.mul(c[i], s)) * q_pow_[n_ - i];
        }
        return idx;
    }

    // The q+1 points of the line through distinct a and b, as {b} followed
    // by {a + t*b : t in GF(q)} in t order. Contains a (at t = 0) and b.
    std::vector<PointIndex> line_points(PointIndex a, PointIndex b) const {
        if (a == b) throw std::invalid_argument("line needs two distinct points");
        std::vector<PointIndex> out;
        out.reserve(f_.q() + 1);
        out.push_back(b);
        scan_line(coords_raw(a), coords_raw(b),
                  [&](PointIndex i) { out.push_back(i); });
        return out;
    }

    // Rank of the 3 x (N+1) coordinate matrix is <= 2 exactly when the three
    // (pairwise distinct) points lie on a common line.
    bool collinear(PointIndex a, PointIndex b, PointIndex c) const {
        if (a == b || b == c || a == c)
            throw std::invalid_argument("collinear needs distinct points");
        const unsigned cols = n_ + 1;
        std::vector<Fe> m(3 * cols);
        const PointIndex pts[3] = {a, b, c};
        for (unsigned r = 0; r < 3; ++r) {
            const std::uint16_t* row = coords_raw(pts[r]);
            for (unsigned i = 0; i < cols; ++i) m[r * cols + i] = row[i];
        }
        unsigned rank = 0;
        for (unsigned col = 0; col < cols && rank < 3; ++col) {
            unsigned pivot = rank;
            while (pivot < 3 && m[pivot * cols + col] == 0) ++pivot;
            if (pivot == 3) continue;
            for (unsigned i = 0; i < cols; ++i)
                std::swap(m[rank * cols + i], m[pivot * cols + i]);
            Fe s = f_.inv(m[rank * cols + col]);
            for (unsigned i = col; i < cols; ++i)
                m[rank * cols + i] = f_.mul(m[rank * cols + i], s);
            for (unsigned r = 0; r < 3; ++r) {
                if (r == rank) continue;
                Fe v = m[r * cols + col];
                if (!v) continue;
                for (unsigned i = col; i < cols; ++i)
                    m[r * cols + i] =
                        f_.sub(m[r * cols + i], f_.mul(v, m[rank * cols + i]));
            }
            ++rank;
        }
        return rank <= 2;
    }

    // Visits the q points {base + t*dir : t in GF(q)} of the line through
    // base and dir — i.e. every point of the line except dir itself.
    // Hot path of the coverage walks.
    template <class F>
    void scan_line(const std::uint16_t* base, const std::uint16_t* dir,
                   F&& visit) const {
        const std::uint32_t q = f_.q();
        const unsigned cols = n_ + 1;
        std::array<Fe, 33> y{};  // N+1 <= 33, enforced at construction
        for (Fe t = 0; t < q; ++t) {
            unsigned first = cols;
            for (unsigned i = 0; i < cols; ++i) {
                Fe v = f_.add(base[i], f_.mul(t, dir[i]));
                y[i] = v;
                if (v && first == cols) first = i;
            }
            PointIndex idx = block_offset_[first];
            if (y[first] == 1) {
                for (unsigned i = first + 1; i < cols; ++i)
                    idx += std::uint64_t(y[i]) * q_pow_[n_ - i];
            } else {
                Fe s = f_.inv(y[first]);
                for (unsigned i = first + 1; i < cols; ++i)
                    idx += std::uint64_t(f_.mul(y[i], s)) * q_pow_[n_ - i];
            }
            visit(idx);
        }
    }

    // Rough allocation footprint of a build at these parameters, for the
    // memory budget check (coordinate table, coverage bitsets, per-worker
    // sweep scratch).
    static std::uint64_t memory_estimate(unsigned n, std::uint64_t q,
                                         unsigned workers) {
        std::uint64_t th = theta(n, q);
        std::uint64_t coord_table = th * (n + 1) * 2;
        std::uint64_t bitsets = 3 * (th / 8 + 8);
        std::uint64_t sweep = std::uint64_t(workers) * (4 * th + th / 8 + 8);
        return coord_table + bitsets + sweep + (th + 1) * 4;
    }

private:
    void build_coord_table() {
        if (n_ + 1 > 33)
            throw std::invalid_argument("projective dimension too large");
        coords_.assign(std::size_t(theta_) * (n_ + 1), 0);
        const std::uint32_t q = f_.q();
        std::size_t pos = 0;
        for (unsigned j = 0; j <= n_; ++j) {
            const unsigned tail = n_ - j;  // free coordinates after the pivot
            std::vector<Fe> digits(tail, 0);
            const std::uint64_t block = q_pow_[tail];
            for (std::uint64_t r = 0; r < block; ++r) {
                for (unsigned i = 0; i < j; ++i) coords_[pos++] = 0;
                coords_[pos++] = 1;
                for (unsigned i = 0; i < tail; ++i)
                    coords_[pos++] = std::uint16_t(digits[i]);
                // increment the base-q counter, last digit least significant
                for (unsigned i = tail; i-- > 0;) {
                    if (++digits[i] < q) break;
                    digits[i] = 0;
                }
            }
        }
        PGCAP_CHECK(pos == coords_.size(), "coordinate table incomplete");
    }

    unsigned n_;
    Field f_;
    std::uint64_t theta_ = 0, theta_hyper_ = 0;
    std::vector<std::uint64_t> block_offset_, q_pow_;
    std::vector<std::uint16_t> coords_;
};

}  // namespace pgcap
