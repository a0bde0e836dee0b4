#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pgcap/check.hpp"

namespace pgcap {

// Field element of GF(q), q = p^m, encoded as an integer in [0, q): the
// polynomial c_0 + c_1 x + ... + c_{m-1} x^{m-1} is stored as the base-p
// number with digits c_i. Prime fields therefore cost one modular op per
// multiply; extension fields go through log/antilog tables.
using Fe = std::uint32_t;

namespace gf_detail {

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline std::vector<std::uint64_t> distinct_prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

// Polynomials over GF(p): coefficient vectors, low-to-high degree,
// trailing zeros trimmed. Used only at field-construction time.
using Poly = std::vector<std::uint32_t>;

inline void poly_trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& mod,
                        std::uint32_t p) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = std::uint32_t((r[i + j] + std::uint64_t(a[i]) * b[j]) % p);
    }
    // reduce by the monic modulus
    const std::size_t md = mod.size() - 1;
    for (std::size_t i = r.size(); i-- > md;) {
        std::uint32_t c = r[i];
        if (!c) continue;
        r[i] = 0;
        for (std::size_t j = 0; j < md; ++j) {
            std::uint64_t sub = std::uint64_t(c) * mod[j] % p;
            r[i - md + j] = std::uint32_t((r[i - md + j] + p - sub) % p);
        }
    }
    r.resize(md);
    poly_trim(r);
    return r;
}

inline Poly poly_powmod(Poly base, std::uint64_t e, const Poly& mod,
                        std::uint32_t p) {
    Poly r{1};
    while (e) {
        if (e & 1) r = poly_mulmod(r, base, mod, p);
        base = poly_mulmod(base, base, mod, p);
        e >>= 1;
    }
    return r;
}

inline std::uint32_t inv_mod_p(std::uint32_t a, std::uint32_t p) {
    // Fermat; p prime, a != 0
    std::uint64_t r = 1, b = a, e = p - 2;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return std::uint32_t(r);
}

inline Poly poly_gcd(Poly a, Poly b, std::uint32_t p) {
    poly_trim(a);
    poly_trim(b);
    while (!b.empty()) {
        // a mod b, with b made monic on the fly
        std::uint32_t lead_inv = inv_mod_p(b.back(), p);
        while (a.size() >= b.size()) {
            std::uint32_t c =
                std::uint32_t(std::uint64_t(a.back()) * lead_inv % p);
            if (c) {
                std::size_t shift = a.size() - b.size();
                for (std::size_t j = 0; j < b.size(); ++j) {
                    std::uint64_t sub = std::uint64_t(c) * b[j] % p;
                    a[shift + j] =
                        std::uint32_t((a[shift + j] + p - sub) % p);
                }
            }
            a.pop_back();
            poly_trim(a);
            if (a.empty()) break;
        }
        std::swap(a, b);
    }
    return a;
}

// Rabin test: f (monic, degree m >= 1) is irreducible over GF(p) iff
// x^(p^m) = x (mod f) and gcd(x^(p^(m/r)) - x, f) = 1 for every prime r | m.
inline bool poly_irreducible(const Poly& f, std::uint32_t p) {
    const std::size_t m = f.size() - 1;
    if (m == 0) return false;
    if (m == 1) return true;
    const Poly x{0, 1};
    for (std::uint64_t r : distinct_prime_factors(m)) {
        Poly h = x;
        for (std::uint64_t i = 0; i < m / r; ++i)
            h = poly_powmod(h, p, f, p);  // h <- h^p
        // h - x
        Poly d = h;
        if (d.size() < 2) d.resize(2, 0);
        d[1] = std::uint32_t((d[1] + p - 1) % p);
        poly_trim(d);
        Poly g = poly_gcd(d, f, p);
        if (g.size() != 1) return false;
    }
    Poly h = x;
    for (std::size_t i = 0; i < m; ++i) h = poly_powmod(h, p, f, p);
    poly_trim(h);
    return h == x;
}

// Lexicographically smallest monic irreducibles (constant coefficient
// first) for every prime power p^m <= 1024, m >= 2. Beyond the table a
// deterministic search in the same order reproduces the choice.
inline const std::vector<std::uint32_t>* builtin_irreducible(std::uint32_t p,
                                                             std::uint32_t m) {
    struct Entry {
        std::uint32_t p, m;
        std::vector<std::uint32_t> c;
    };
    static const std::vector<Entry> table = {
        {2, 2, {1, 1, 1}},
        {2, 3, {1, 1, 0, 1}},
        {2, 4, {1, 1, 0, 0, 1}},
        {2, 5, {1, 0, 1, 0, 0, 1}},
        {2, 6, {1, 1, 0, 0, 0, 0, 1}},
        {2, 7, {1, 1, 0, 0, 0, 0, 0, 1}},
        {2, 8, {1, 1, 0, 1, 1, 0, 0, 0, 1}},
        {2, 9, {1, 1, 0, 0, 0, 0, 0, 0, 0, 1}},
        {2, 10, {1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1}},
        {3, 2, {1, 0, 1}},
        {3, 3, {1, 2, 0, 1}},
        {3, 4, {2, 1, 0, 0, 1}},
        {3, 5, {1, 2, 0, 0, 0, 1}},
        {3, 6, {2, 1, 0, 0, 0, 0, 1}},
        {5, 2, {2, 0, 1}},
        {5, 3, {1, 1, 0, 1}},
        {5, 4, {2, 0, 0, 0, 1}},
        {7, 2, {1, 0, 1}},
        {7, 3, {2, 0, 0, 1}},
        {11, 2, {1, 0, 1}},
        {13, 2, {2, 0, 1}},
        {17, 2, {3, 0, 1}},
        {19, 2, {1, 0, 1}},
        {23, 2, {1, 0, 1}},
        {29, 2, {2, 0, 1}},
        {31, 2, {1, 0, 1}},
    };
    for (const auto& e : table)
        if (e.p == p && e.m == m) return &e.c;
    return nullptr;
}

inline Poly search_irreducible(std::uint32_t p, std::uint32_t m,
                               std::uint64_t q) {
    for (std::uint64_t v = 0; v < q; ++v) {
        Poly f(m + 1, 0);
        std::uint64_t t = v;
        for (std::uint32_t i = 0; i < m; ++i) {
            f[i] = std::uint32_t(t % p);
            t /= p;
        }
        f[m] = 1;
        if (poly_irreducible(f, p)) return f;
    }
    throw std::logic_error("no irreducible polynomial found");  // unreachable
}

}  // namespace gf_detail

// Arithmetic carrier for GF(p^m). Immutable after construction; all
// operations are const and safe to share across threads.
class Field {
public:
    //  p prime, m >= 1, p^m <= 2^16. If m > 1 and no polynomial is supplied,
    //  a built-in table (p^m <= 1024) or a deterministic lexicographic
    //  search provides one. A supplied polynomial must be monic of degree m
    //  and is rejected if reducible.
    static Field make(std::uint32_t p, std::uint32_t m,
                      std::vector<std::uint32_t> irreducible = {}) {
        if (m == 0) throw std::invalid_argument("extension degree m must be >= 1");
        if (!gf_detail::is_prime(p))
            throw std::invalid_argument("characteristic " + std::to_string(p) +
                                        " is not prime");
        std::uint64_t q = 1;
        for (std::uint32_t i = 0; i < m; ++i) {
            q *= p;
            if (q > 65536)
                throw std::invalid_argument("field order exceeds 2^16 cap");
        }

        Field f;
        f.p_ = p;
        f.m_ = m;
        f.q_ = std::uint32_t(q);

        if (m == 1) {
            if (!irreducible.empty() &&
                irreducible != std::vector<std::uint32_t>{0, 1})
                throw std::invalid_argument(
                    "prime field takes no custom polynomial");
            f.irr_ = {0, 1};  // plain x, degree 1
        } else if (!irreducible.empty()) {
            if (irreducible.size() != m + 1 || irreducible[m] != 1)
                throw std::invalid_argument(
                    "polynomial must be monic of degree m");
            for (std::uint32_t c : irreducible)
                if (c >= p)
                    throw std::invalid_argument(
                        "polynomial coefficient out of range");
            if (!gf_detail::poly_irreducible(irreducible, p))
                throw std::invalid_argument("supplied polynomial is reducible");
            f.irr_ = std::move(irreducible);
        } else if (const auto* t = gf_detail::builtin_irreducible(p, m)) {
            f.irr_ = *t;
        } else {
            f.irr_ = gf_detail::search_irreducible(p, m, q);
        }

        f.find_primitive();
        f.build_tables();
        return f;
    }

    std::uint32_t p() const { return p_; }
    std::uint32_t m() const { return m_; }
    std::uint32_t q() const { return q_; }
    const std::vector<std::uint32_t>& irreducible() const { return irr_; }
    Fe primitive_element() const { return primitive_; }

    Fe add(Fe a, Fe b) const {
        if (m_ == 1) {
            Fe s = a + b;
            return s >= q_ ? s - q_ : s;
        }
        if (p_ == 2) return a ^ b;
        if (!add_tab_.empty()) return add_tab_[std::size_t(a) * q_ + b];
        return add_slow(a, b);
    }

    Fe neg(Fe a) const {
        if (m_ == 1) return a ? q_ - a : 0;
        if (p_ == 2) return a;
        if (!neg_tab_.empty()) return neg_tab_[a];
        return neg_slow(a);
    }

    Fe sub(Fe a, Fe b) const { return add(a, neg(b)); }

    Fe mul(Fe a, Fe b) const {
        if (m_ == 1) return Fe(std::uint64_t(a) * b % q_);
        if (a == 0 || b == 0) return 0;
        return exp_[log_[a] + log_[b]];
    }

    // Log/antilog route, valid for any a, b (cross-checked against mul_poly).
    Fe mul_log(Fe a, Fe b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[log_[a] + log_[b]];
    }

    // Direct polynomial route: base-p digit vectors multiplied and reduced
    // by the defining polynomial. Slow; reference path only.
    Fe mul_poly(Fe a, Fe b) const {
        return encode(gf_detail::poly_mulmod(decode(a), decode(b), irr_, p_));
    }

    Fe inv(Fe a) const {
        if (a == 0) throw std::domain_error("inverse of zero field element");
        return inv_[a];
    }

    Fe pow(Fe a, std::uint64_t e) const {
        Fe r = 1;
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }

    // Multiplicative order; a != 0.
    std::uint64_t order(Fe a) const {
        if (a == 0) throw std::domain_error("order of zero");
        std::uint64_t n = q_ - 1;
        for (std::uint64_t r : gf_detail::distinct_prime_factors(n))
            while (n % r == 0 && pow(a, n / r) == 1) n /= r;
        return n;
    }

    std::vector<std::uint32_t> decode(Fe a) const {
        std::vector<std::uint32_t> c(m_, 0);
        for (std::uint32_t i = 0; i < m_ && a; ++i) {
            c[i] = a % p_;
            a /= p_;
        }
        gf_detail::poly_trim(c);
        return c;
    }

    Fe encode(const std::vector<std::uint32_t>& c) const {
        Fe v = 0;
        for (std::size_t i = c.size(); i-- > 0;) v = Fe(v * p_ + c[i]);
        return v;
    }

private:
    Field() = default;

    Fe mul_raw(Fe a, Fe b) const {  // table-free; used while building tables
        if (m_ == 1) return Fe(std::uint64_t(a) * b % q_);
        return encode(gf_detail::poly_mulmod(decode(a), decode(b), irr_, p_));
    }

    Fe pow_raw(Fe a, std::uint64_t e) const {
        Fe r = 1;
        while (e) {
            if (e & 1) r = mul_raw(r, a);
            a = mul_raw(a, a);
            e >>= 1;
        }
        return r;
    }

    Fe add_slow(Fe a, Fe b) const {
        Fe r = 0, pw = 1;
        for (std::uint32_t i = 0; i < m_; ++i) {
            Fe d = (a % p_ + b % p_) % p_;
            r += d * pw;
            a /= p_;
            b /= p_;
            pw *= p_;
        }
        return r;
    }

    Fe neg_slow(Fe a) const {
        Fe r = 0, pw = 1;
        for (std::uint32_t i = 0; i < m_; ++i) {
            Fe d = a % p_;
            r += (d ? p_ - d : 0) * pw;
            a /= p_;
            pw *= p_;
        }
        return r;
    }

    void find_primitive() {
        const std::uint64_t n = q_ - 1;
        const auto factors = gf_detail::distinct_prime_factors(n);
        for (Fe g = 1; g < q_; ++g) {
            bool ok = true;
            for (std::uint64_t r : factors)
                if (pow_raw(g, n / r) == 1) {
                    ok = false;
                    break;
                }
            if (ok) {
                primitive_ = g;
                return;
            }
        }
        throw std::logic_error("no primitive element found");  // unreachable
    }

    void build_tables() {
        const std::uint32_t n = q_ - 1;
        exp_.assign(std::size_t(2) * n + 1, 1);
        log_.assign(q_, ~std::uint32_t{0});
        Fe x = 1;
        for (std::uint32_t i = 0; i < n; ++i) {
            exp_[i] = x;
            exp_[i + n] = x;
            log_[x] = i;
            x = mul_raw(x, primitive_);
        }
        PGCAP_CHECK(x == 1, "primitive element order != q-1");

        inv_.assign(q_, 0);
        for (Fe a = 1; a < q_; ++a) inv_[a] = exp_[n - log_[a]];

        if (m_ > 1 && p_ != 2 && q_ <= 1024) {
            add_tab_.assign(std::size_t(q_) * q_, 0);
            neg_tab_.assign(q_, 0);
            for (Fe a = 0; a < q_; ++a) {
                neg_tab_[a] = neg_slow(a);
                for (Fe b = 0; b <= a; ++b) {
                    Fe s = add_slow(a, b);
                    add_tab_[std::size_t(a) * q_ + b] = std::uint16_t(s);
                    add_tab_[std::size_t(b) * q_ + a] = std::uint16_t(s);
                }
            }
        }
    }

    std::uint32_t p_ = 0, m_ = 0, q_ = 0;
    std::vector<std::uint32_t> irr_;
    Fe primitive_ = 0;
    std::vector<Fe> exp_, log_, inv_;
    std::vector<std::uint16_t> add_tab_;
    std::vector<Fe> neg_tab_;
};

}  // namespace pgcap
