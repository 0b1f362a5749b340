#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quartic/errors.hpp"
#include "quartic/numeric.hpp"
#include "quartic/rng.hpp"

namespace quartic {

// Extension levels available in a tower.  Level k models F_{p^k} as
// F_p[X]/(m_k) with an absolute (over F_p) coefficient vector of length k.
inline constexpr std::array<int, 5> kTowerLevels = {1, 2, 3, 6, 12};

bool is_tower_level(int k);
// smallest tower level divisible by both a and b (total on tower levels)
int common_level(int a, int b);
// smallest tower level divisible by d, for d | 12
int level_for_degree(int d);

class FieldTower;

class FieldElement {
  public:
    FieldElement() : tower_(nullptr), level_(0) { c_.fill(0); }

    const FieldTower* tower() const { return tower_; }
    int level() const { return level_; }
    const std::array<u64, 12>& coeffs() const { return c_; }
    u64 coeff(int i) const { return c_[i]; }

    bool is_zero() const {
        for (int i = 0; i < level_; ++i)
            if (c_[i]) return false;
        return true;
    }

    FieldElement operator-() const;
    FieldElement operator+(const FieldElement& o) const;
    FieldElement operator-(const FieldElement& o) const;
    FieldElement operator*(const FieldElement& o) const;
    FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
    FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
    FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }
    bool operator==(const FieldElement& o) const;
    bool operator!=(const FieldElement& o) const { return !(*this == o); }

    FieldElement inverse() const;

    // canonical byte encoding: [level][k coefficients LE u64]
    void append_bytes(std::string& out) const;
    std::string to_string() const;

  private:
    friend class FieldTower;
    const FieldTower* tower_;
    int level_;
    std::array<u64, 12> c_;
};

// total order used for all deterministic tie-breaking: level first, then
// coefficient vector lexicographically from c[0]
int cmp(const FieldElement& a, const FieldElement& b);

// Immutable after construction; shared read-only across threads.
class FieldTower {
  public:
    // p odd prime, 127 < p < 2^62
    static FieldTower build(u64 p);
    // relaxes the p > 127 floor (test oracles at tiny p); still prime and odd
    static FieldTower build_allow_small(u64 p);

    u64 p() const { return p_; }

    FieldElement zero(int level) const;
    FieldElement one(int level) const;
    // constant a (mod p) viewed at the given level
    FieldElement from_int(u64 a, int level = 1) const;
    FieldElement from_int_signed(int64_t a, int level = 1) const;
    FieldElement from_bigint(const BigInt& a, int level = 1) const;
    FieldElement make(int level, const std::vector<u64>& coeffs) const;
    // class of X at this level (generator of the defining quotient)
    FieldElement gen(int level) const;

    // defining polynomial of a level, monic, as coefficient vector of length k+1
    const std::vector<u64>& modulus(int level) const;

    FieldElement embed(const FieldElement& x, int to_level) const;
    // section of embed; nullopt when x is not in the image
    std::optional<FieldElement> compress(const FieldElement& x, int to_level) const;
    // compress to the smallest tower level containing x
    FieldElement canonical(const FieldElement& x) const;
    // minimal d with x^{p^d} = x (d divides the level)
    int degree(const FieldElement& x) const;

    // x^{p^e}
    FieldElement frobenius(const FieldElement& x, int e = 1) const;
    FieldElement pow(const FieldElement& x, const BigInt& e) const;
    FieldElement pow_u64(const FieldElement& x, u64 e) const;

    FieldElement random(int level, Rng& rng) const;
    // element number idx in the deterministic scan order of a level
    // (coefficients are the base-p digits of idx)
    FieldElement nth_element(int level, const BigInt& idx) const;

    // ---- internal arithmetic, used by FieldElement operators ----
    FieldElement add(const FieldElement& a, const FieldElement& b) const;
    FieldElement sub(const FieldElement& a, const FieldElement& b) const;
    FieldElement neg(const FieldElement& a) const;
    FieldElement mul(const FieldElement& a, const FieldElement& b) const;
    FieldElement inv(const FieldElement& a) const;

  private:
    FieldTower() = default;
    static FieldTower construct(u64 p);

    struct Level {
        int k = 0;
        std::vector<u64> modulus;                  // length k+1, monic
        std::vector<std::array<u64, 12>> red;      // X^{k+j} mod m, j in [0, k-1)
        std::vector<std::array<u64, 12>> frob_col; // column i: X^{i·p} mod m
    };

    struct Embedding {
        int from = 0, to = 0;
        std::vector<std::array<u64, 12>> cols; // cols[i] = r^i, i < from
        // left inverse rows (from x to), so that L·E = I; membership by re-embed
        std::vector<std::array<u64, 12>> left_inv;
    };

    const Level& lv(int level) const;
    const Embedding& emb(int from, int to) const;
    void build_level(int k);
    void build_embedding(int from, int to, Rng& rng);
    void compose_embedding(int from, int mid, int to);
    FieldElement promote_pair(const FieldElement& a, const FieldElement& b,
                              FieldElement& bb) const;

    u64 p_ = 0;
    std::array<Level, 5> levels_;
    std::vector<Embedding> embeddings_;
};

} // namespace quartic
