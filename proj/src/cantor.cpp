#include "bvpair/cantor.hpp"

#include "bvpair/error.hpp"

#include <map>
#include <mutex>
#include <vector>

namespace bvpair::cantor {

namespace {

// Ternary digits of t in (0, 1), stopping after the first digit 1 (a
// trailing -1 marks that nothing nonzero follows it). period_start >= 0 when
// the expansion became periodic before any digit 1 appeared.
struct DigitWalk {
    std::vector<int> digits;
    long period_start = -1;  // index into digits where the period begins
};

DigitWalk ternary_digits_until_one(const Rational& t) {
    DigitWalk walk;
    std::map<Rational, long> seen;
    Rational x = t;
    for (long step = 0;; ++step) {
        if (x == 0) return walk;
        auto [it, inserted] = seen.emplace(x, step);
        if (!inserted) {
            walk.period_start = it->second;
            return walk;
        }
        Rational y = 3 * x;
        int d = 0;
        if (y >= 2) d = 2;
        else if (y >= 1) d = 1;
        walk.digits.push_back(d);
        x = y - d;
        if (d == 1) {
            // Mark whether anything follows the 1.
            if (x == 0) walk.digits.push_back(-1);
            return walk;
        }
    }
}

} // namespace

Rational cdf(const Rational& t) {
    if (t <= 0) return 0;
    if (t >= 1) return 1;
    const DigitWalk w = ternary_digits_until_one(t);
    // Contribution of digit k (1-based): 2^-k if the digit is 2 or the first 1.
    Rational pre = 0, per = 0;
    Rational scale = Rational(1, 2);
    const long n = static_cast<long>(w.digits.size());
    for (long k = 0; k < n; ++k) {
        const int d = w.digits[static_cast<std::size_t>(k)];
        if (d < 0) break;
        Rational c = (d == 0) ? Rational(0) : scale;
        if (w.period_start >= 0 && k >= w.period_start) per += c; else pre += c;
        scale /= 2;
        if (d == 1) break;
    }
    if (w.period_start < 0) return pre;
    const long len = n - w.period_start;
    // Periodic tail repeats with factor 2^-len.
    return pre + per / (1 - pow_q(Rational(1, 2), len));
}

bool contains(const Rational& t) {
    if (t < 0 || t > 1) return false;
    if (t == 0 || t == 1) return true;
    const DigitWalk w = ternary_digits_until_one(t);
    for (std::size_t k = 0; k < w.digits.size(); ++k) {
        if (w.digits[k] == 1) {
            // 0.d..1 followed by zeros equals 0.d..0222.., a member.
            return k + 1 < w.digits.size() && w.digits[k + 1] == -1;
        }
    }
    return true;
}

namespace {

// Prefix value and position of the first digit 1 of t, if t lies in a gap.
bool gap_of(const Rational& t, Rational& gap_lo, Rational& gap_hi) {
    const DigitWalk w = ternary_digits_until_one(t);
    Rational prefix = 0;
    Rational scale = Rational(1, 3);
    for (std::size_t k = 0; k < w.digits.size(); ++k) {
        const int d = w.digits[k];
        if (d == 1) {
            if (k + 1 < w.digits.size() && w.digits[k + 1] == -1) return false;
            gap_lo = prefix + scale;
            gap_hi = prefix + 2 * scale;
            return true;
        }
        if (d < 0) break;
        prefix += d * scale;
        scale /= 3;
    }
    return false;
}

} // namespace

Rational snap_up(const Rational& t) {
    if (t <= 0) return 0;
    if (t >= 1) return 1;
    Rational lo, hi;
    return gap_of(t, lo, hi) ? hi : t;
}

Rational snap_down(const Rational& t) {
    if (t <= 0) return 0;
    if (t >= 1) return 1;
    Rational lo, hi;
    return gap_of(t, lo, hi) ? lo : t;
}

namespace {

// Maps the binary digits of s to ternary digits 0 -> 0, 1 -> 2. With
// `terminating` the finite binary expansion of a dyadic s is used, otherwise
// the one ending in repeated 1s.
Rational binary_to_ternary(const Rational& s, bool terminating) {
    if (s <= 0) return 0;
    if (s >= 1) return 1;
    std::map<Rational, long> seen;
    std::vector<int> bits;
    Rational x = s;
    long period_start = -1;
    for (long step = 0;; ++step) {
        if (x == 0) break;
        auto [it, inserted] = seen.emplace(x, step);
        if (!inserted) {
            period_start = it->second;
            break;
        }
        Rational y = 2 * x;
        const int b = y >= 1 ? 1 : 0;
        bits.push_back(b);
        x = y - b;
    }
    if (period_start < 0 && !terminating) {
        // Dyadic: replace the final 1 by 0 followed by repeating 1s.
        bits.back() = 0;
        Rational pre = 0, scale = Rational(1, 3);
        for (int b : bits) {
            pre += 2 * b * scale;
            scale /= 3;
        }
        // Repeated 2s from the current position sum to 3 * scale.
        return pre + scale * 3;
    }
    Rational pre = 0, per = 0, scale = Rational(1, 3);
    for (long k = 0; k < static_cast<long>(bits.size()); ++k) {
        const Rational c = 2 * bits[static_cast<std::size_t>(k)] * scale;
        if (period_start >= 0 && k >= period_start) per += c; else pre += c;
        scale /= 3;
    }
    if (period_start < 0) return pre;
    const long len = static_cast<long>(bits.size()) - period_start;
    return pre + per / (1 - pow_q(Rational(1, 3), len));
}

} // namespace

Rational inverse_max(const Rational& s) { return binary_to_ternary(s, true); }

Rational inverse_min(const Rational& s) { return binary_to_ternary(s, false); }

Rational moment(unsigned k) {
    static std::mutex mutex;
    static std::vector<Rational> cache{Rational(1)};
    std::lock_guard<std::mutex> lock(mutex);
    while (cache.size() <= k) {
        const unsigned n = static_cast<unsigned>(cache.size());
        // m_n (1 - 3^-n) = 3^-n / 2 * sum_{j<n} C(n,j) 2^(n-j) m_j
        Rational sum = 0;
        mpz_class binom = 1;
        for (unsigned j = 0; j < n; ++j) {
            sum += Rational(binom) * pow_q(Rational(2), static_cast<long>(n - j)) * cache[j];
            binom = binom * (n - j) / (j + 1);
        }
        const Rational three_n = pow_q(Rational(3), static_cast<long>(n));
        cache.push_back(sum / (2 * (three_n - 1)));
    }
    return cache[k];
}

Rational integrate_cell(const Polynomial& p, const Rational& cell_left, unsigned depth) {
    const Rational width = pow_q(Rational(1, 3), static_cast<long>(depth));
    const Polynomial q = p.compose(Polynomial::linear(cell_left, width));
    Rational total = 0;
    for (std::size_t k = 0; k < q.coeffs().size(); ++k) total += q.coeffs()[k] * moment(static_cast<unsigned>(k));
    return total * pow_q(Rational(1, 2), static_cast<long>(depth));
}

namespace {

void integrate_rec(const Polynomial& p, const Rational& s, const Rational& t, const Rational& left,
                   unsigned depth, unsigned cap, Quadrature& acc) {
    const Rational width = pow_q(Rational(1, 3), static_cast<long>(depth));
    const Rational right = left + width;
    if (right <= s || left >= t) return;
    if (s <= left && right <= t) {
        acc.value += integrate_cell(p, left, depth);
        return;
    }
    if (depth >= cap) {
        const Rational lo = max_q(left, s), hi = min_q(right, t);
        const Rational mass = cdf(hi) - cdf(lo);
        if (mass != 0) {
            acc.value += p((lo + hi) / 2) * mass;
            acc.exact = false;
        }
        return;
    }
    const Rational third = width / 3;
    integrate_rec(p, s, t, left, depth + 1, cap, acc);
    integrate_rec(p, s, t, left + 2 * third, depth + 1, cap, acc);
}

} // namespace

Quadrature integrate(const Polynomial& p, const Rational& s, const Rational& t, unsigned depth_cap) {
    Quadrature acc{Rational(0), true};
    if (!(s < t) || p.is_zero()) return acc;
    if (s < 0 || t > 1) throw Error(ErrorCode::InvalidArgument, "Cantor window outside [0,1]");
    // Trim the window to the Cantor set so that gap endpoints terminate the
    // recursion instead of reaching the depth cap.
    const Rational lo = snap_up(s), hi = snap_down(t);
    if (!(lo < hi)) return acc;
    integrate_rec(p, lo, hi, Rational(0), 0, depth_cap, acc);
    return acc;
}

} // namespace bvpair::cantor
