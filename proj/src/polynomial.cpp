#include "bvpair/polynomial.hpp"

#include "bvpair/error.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace bvpair {

Polynomial::Polynomial(const Rational& constant) {
    if (constant != 0) c_.push_back(constant);
}

Polynomial::Polynomial(std::initializer_list<Rational> coeffs) : c_(coeffs) { trim(); }

Polynomial::Polynomial(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

Polynomial Polynomial::x() { return Polynomial({Rational(0), Rational(1)}); }

Polynomial Polynomial::linear(const Rational& a, const Rational& b) { return Polynomial({a, b}); }

void Polynomial::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational Polynomial::operator()(const Rational& t) const {
    Rational acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
        acc *= t;
        acc += *it;
    }
    return acc;
}

double Polynomial::eval_d(double t) const {
    double acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + it->get_d();
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Rational> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<long>(k);
    return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const {
    if (c_.empty()) return {};
    std::vector<Rational> a(c_.size() + 1);
    for (std::size_t k = 0; k < c_.size(); ++k) a[k + 1] = c_[k] / static_cast<long>(k + 1);
    return Polynomial(std::move(a));
}

Rational Polynomial::integrate(const Rational& a, const Rational& b) const {
    const Polynomial anti = antiderivative();
    return anti(b) - anti(a);
}

Polynomial Polynomial::compose(const Polynomial& inner) const {
    Polynomial acc;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
        acc *= inner;
        acc += Polynomial(*it);
    }
    return acc;
}

Polynomial Polynomial::pow(unsigned k) const {
    Polynomial result(1);
    Polynomial base = *this;
    while (k) {
        if (k & 1u) result *= base;
        base *= base;
        k >>= 1u;
    }
    return result;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    trim();
    return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& o) {
    if (c_.empty() || o.c_.empty()) {
        c_.clear();
        return *this;
    }
    std::vector<Rational> r(c_.size() + o.c_.size() - 1);
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    c_ = std::move(r);
    trim();
    return *this;
}

Polynomial& Polynomial::operator*=(const Rational& s) {
    if (s == 0) {
        c_.clear();
        return *this;
    }
    for (auto& v : c_) v *= s;
    return *this;
}

Polynomial Polynomial::operator-() const {
    Polynomial r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
}

std::pair<Polynomial, Polynomial> Polynomial::divmod(const Polynomial& divisor) const {
    if (divisor.is_zero()) throw Error(ErrorCode::InvalidArgument, "polynomial division by zero");
    std::vector<Rational> rem = c_;
    const int dd = divisor.degree();
    const int nd = degree();
    if (nd < dd) return {Polynomial(), *this};
    std::vector<Rational> quot(static_cast<std::size_t>(nd - dd + 1));
    const Rational& lead = divisor.c_.back();
    for (int k = nd - dd; k >= 0; --k) {
        const Rational q = rem[static_cast<std::size_t>(k + dd)] / lead;
        quot[static_cast<std::size_t>(k)] = q;
        if (q == 0) continue;
        for (int j = 0; j <= dd; ++j) rem[static_cast<std::size_t>(k + j)] -= q * divisor.c_[static_cast<std::size_t>(j)];
    }
    return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

std::optional<Polynomial> Polynomial::divide_exact(const Polynomial& divisor) const {
    auto [q, r] = divmod(divisor);
    if (!r.is_zero()) return std::nullopt;
    return q;
}

Polynomial Polynomial::monic() const {
    if (c_.empty()) return {};
    return *this * Rational(1 / c_.back());
}

std::string Polynomial::to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t k = 0; k < c_.size(); ++k) {
        if (k) os << ',';
        os << bvpair::to_string(c_[k]);
    }
    os << ']';
    return os.str();
}

Polynomial gcd(Polynomial a, Polynomial b) {
    while (!b.is_zero()) {
        auto r = a.divmod(b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

Polynomial squarefree_part(const Polynomial& p) {
    if (p.degree() <= 1) return p;
    const Polynomial g = gcd(p, p.derivative());
    if (g.degree() <= 0) return p;
    return p.divmod(g).first;
}

namespace {

class SturmChain {
public:
    explicit SturmChain(const Polynomial& p) {
        chain_.push_back(p);
        chain_.push_back(p.derivative());
        while (!chain_.back().is_zero()) {
            auto r = chain_[chain_.size() - 2].divmod(chain_.back()).second;
            chain_.push_back(-r);
        }
        chain_.pop_back();
    }

    int variations(const Rational& t) const {
        int count = 0;
        int last = 0;
        for (const auto& q : chain_) {
            const int s = sgn(q(t));
            if (s == 0) continue;
            if (last != 0 && s != last) ++count;
            last = s;
        }
        return count;
    }

    // Number of distinct roots in (a, b]; valid when p(a) != 0.
    int count(const Rational& a, const Rational& b) const { return variations(a) - variations(b); }

private:
    std::vector<Polynomial> chain_;
};

// Integer polynomial proportional to p (used for the rational-root bound).
mpz_class leading_integer_coefficient(const Polynomial& p) {
    mpz_class lcm_den = 1;
    for (const auto& c : p.coeffs()) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), c.get_den_mpz_t());
    mpz_class g = 0;
    for (const auto& c : p.coeffs()) {
        mpz_class v = c.get_num() * (lcm_den / c.get_den());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    }
    const Rational& lead = p.coeffs().back();
    mpz_class lead_int = lead.get_num() * (lcm_den / lead.get_den()) / g;
    return abs(lead_int);
}

Rational split_point(const Polynomial& q, const Rational& a, const Rational& b) {
    static const int fractions[][2] = {{1, 2}, {1, 3}, {2, 3}, {2, 5}, {3, 5}, {3, 7}, {4, 7}, {5, 11}, {6, 11}};
    for (const auto& f : fractions) {
        Rational m = a + (b - a) * Rational(f[0], f[1]);
        if (q(m) != 0) return m;
    }
    // q has finitely many roots; a denser probe always succeeds.
    for (int k = 13;; k += 2) {
        Rational m = a + (b - a) * Rational(k / 2, k);
        if (q(m) != 0) return m;
    }
}

} // namespace

std::vector<RootInterval> isolate_roots(const Polynomial& p, const Rational& a, const Rational& b,
                                        const Rational& width) {
    if (p.is_zero()) throw Error(ErrorCode::InvalidArgument, "root isolation of the zero polynomial");
    std::vector<RootInterval> out;
    if (!(a < b) || p.degree() <= 0) return out;
    if (p.degree() == 1) {
        const Rational r = -p.coeff(0) / p.coeff(1);
        if (a < r && r < b) out.push_back({r, r});
        return out;
    }
    Polynomial q = squarefree_part(p);
    // Remove endpoint roots so the Sturm count is well defined.
    for (const Rational& e : {a, b}) {
        if (q(e) == 0) q = q.divmod(Polynomial::linear(-e, 1)).first;
    }
    if (q.degree() <= 0) return out;
    const SturmChain sturm(q);
    const mpz_class lead = leading_integer_coefficient(q);
    // A rational root r = s/t in lowest terms has t | lead, so lead*r is an integer.
    Rational target_width = width;
    const Rational integer_resolution(mpz_class(1), 2 * lead);
    if (integer_resolution < target_width) target_width = integer_resolution;

    std::vector<std::pair<Rational, Rational>> isolating;
    std::vector<std::pair<Rational, Rational>> stack{{a, b}};
    while (!stack.empty()) {
        auto [lo, hi] = stack.back();
        stack.pop_back();
        const int n = sturm.count(lo, hi);
        if (n == 0) continue;
        if (n == 1) {
            isolating.emplace_back(lo, hi);
            continue;
        }
        const Rational m = split_point(q, lo, hi);
        stack.emplace_back(lo, m);
        stack.emplace_back(m, hi);
    }
    for (auto [lo, hi] : isolating) {
        // Simple root (q squarefree) and q(lo), q(hi) != 0: sign change brackets it.
        int slo = sgn(q(lo));
        bool exact = false;
        while (hi - lo > target_width) {
            Rational m = (lo + hi) / 2;
            const int sm = sgn(q(m));
            if (sm == 0) {
                lo = hi = m;
                exact = true;
                break;
            }
            if (sm == slo) {
                lo = m;
            } else {
                hi = m;
            }
        }
        if (!exact) {
            mpz_class kmin, kmax;
            Rational scaled_lo = lo * Rational(lead), scaled_hi = hi * Rational(lead);
            mpz_cdiv_q(kmin.get_mpz_t(), scaled_lo.get_num_mpz_t(), scaled_lo.get_den_mpz_t());
            mpz_fdiv_q(kmax.get_mpz_t(), scaled_hi.get_num_mpz_t(), scaled_hi.get_den_mpz_t());
            for (mpz_class k = kmin; k <= kmax; ++k) {
                Rational cand(k, lead);
                cand.canonicalize();
                if (cand > lo && cand < hi && q(cand) == 0) {
                    lo = hi = cand;
                    exact = true;
                    break;
                }
            }
        }
        if (!exact) {
            while (hi - lo > width) {
                Rational m = (lo + hi) / 2;
                if (sgn(q(m)) == slo) lo = m; else hi = m;
            }
        }
        out.push_back({lo, hi});
    }
    std::sort(out.begin(), out.end(), [](const RootInterval& l, const RootInterval& r) { return l.lo < r.lo; });
    return out;
}

int sign_near(const Polynomial& p, const Rational& t, int side) {
    Polynomial d = p;
    int order = 0;
    while (!d.is_zero()) {
        const int s = sgn(d(t));
        if (s != 0) return (side < 0 && (order % 2 == 1)) ? -s : s;
        d = d.derivative();
        ++order;
    }
    return 0;
}

int sign_between(const Polynomial& p, const Rational& a, const Rational& b) {
    return sgn(p((a + b) / 2));
}

} // namespace bvpair
