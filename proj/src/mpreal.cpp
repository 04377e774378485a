#include "horizonlab/mpreal.hpp"

#include <algorithm>
#include <vector>

#include "horizonlab/errors.hpp"

namespace horizonlab {

namespace {
int checked_bits(int bits) {
    if (bits < 2) throw ContractViolation("MpReal: precision must be >= 2 bits");
    return bits;
}
} // namespace

MpReal::MpReal(int bits) { mpfr_init2(v_, checked_bits(bits)); mpfr_set_zero(v_, 1); }

MpReal::MpReal(double v, int bits) {
    mpfr_init2(v_, checked_bits(bits));
    mpfr_set_d(v_, v, MPFR_RNDN);
}

MpReal::MpReal(const MpReal& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
}

MpReal::MpReal(MpReal&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
}

MpReal& MpReal::operator=(const MpReal& o) {
    if (this != &o) {
        mpfr_set_prec(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
}

MpReal& MpReal::operator=(MpReal&& o) noexcept {
    if (this != &o) mpfr_swap(v_, o.v_);
    return *this;
}

MpReal::~MpReal() { mpfr_clear(v_); }

int MpReal::precision() const { return static_cast<int>(mpfr_get_prec(v_)); }

double MpReal::to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

std::string MpReal::str(std::size_t digits) const {
    std::vector<char> buf(digits + 32);
    mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", static_cast<int>(digits), v_);
    return buf.data();
}

MpReal MpReal::pi(int bits) {
    MpReal r(bits);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
}

MpReal MpReal::pow10(long exponent, int bits) {
    MpReal r(bits);
    mpfr_set_ui(r.v_, 10, MPFR_RNDN);
    mpfr_pow_si(r.v_, r.v_, exponent, MPFR_RNDN);
    return r;
}

MpReal MpReal::operator-() const {
    MpReal r(*this);
    mpfr_neg(r.v_, r.v_, MPFR_RNDN);
    return r;
}

namespace {
void widen(mpfr_t v, const mpfr_t o) {
    const mpfr_prec_t p = std::max(mpfr_get_prec(v), mpfr_get_prec(o));
    if (mpfr_get_prec(v) < p) mpfr_prec_round(v, p, MPFR_RNDN);
}
} // namespace

MpReal& MpReal::operator+=(const MpReal& o) { widen(v_, o.v_); mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
MpReal& MpReal::operator-=(const MpReal& o) { widen(v_, o.v_); mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
MpReal& MpReal::operator*=(const MpReal& o) { widen(v_, o.v_); mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
MpReal& MpReal::operator/=(const MpReal& o) {
    if (mpfr_zero_p(o.v_)) throw ArithmeticDomainError("MpReal: division by zero");
    widen(v_, o.v_);
    mpfr_div(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

bool operator<(const MpReal& a, const MpReal& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
bool operator>(const MpReal& a, const MpReal& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
bool operator<=(const MpReal& a, const MpReal& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
bool operator>=(const MpReal& a, const MpReal& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }
bool operator==(const MpReal& a, const MpReal& b) { return mpfr_cmp(a.v_, b.v_) == 0; }

#define HORIZONLAB_MP_UNARY(name, fn)            \
    MpReal name(const MpReal& a) {               \
        MpReal r(a);                             \
        fn(r.v_, r.v_, MPFR_RNDN);               \
        return r;                                \
    }

HORIZONLAB_MP_UNARY(sqrt, mpfr_sqrt)
HORIZONLAB_MP_UNARY(sin, mpfr_sin)
HORIZONLAB_MP_UNARY(cos, mpfr_cos)
HORIZONLAB_MP_UNARY(log, mpfr_log)
HORIZONLAB_MP_UNARY(log2, mpfr_log2)

#undef HORIZONLAB_MP_UNARY

MpReal abs(const MpReal& a) {
    MpReal r(a);
    mpfr_abs(r.v_, r.v_, MPFR_RNDN);
    return r;
}

MpReal floor(const MpReal& a) {
    MpReal r(a);
    mpfr_floor(r.v_, r.v_);
    return r;
}

MpReal fmod(const MpReal& a, const MpReal& b) {
    MpReal r(a);
    widen(r.v_, b.v_);
    mpfr_fmod(r.v_, r.v_, b.v_, MPFR_RNDN);
    return r;
}

MpReal hypot(const MpReal& a, const MpReal& b) {
    MpReal r(a);
    widen(r.v_, b.v_);
    mpfr_hypot(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
}

} // namespace horizonlab
