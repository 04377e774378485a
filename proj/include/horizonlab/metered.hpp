#pragma once

#include <cmath>
#include <memory>

#include "horizonlab/cost_ledger.hpp"
#include "horizonlab/mpreal.hpp"

namespace horizonlab {

// Execution context for metered arithmetic: declared mantissa length, the
// ledger that receives the counts, and the multiplication-equivalent charged
// per transcendental evaluation (sin, cos, sqrt, log).
struct EvalContext {
    int bits = 53;
    CostLedger* ledger = nullptr;
    int trans_mul_equiv = kDefaultTransMulEquiv;

    void add() const { if (ledger) ledger->adds += 1; }
    void mul() const { if (ledger) ledger->muls += 1; }
    void div() const { if (ledger) ledger->divs += 1; }
    void eval() const {
        if (ledger) {
            ledger->evals += 1;
            ledger->muls += static_cast<std::uint64_t>(trans_mul_equiv);
        }
    }
};

// Instrumented real number. Runs on hardware doubles when the declared
// mantissa fits (bits <= 53), software multi-precision otherwise; model costs
// are charged at the declared length either way.
class MeteredReal {
public:
    MeteredReal(double v, const EvalContext* ctx)
        : ctx_(ctx), d_(v) {
        if (ctx_->bits > 53) m_ = std::make_unique<MpReal>(v, ctx_->bits);
    }

    MeteredReal(const MeteredReal& o) : ctx_(o.ctx_), d_(o.d_) {
        if (o.m_) m_ = std::make_unique<MpReal>(*o.m_);
    }
    MeteredReal(MeteredReal&&) noexcept = default;
    MeteredReal& operator=(const MeteredReal& o) {
        ctx_ = o.ctx_;
        d_ = o.d_;
        m_ = o.m_ ? std::make_unique<MpReal>(*o.m_) : nullptr;
        return *this;
    }
    MeteredReal& operator=(MeteredReal&&) noexcept = default;

    double value() const { return m_ ? m_->to_double() : d_; }
    const EvalContext* context() const { return ctx_; }

    friend MeteredReal operator+(const MeteredReal& a, const MeteredReal& b) {
        a.ctx_->add();
        return a.combine(b, [](double x, double y) { return x + y; },
                         [](const MpReal& x, const MpReal& y) { return x + y; });
    }
    friend MeteredReal operator-(const MeteredReal& a, const MeteredReal& b) {
        a.ctx_->add();
        return a.combine(b, [](double x, double y) { return x - y; },
                         [](const MpReal& x, const MpReal& y) { return x - y; });
    }
    friend MeteredReal operator*(const MeteredReal& a, const MeteredReal& b) {
        a.ctx_->mul();
        return a.combine(b, [](double x, double y) { return x * y; },
                         [](const MpReal& x, const MpReal& y) { return x * y; });
    }
    friend MeteredReal operator/(const MeteredReal& a, const MeteredReal& b) {
        if ((b.m_ && b.m_->to_double() == 0.0) || (!b.m_ && b.d_ == 0.0))
            throw ArithmeticDomainError("MeteredReal: division by zero");
        a.ctx_->div();
        return a.combine(b, [](double x, double y) { return x / y; },
                         [](const MpReal& x, const MpReal& y) { return x / y; });
    }
    MeteredReal operator-() const {
        MeteredReal r(*this);
        if (r.m_) *r.m_ = -*r.m_;
        r.d_ = -r.d_;
        return r;  // sign flip not charged
    }

    friend bool operator<(const MeteredReal& a, const MeteredReal& b) {
        return (a.m_ && b.m_) ? (*a.m_ < *b.m_) : (a.value() < b.value());
    }
    friend bool operator>(const MeteredReal& a, const MeteredReal& b) { return b < a; }

    friend MeteredReal sin(const MeteredReal& a) {
        a.ctx_->eval();
        return a.apply([](double x) { return std::sin(x); },
                       [](const MpReal& x) { return sin(x); });
    }
    friend MeteredReal cos(const MeteredReal& a) {
        a.ctx_->eval();
        return a.apply([](double x) { return std::cos(x); },
                       [](const MpReal& x) { return cos(x); });
    }
    friend MeteredReal sqrt(const MeteredReal& a) {
        a.ctx_->eval();
        return a.apply([](double x) { return std::sqrt(x); },
                       [](const MpReal& x) { return sqrt(x); });
    }
    friend MeteredReal abs(const MeteredReal& a) {
        // sign manipulation, not charged
        return a.apply([](double x) { return std::abs(x); },
                       [](const MpReal& x) { return abs(x); });
    }
    // modulo reduction charged as one division
    friend MeteredReal wrap_mod(const MeteredReal& a, const MeteredReal& b) {
        a.ctx_->div();
        return a.combine(b, [](double x, double y) { return std::fmod(x, y); },
                         [](const MpReal& x, const MpReal& y) { return fmod(x, y); });
    }

private:
    template <typename FD, typename FM>
    MeteredReal combine(const MeteredReal& b, FD fd, FM fm) const {
        MeteredReal r(*this);
        if (r.m_ && b.m_)
            *r.m_ = fm(*r.m_, *b.m_);
        else
            r.d_ = fd(r.d_, b.d_);
        return r;
    }
    template <typename FD, typename FM>
    MeteredReal apply(FD fd, FM fm) const {
        MeteredReal r(*this);
        if (r.m_)
            *r.m_ = fm(*r.m_);
        else
            r.d_ = fd(r.d_);
        return r;
    }

    const EvalContext* ctx_;
    double d_;
    std::unique_ptr<MpReal> m_;
};

} // namespace horizonlab
