#pragma once

#include <mpfr.h>

#include <string>

namespace horizonlab {

// Value-semantic MPFR wrapper. Precision is per value; binary operations
// produce results at the wider operand precision, round-to-nearest.
class MpReal {
public:
    explicit MpReal(int bits = 53);
    MpReal(double v, int bits);
    MpReal(const MpReal& o);
    MpReal(MpReal&& o) noexcept;
    MpReal& operator=(const MpReal& o);
    MpReal& operator=(MpReal&& o) noexcept;
    ~MpReal();

    int precision() const;
    double to_double() const;
    std::string str(std::size_t digits = 30) const;

    static MpReal pi(int bits);
    static MpReal pow10(long exponent, int bits);  // 10^exponent

    MpReal operator-() const;
    MpReal& operator+=(const MpReal& o);
    MpReal& operator-=(const MpReal& o);
    MpReal& operator*=(const MpReal& o);
    MpReal& operator/=(const MpReal& o);

    friend MpReal operator+(MpReal a, const MpReal& b) { return a += b; }
    friend MpReal operator-(MpReal a, const MpReal& b) { return a -= b; }
    friend MpReal operator*(MpReal a, const MpReal& b) { return a *= b; }
    friend MpReal operator/(MpReal a, const MpReal& b) { return a /= b; }

    friend bool operator<(const MpReal& a, const MpReal& b);
    friend bool operator>(const MpReal& a, const MpReal& b);
    friend bool operator<=(const MpReal& a, const MpReal& b);
    friend bool operator>=(const MpReal& a, const MpReal& b);
    friend bool operator==(const MpReal& a, const MpReal& b);

    friend MpReal sqrt(const MpReal& a);
    friend MpReal abs(const MpReal& a);
    friend MpReal sin(const MpReal& a);
    friend MpReal cos(const MpReal& a);
    friend MpReal log(const MpReal& a);
    friend MpReal log2(const MpReal& a);
    friend MpReal floor(const MpReal& a);
    friend MpReal fmod(const MpReal& a, const MpReal& b);
    friend MpReal hypot(const MpReal& a, const MpReal& b);

private:
    mpfr_t v_;
};

} // namespace horizonlab
