#ifndef DPCMUX_LOGVALUE_HPP
#define DPCMUX_LOGVALUE_HPP

#include <cmath>
#include <limits>

namespace dpcmux {

// Signed scalar carried as (sign, ln|x|).  Products of factors like
// 2^((n+1)/2) * e^(-c*n/2) with n in the hundreds underflow or overflow in
// linear double arithmetic; all such factors stay in log scale until the
// final exponentiation.
//
// Invariant: sign == 0 <=> exact zero (log_magnitude is then -inf by
// convention); otherwise log_magnitude is finite or +inf (saturated).
class LogValue {
  public:
    constexpr LogValue() : log_mag_(-std::numeric_limits<double>::infinity()), sign_(0) {}

    static LogValue zero() { return LogValue(); }
    static LogValue one() { return from_log(0.0, +1); }

    static LogValue from_log(double log_magnitude, int sign = +1) {
        LogValue v;
        if (sign == 0 || log_magnitude == -std::numeric_limits<double>::infinity()) {
            return zero();
        }
        v.log_mag_ = log_magnitude;
        v.sign_ = sign > 0 ? +1 : -1;
        return v;
    }

    static LogValue from_double(double x) {
        if (x == 0.0) return zero();
        return from_log(std::log(std::fabs(x)), x > 0 ? +1 : -1);
    }

    double log_magnitude() const { return log_mag_; }
    int sign() const { return sign_; }
    bool is_zero() const { return sign_ == 0; }

    // May underflow to 0 or overflow to +-inf; that is the caller's problem.
    double to_double() const {
        if (sign_ == 0) return 0.0;
        return sign_ * std::exp(log_mag_);
    }

    LogValue operator*(const LogValue& o) const {
        if (sign_ == 0 || o.sign_ == 0) return zero();
        return from_log(log_mag_ + o.log_mag_, sign_ * o.sign_);
    }

    LogValue operator/(const LogValue& o) const {
        if (sign_ == 0) return zero();
        return from_log(log_mag_ - o.log_mag_, sign_ * o.sign_);
    }

    LogValue pow_int(long long e) const {
        if (e == 0) return one();
        if (sign_ == 0) return zero();
        int s = (sign_ < 0 && (e & 1LL)) ? -1 : +1;
        return from_log(static_cast<double>(e) * log_mag_, s);
    }

    LogValue operator+(const LogValue& o) const {
        if (sign_ == 0) return o;
        if (o.sign_ == 0) return *this;
        // Order so that |a| >= |b|.
        const LogValue& a = (log_mag_ >= o.log_mag_) ? *this : o;
        const LogValue& b = (log_mag_ >= o.log_mag_) ? o : *this;
        double d = b.log_mag_ - a.log_mag_; // <= 0
        if (a.sign_ == b.sign_) {
            return from_log(a.log_mag_ + std::log1p(std::exp(d)), a.sign_);
        }
        double m = std::expm1(d); // in (-1, 0]
        if (m == -1.0 || a.log_mag_ == b.log_mag_) {
            // Exact cancellation (or as close as doubles get).
            if (a.log_mag_ == b.log_mag_) return zero();
        }
        return from_log(a.log_mag_ + std::log(-m), a.sign_);
    }

    LogValue operator-(const LogValue& o) const {
        return *this + from_log(o.log_mag_, -o.sign_);
    }

  private:
    double log_mag_;
    int sign_;
};

} // namespace dpcmux

#endif
