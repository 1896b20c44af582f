#include "strahler/bigfloat.hpp"

#include <cmath>
#include <cstring>
#include <vector>

namespace strahler {

std::size_t decimal_digits_for_bits(mpfr_prec_t bits) {
    // ceil(bits * log10(2)) + 1 guard digit
    return static_cast<std::size_t>(std::ceil(static_cast<double>(bits) * 0.30102999566398119521)) + 1;
}

std::string BigFloat::to_decimal(std::size_t digits) const {
    if (mpfr_zero_p(v_)) return "0";
    if (mpfr_nan_p(v_)) return "nan";
    if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";

    mpfr_exp_t exp10 = 0;
    char* raw = mpfr_get_str(nullptr, &exp10, 10, digits, v_, MPFR_RNDN);
    std::string mant(raw);
    mpfr_free_str(raw);

    bool neg = false;
    if (!mant.empty() && mant[0] == '-') {
        neg = true;
        mant.erase(mant.begin());
    }
    // strip trailing zeros; keep at least one digit
    std::size_t last = mant.find_last_not_of('0');
    mant.erase(last == std::string::npos ? 1 : last + 1);

    // value = 0.mant * 10^exp10
    std::string out;
    const long e = static_cast<long>(exp10);
    const long ndig = static_cast<long>(mant.size());
    if (e >= -3 && e <= static_cast<long>(digits)) {
        if (e <= 0) {
            out = "0." + std::string(static_cast<std::size_t>(-e), '0') + mant;
        } else if (e >= ndig) {
            out = mant + std::string(static_cast<std::size_t>(e - ndig), '0');
        } else {
            out = mant.substr(0, static_cast<std::size_t>(e)) + "." +
                  mant.substr(static_cast<std::size_t>(e));
        }
    } else {
        // scientific: d.ddd...e<exp>, exponent of the leading digit
        out = mant.substr(0, 1);
        if (mant.size() > 1) out += "." + mant.substr(1);
        out += "e" + std::to_string(e - 1);
    }
    return neg ? "-" + out : out;
}

}  // namespace strahler
