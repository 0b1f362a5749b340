#pragma once

#include <stdexcept>
#include <string>

namespace quartic {

enum class Errc {
    NotPrime,
    PrimeTooSmall,
    ZeroPolynomial,
    ZeroForm,
    NotSmooth,
    NoRationalLine,
    PointNotOnCurve,
    NoInterpolant,
    ResidueOutOfRange,
    BudgetExceeded,
    Inconclusive,
    AmbiguousSmallPrime,
    BadInput,
    Internal,
};

class Error : public std::runtime_error {
  public:
    Error(Errc c, const std::string& what) : std::runtime_error(what), code_(c) {}
    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc c, const std::string& what) { throw Error(c, what); }

} // namespace quartic
