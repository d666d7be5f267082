#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace hcran {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Singular Gram matrices, non-finite objectives.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Logarithm used for every rate. Base 2 gives bit/s/Hz.
class LogBase {
public:
    explicit LogBase(double base = 2.0) : ln_base_(std::log(base)) {
        if (!(base > 1.0) || !std::isfinite(base)) throw InvalidInput("log base must be finite and > 1");
    }
    double base() const { return std::exp(ln_base_); }
    double ln_base() const { return ln_base_; }
    // log_b(1 + x)
    double log1p(double x) const { return std::log1p(x) / ln_base_; }
    // inverse of log1p: b^r - 1
    double expm1(double r) const { return std::expm1(r * ln_base_); }

private:
    double ln_base_;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidInput(what);
}

}  // namespace hcran
