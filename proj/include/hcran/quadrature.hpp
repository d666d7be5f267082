#pragma once

#include "hcran/common.hpp"

#include <Eigen/Eigenvalues>

namespace hcran {

// Gauss-Laguerre rule for ∫_0^∞ e^{-x} f(x) dx (Golub-Welsch).
struct GaussLaguerre {
    RVector nodes;
    RVector weights;

    explicit GaussLaguerre(int n) {
        require(n >= 1, "quadrature order must be positive");
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            J(i, i) = 2.0 * i + 1.0;
            if (i + 1 < n) J(i, i + 1) = J(i + 1, i) = i + 1.0;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
        if (eig.info() != Eigen::Success) throw NumericalError("Golub-Welsch eigen-decomposition failed");
        nodes = eig.eigenvalues();
        weights = eig.eigenvectors().row(0).array().square().transpose();
    }

    template <class F>
    double integrate(F&& f) const {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < nodes.size(); ++i) sum += weights(i) * f(nodes(i));
        return sum;
    }
};

inline const GaussLaguerre& laguerre64() {
    static const GaussLaguerre rule(64);
    return rule;
}

}  // namespace hcran
