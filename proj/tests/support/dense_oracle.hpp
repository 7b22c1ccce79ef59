#pragma once

#include <Eigen/Dense>

#include "homog/grid.hpp"

// Dense assembly of the periodic finite-volume operator straight from the
// face list, independent of the library kernels.
namespace oracle {

inline Eigen::MatrixXd assemble(const homog::EdgeCoefficientField& a)
{
    const auto& g = a.grid;
    const auto n = static_cast<Eigen::Index>(g.size());
    const double h2 = g.spacing() * g.spacing();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    const std::size_t N = g.cells();
    for (int k = 0; k < g.dim(); ++k) {
        for (std::size_t i1 = 0; i1 < (g.dim() == 2 ? N : 1); ++i1) {
            for (std::size_t i0 = 0; i0 < N; ++i0) {
                const std::size_t i = i0 + N * i1;
                const std::size_t j = k == 0 ? (i0 + 1) % N + N * i1 : i0 + N * ((i1 + 1) % N);
                const double c = a.values[static_cast<std::size_t>(k) * g.size() + i] / h2;
                const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
                A(ii, ii) += c;
                A(jj, jj) += c;
                A(ii, jj) -= c;
                A(jj, ii) -= c;
            }
        }
    }
    return A;
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v)
{
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Mean-zero solution of A x = b: (A + 11^T) is nonsingular and its solution
// is mean zero whenever b is.
inline Eigen::VectorXd solve_meanzero(const homog::EdgeCoefficientField& a, const std::vector<double>& b)
{
    Eigen::MatrixXd A = assemble(a);
    A.array() += 1.0;
    return A.fullPivLu().solve(to_eigen(b));
}

inline Eigen::VectorXd solve_shifted(const homog::EdgeCoefficientField& a, double tau, const std::vector<double>& b)
{
    Eigen::MatrixXd A = assemble(a);
    A.diagonal().array() += tau;
    return A.fullPivLu().solve(to_eigen(b));
}

} // namespace oracle
