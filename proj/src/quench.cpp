#include "bosonperm/quench.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace bosonperm {

Propagator propagator(const SpectralData& spectral, double t) {
    const Eigen::Index ns = spectral.energies.size();
    Propagator prop;
    prop.t = t;
    if (t == 0.0) {
        prop.y = Eigen::MatrixXcd::Identity(ns, ns);
        return prop;
    }
    Eigen::VectorXcd phases(ns);
    for (Eigen::Index k = 0; k < ns; ++k) {
        phases[k] = std::polar(1.0, -spectral.energies[k] * t);
    }
    const Eigen::MatrixXcd modes = spectral.modes.cast<Complex>();
    prop.y = modes * phases.asDiagonal() * modes.transpose();
    return prop;
}

CorrelationZ correlation_z(const Propagator& prop, const CdwPattern& pattern,
                           const SubsystemCut& cut) {
    const auto ns = prop.y.rows();
    const auto nb = static_cast<Eigen::Index>(pattern.rich_sites.size());
    if (prop.y.cols() != ns || 2 * nb != ns ||
        static_cast<Eigen::Index>(cut.sites.size()) != nb) {
        throw std::invalid_argument("correlation_z: propagator, pattern and cut sizes disagree");
    }
    // B[l][i] = Y[r_i][cut_l]; Z = B^dagger B.
    Eigen::MatrixXcd b(nb, nb);
    for (Eigen::Index i = 0; i < nb; ++i) {
        for (Eigen::Index l = 0; l < nb; ++l) {
            b(l, i) = prop.y(pattern.rich_sites[i], cut.sites[l]);
        }
    }
    return CorrelationZ{b.adjoint() * b};
}

EntanglementMatrixA assemble_a(const CorrelationZ& z) {
    const auto nb = z.z.rows();
    const Eigen::MatrixXcd rest = Eigen::MatrixXcd::Identity(nb, nb) - z.z;
    ComplexMatrix a(2 * nb, 2 * nb);
    a.topLeftCorner(nb, nb) = z.z;
    a.topRightCorner(nb, nb) = rest;
    a.bottomLeftCorner(nb, nb) = rest;
    a.bottomRightCorner(nb, nb) = z.z;
    return EntanglementMatrixA{std::move(a)};
}

QuenchProblem::QuenchProblem(const LatticeSpec& spec)
    : spec_(spec),
      spectral_(diagonalize(build_hopping_matrix(spec))),
      pattern_(cdw_pattern(spec)),
      cut_(subsystem_cut(spec)) {}

EntanglementMatrixA QuenchProblem::matrix_at(double t) const {
    return assemble_a(correlation_z(propagator_at(t), pattern_, cut_));
}

double unitarity_error(const Eigen::MatrixXcd& y) {
    const auto n = y.rows();
    return (y * y.adjoint() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

double hermiticity_error(const Eigen::MatrixXcd& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double hermiticity_error(const ComplexMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double stochastic_error(const ComplexMatrix& a) {
    const double rows = (a.rowwise().sum().array() - Complex(1.0)).abs().maxCoeff();
    const double cols = (a.colwise().sum().array() - Complex(1.0)).abs().maxCoeff();
    return std::max(rows, cols);
}

double spectral_norm(const ComplexMatrix& a) {
    const Eigen::MatrixXcd dense = a;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(dense);
    return svd.singularValues()[0];
}

std::pair<double, double> hermitian_spectrum_range(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return {ev.minCoeff(), ev.maxCoeff()};
}

}  // namespace bosonperm
