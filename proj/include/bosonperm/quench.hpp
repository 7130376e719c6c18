#pragma once

#include "bosonperm/lattice.hpp"
#include "bosonperm/types.hpp"

namespace bosonperm {

/// Single-particle propagator Y(t) = X diag(exp(-i e_k t)) X^T.
struct Propagator {
    double t = 0.0;
    Eigen::MatrixXcd y;
};

/// z_ij = sum over l in the cut of conj(Y[r_i][l]) Y[r_j][l], with r the
/// rich sites in CdwPattern order.
struct CorrelationZ {
    Eigen::MatrixXcd z;
};

/// The Ns x Ns block matrix [[Z, I - Z], [I - Z, Z]]; perm A = exp(-S2).
struct EntanglementMatrixA {
    ComplexMatrix a;
    int half() const { return static_cast<int>(a.rows() / 2); }
};

/// At t == 0 the identity is returned exactly, so the product state yields
/// an exact 0/1 matrix downstream.
Propagator propagator(const SpectralData& spectral, double t);

CorrelationZ correlation_z(const Propagator& prop, const CdwPattern& pattern,
                           const SubsystemCut& cut);

EntanglementMatrixA assemble_a(const CorrelationZ& z);

/// Everything needed to produce A(t) for one lattice at arbitrary times.
class QuenchProblem {
public:
    explicit QuenchProblem(const LatticeSpec& spec);

    const LatticeSpec& spec() const { return spec_; }
    const SpectralData& spectral() const { return spectral_; }
    const CdwPattern& pattern() const { return pattern_; }
    const SubsystemCut& cut() const { return cut_; }
    int num_sites() const { return spec_.num_sites(); }

    Propagator propagator_at(double t) const { return propagator(spectral_, t); }
    EntanglementMatrixA matrix_at(double t) const;

private:
    LatticeSpec spec_;
    SpectralData spectral_;
    CdwPattern pattern_;
    SubsystemCut cut_;
};

// Invariant diagnostics, all returning the worst entrywise deviation.

double unitarity_error(const Eigen::MatrixXcd& y);
double hermiticity_error(const Eigen::MatrixXcd& m);
double hermiticity_error(const ComplexMatrix& m);
/// Max over rows and columns of |sum - 1|.
double stochastic_error(const ComplexMatrix& a);
double spectral_norm(const ComplexMatrix& a);
/// Smallest and largest eigenvalue of a Hermitian matrix.
std::pair<double, double> hermitian_spectrum_range(const Eigen::MatrixXcd& m);

}  // namespace bosonperm
