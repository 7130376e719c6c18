#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bosonperm {

enum class Dimension { OneD, TwoD };

/// Geometry of an open-boundary chain or square lattice.
///
/// Sites are stored 0-based row-major: the 1-based lattice coordinate
/// (jx, jy) maps to (jx - 1) + Lx * (jy - 1).
struct LatticeSpec {
    Dimension dimension = Dimension::OneD;
    int lx = 2;
    int ly = 1;
    double hopping = 1.0;  ///< J

    int num_sites() const { return lx * ly; }
    int site_index(int jx, int jy) const { return (jx - 1) + lx * (jy - 1); }

    /// Throws std::invalid_argument when the geometry cannot host a
    /// half-filled state.
    void validate() const;

    static LatticeSpec chain(int num_sites, double hopping = 1.0);
    static LatticeSpec square(int lx, int ly, double hopping = 1.0);

    std::string describe() const;
};

/// Charge-rich sites of the 0101... density wave, ascending 0-based indices.
struct CdwPattern {
    std::vector<int> rich_sites;
};

/// Sites of subsystem A, ascending 0-based indices.
struct SubsystemCut {
    std::vector<int> sites;
};

/// Eigen-decomposition of the hopping matrix: column k of `modes` is the
/// single-particle eigenstate with energy `energies[k]`, ascending.
struct SpectralData {
    Eigen::VectorXd energies;
    Eigen::MatrixXd modes;
};

Eigen::MatrixXd build_hopping_matrix(const LatticeSpec& spec);

SpectralData diagonalize(const Eigen::MatrixXd& hopping);

CdwPattern cdw_pattern(const LatticeSpec& spec);

SubsystemCut subsystem_cut(const LatticeSpec& spec);

}  // namespace bosonperm
