#include "bosonperm/lattice.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace bosonperm {

void LatticeSpec::validate() const {
    if (lx < 2) {
        throw std::invalid_argument("lattice: Lx must be at least 2");
    }
    if (ly < 1) {
        throw std::invalid_argument("lattice: Ly must be positive");
    }
    if (dimension == Dimension::OneD && ly != 1) {
        throw std::invalid_argument("lattice: a 1D chain must have Ly = 1");
    }
    if (num_sites() % 2 != 0) {
        throw std::invalid_argument("lattice: Ns = " + std::to_string(num_sites()) +
                                    " is odd; half filling needs an even site count");
    }
}

LatticeSpec LatticeSpec::chain(int num_sites, double hopping) {
    LatticeSpec spec{Dimension::OneD, num_sites, 1, hopping};
    spec.validate();
    return spec;
}

LatticeSpec LatticeSpec::square(int lx, int ly, double hopping) {
    LatticeSpec spec{Dimension::TwoD, lx, ly, hopping};
    spec.validate();
    return spec;
}

std::string LatticeSpec::describe() const {
    std::ostringstream out;
    if (dimension == Dimension::OneD) {
        out << "chain Ns=" << lx;
    } else {
        out << "square " << lx << "x" << ly;
    }
    out << " J=" << hopping;
    return out.str();
}

Eigen::MatrixXd build_hopping_matrix(const LatticeSpec& spec) {
    spec.validate();
    const int ns = spec.num_sites();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(ns, ns);
    auto bond = [&](int a, int b) {
        h(a, b) = -spec.hopping;
        h(b, a) = -spec.hopping;
    };
    for (int jy = 1; jy <= spec.ly; ++jy) {
        for (int jx = 1; jx <= spec.lx; ++jx) {
            const int site = spec.site_index(jx, jy);
            if (jx < spec.lx) bond(site, spec.site_index(jx + 1, jy));
            if (jy < spec.ly) bond(site, spec.site_index(jx, jy + 1));
        }
    }
    return h;
}

SpectralData diagonalize(const Eigen::MatrixXd& hopping) {
    if (hopping.rows() != hopping.cols()) {
        throw std::invalid_argument("diagonalize: matrix is not square");
    }
    if (hopping.size() > 0 && (hopping - hopping.transpose()).cwiseAbs().maxCoeff() >
                                  1e-12 * std::max(1.0, hopping.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("diagonalize: matrix is not symmetric");
    }
    // SelfAdjointEigenSolver returns eigenvalues in ascending order.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hopping);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("diagonalize: symmetric eigensolver did not converge");
    }
    return SpectralData{solver.eigenvalues(), solver.eigenvectors()};
}

CdwPattern cdw_pattern(const LatticeSpec& spec) {
    spec.validate();
    if (spec.dimension == Dimension::TwoD && (spec.lx % 2 != 0 || spec.ly % 2 != 0)) {
        throw std::invalid_argument(
            "cdw_pattern: 2D checkerboard needs even Lx and Ly for half filling");
    }
    CdwPattern pattern;
    pattern.rich_sites.reserve(spec.num_sites() / 2);
    for (int jy = 1; jy <= spec.ly; ++jy) {
        for (int jx = 1; jx <= spec.lx; ++jx) {
            // 1D: even 1-based positions. 2D: jx + jy odd, i.e. (2,1),(1,2),...
            const bool rich = (spec.dimension == Dimension::OneD) ? (jx % 2 == 0)
                                                                   : ((jx + jy) % 2 == 1);
            if (rich) pattern.rich_sites.push_back(spec.site_index(jx, jy));
        }
    }
    return pattern;
}

SubsystemCut subsystem_cut(const LatticeSpec& spec) {
    spec.validate();
    if (spec.dimension == Dimension::TwoD && spec.lx % 2 != 0) {
        throw std::invalid_argument("subsystem_cut: 2D half cut needs even Lx");
    }
    SubsystemCut cut;
    cut.sites.reserve(spec.num_sites() / 2);
    for (int jy = 1; jy <= spec.ly; ++jy) {
        for (int jx = 1; jx <= spec.lx / 2; ++jx) {
            cut.sites.push_back(spec.site_index(jx, jy));
        }
    }
    std::sort(cut.sites.begin(), cut.sites.end());
    return cut;
}

}  // namespace bosonperm
