#include "binspec/linalg.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "binspec/errors.hpp"

namespace binspec {

Eigen::LLT<Eigen::MatrixXd> factorize_spd(const Eigen::MatrixXd& a, std::string_view what) {
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) return llt;
    const double ridge = 1e-10 * a.trace() / static_cast<double>(a.rows());
    Eigen::MatrixXd shifted = a;
    shifted.diagonal().array() += ridge;
    llt.compute(shifted);
    if (llt.info() != Eigen::Success)
        throw NumericalError(std::string(what) + ": Cholesky factorization failed after ridge");
    return llt;
}

namespace {

void check_nonsingular(const Eigen::MatrixXd& a, std::string_view what) {
    if (a.rows() == 0) throw SingularFisherError(std::string(what) + ": empty matrix");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double largest = ev.cwiseAbs().maxCoeff();
    if (!std::isfinite(largest) || ev[0] <= 1e-12 * largest) {
        std::ostringstream msg;
        msg << what << ": matrix is singular or indefinite (eigenvalues " << ev[0] << " .. "
            << ev[ev.size() - 1] << ")";
        throw SingularFisherError(msg.str());
    }
}

}  // namespace

Eigen::VectorXd spd_inverse_diagonal(const Eigen::MatrixXd& a, std::string_view what) {
    check_nonsingular(a, what);
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success)
        throw SingularFisherError(std::string(what) + ": not positive definite");
    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
    return inv.diagonal();
}

Eigen::VectorXd spd_solve_checked(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                  std::string_view what) {
    check_nonsingular(a, what);
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success)
        throw SingularFisherError(std::string(what) + ": not positive definite");
    return llt.solve(b);
}

}  // namespace binspec
