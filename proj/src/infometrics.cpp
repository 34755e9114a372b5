#include "binspec/infometrics.hpp"

#include <cmath>
#include <sstream>

#include "binspec/errors.hpp"
#include "binspec/linalg.hpp"

namespace binspec {

Eigen::MatrixXd fisher_quantized(const AuxMoments& aux) {
    if (aux.cov.size() == 0) throw ValidationError("fisher_quantized: covariance not assembled");
    const auto llt = factorize_spd(aux.cov, "reduced-statistics covariance");
    const Eigen::MatrixXd whitened = llt.matrixL().solve(aux.jac);
    Eigen::MatrixXd f = whitened.transpose() * whitened;
    return 0.5 * (f + f.transpose());
}

Eigen::MatrixXd fisher_quantized(const Scenario& scn, const ParamVector& theta,
                                 const AuxOptions& opt) {
    AuxOptions with_cov = opt;
    with_cov.with_cov = true;
    return fisher_quantized(compute_aux_moments(scn, theta, with_cov));
}

Eigen::MatrixXd fisher_ideal(const Scenario& scn, const ParamVector& theta, NoiseHandling noise) {
    const ModelMatrices mm = ModelMatrices::build(scn, theta);
    std::vector<Eigen::MatrixXd> derivs = mm.dry;
    if (noise == NoiseHandling::joint) derivs.push_back(mm.sigma_noise);

    const auto llt = factorize_spd(mm.ry, "R_y");
    std::vector<Eigen::MatrixXd> a;  // R^{-1} dR
    a.reserve(derivs.size());
    for (const auto& dr : derivs) a.push_back(llt.solve(dr));

    const auto P = static_cast<Eigen::Index>(a.size());
    Eigen::MatrixXd f(P, P);
    for (Eigen::Index p = 0; p < P; ++p) {
        for (Eigen::Index q = p; q < P; ++q) {
            // tr(A_p A_q) = sum_ij A_p(i,j) A_q(j,i)
            const double tr = a[static_cast<std::size_t>(p)]
                                  .cwiseProduct(a[static_cast<std::size_t>(q)].transpose())
                                  .sum();
            f(p, q) = f(q, p) = 0.5 * tr;
        }
    }
    return f;
}

Eigen::VectorXd info_loss(const Eigen::MatrixXd& f_ideal, const Eigen::MatrixXd& f_quant) {
    const Eigen::VectorXd ideal = spd_inverse_diagonal(f_ideal, "ideal Fisher matrix");
    const Eigen::VectorXd quant = spd_inverse_diagonal(f_quant, "quantized Fisher matrix");
    const Eigen::Index D = quant.size();
    if (ideal.size() < D) throw ValidationError("info_loss: Fisher matrix sizes do not match");
    return ideal.head(D).cwiseQuotient(quant);
}

Eigen::VectorXd info_loss(const Scenario& scn, const ParamVector& theta) {
    return info_loss(fisher_ideal(scn, theta), fisher_quantized(scn, theta));
}

Eigen::VectorXd predict_sigma(const Eigen::MatrixXd& fisher, const ParamVector& theta,
                              std::size_t N) {
    if (N < 1) throw ValidationError("predict_sigma: N must be at least 1");
    const Eigen::VectorXd inv_diag = spd_inverse_diagonal(fisher, "Fisher matrix");
    const Eigen::Index D = static_cast<Eigen::Index>(theta.sources());
    if (inv_diag.size() < D) throw ValidationError("predict_sigma: Fisher matrix too small");
    Eigen::VectorXd out(D);
    for (Eigen::Index d = 0; d < D; ++d)
        out[d] = std::sqrt(inv_diag[d] / static_cast<double>(N)) /
                 theta.source(static_cast<std::size_t>(d));
    return out;
}

FisherReport fisher_report(const Scenario& scn, const ParamVector& theta, std::size_t N,
                           const AuxOptions& opt) {
    FisherReport r;
    r.f_quant = fisher_quantized(scn, theta, opt);
    r.f_ideal = fisher_ideal(scn, theta);
    r.loss = info_loss(r.f_ideal, r.f_quant);
    r.loss_db = r.loss.unaryExpr([](double v) { return linear_to_db(v); });
    r.crb_sigma_quant = predict_sigma(r.f_quant, theta, N);
    r.crb_sigma_ideal = predict_sigma(r.f_ideal, theta, N);
    return r;
}

}  // namespace binspec
