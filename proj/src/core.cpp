#include "cosmea/core.hpp"

#include <Eigen/SVD>

#include "cosmea/lp.hpp"

namespace cosmea {

VectorSet::VectorSet(Eigen::MatrixXd unit_columns, std::vector<std::string> labels,
                     const Tolerances& tol)
    : mat_(std::move(unit_columns)), labels_(std::move(labels)) {
    tol.validate();
    if (mat_.rows() < 1 || mat_.cols() < 1)
        throw Error("VectorSet: need dim >= 1 and at least one vector");
    if (!labels_.empty() && static_cast<int>(labels_.size()) != mat_.cols())
        throw Error("VectorSet: label count does not match vector count");
    for (int j = 0; j < mat_.cols(); ++j) {
        double nrm = mat_.col(j).norm();
        if (nrm <= tol.rank_tol)
            throw ZeroVectorError("VectorSet: column " + std::to_string(j) + " is zero");
        if (std::abs(nrm - 1.0) > tol.unit_tol)
            throw Error("VectorSet: column " + std::to_string(j) +
                        " is not unit within unit_tol (norm = " + std::to_string(nrm) + ")");
    }
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::exact: return "exact";
        case SolveStatus::heuristic: return "heuristic";
        case SolveStatus::timeout_incumbent: return "timeout_incumbent";
    }
    return "?";
}

VectorSet normalize_set(const Eigen::MatrixXd& raw, const Tolerances& tol) {
    tol.validate();
    if (raw.rows() < 1 || raw.cols() < 1)
        throw Error("normalize_set: need dim >= 1 and at least one vector");
    Eigen::MatrixXd out(raw.rows(), raw.cols());
    for (int j = 0; j < raw.cols(); ++j) {
        double nrm = raw.col(j).norm();
        if (nrm <= tol.rank_tol)
            throw ZeroVectorError("normalize_set: column " + std::to_string(j) +
                                  " has norm " + std::to_string(nrm));
        out.col(j) = raw.col(j) / nrm;
    }
    return VectorSet(std::move(out), {}, tol);
}

Eigen::MatrixXd gram_matrix(const VectorSet& s, const std::vector<int>& indices) {
    const int m = static_cast<int>(indices.size());
    Eigen::MatrixXd sub(s.dim(), m);
    for (int j = 0; j < m; ++j) {
        int idx = indices[j];
        if (idx < 0 || idx >= s.size())
            throw Error("gram_matrix: index out of range");
        sub.col(j) = s.vector(idx);
    }
    return sub.transpose() * sub;
}

GramInfo gram_vector(const VectorSet& s, const std::vector<int>& basis_indices,
                     const Tolerances& tol) {
    const int n = s.dim();
    if (static_cast<int>(basis_indices.size()) != n)
        throw Error("gram_vector: basis must contain exactly dim indices");
    Eigen::MatrixXd basis(n, n);
    for (int j = 0; j < n; ++j) {
        int idx = basis_indices[j];
        if (idx < 0 || idx >= s.size())
            throw Error("gram_vector: index out of range");
        basis.col(j) = s.vector(idx);
    }
    // One SVD provides both the rank test and a stable solve of B^T w = e.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis.transpose(),
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    if (sigma(n - 1) <= tol.rank_tol * sigma(0))
        throw SingularBasisError("gram_vector: indexed vectors are rank-deficient");
    Eigen::VectorXd w = svd.solve(Eigen::VectorXd::Ones(n));
    double wn = w.norm();
    if (wn <= tol.rank_tol)
        throw SingularBasisError("gram_vector: degenerate solution");
    GramInfo info;
    info.basis_indices = basis_indices;
    info.gram_vector = w / wn;
    info.gram_value = 1.0 / wn;
    return info;
}

Eigen::MatrixXd rank1_update_inverse(const Eigen::MatrixXd& a_inv,
                                     const Eigen::VectorXd& u,
                                     const Eigen::VectorXd& v,
                                     const Tolerances& tol) {
    Eigen::VectorXd au = a_inv * u;
    double denom = 1.0 + v.dot(au);
    if (std::abs(denom) <= tol.rank_tol)
        throw UpdateSingularError("rank1_update_inverse: 1 + v^T A^{-1} u vanishes");
    Eigen::VectorXd va = a_inv.transpose() * v;  // (v^T A^{-1})^T
    return a_inv - (au * va.transpose()) / denom;
}

std::vector<int> cone_violators(const VectorSet& s, const Eigen::VectorXd& y,
                                double alpha, const Tolerances& tol) {
    if (std::abs(y.norm() - 1.0) > tol.unit_tol)
        throw Error("cone_violators: y must be a unit vector");
    std::vector<int> out;
    Eigen::VectorXd dots = s.matrix().transpose() * y;
    for (int i = 0; i < s.size(); ++i)
        if (dots(i) > alpha + tol.cone_tol) out.push_back(i);
    return out;
}

CosineAlong cosine_along(const VectorSet& s, const Eigen::VectorXd& v,
                         const Tolerances& tol) {
    if (std::abs(v.norm() - 1.0) > tol.unit_tol)
        throw Error("cosine_along: v must be a unit vector");
    Eigen::VectorXd dots = s.matrix().transpose() * v;
    CosineAlong out;
    out.value = dots.maxCoeff();
    for (int i = 0; i < s.size(); ++i)
        if (dots(i) >= out.value - tol.eq_tol) out.active.push_back(i);
    return out;
}

bool is_positive_spanning(const VectorSet& s, const Tolerances& tol) {
    const int n = s.dim();
    const int k = s.size();
    if (k < n + 1) return false;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.matrix());
    const auto& sigma = svd.singularValues();
    if (sigma(n - 1) <= tol.rank_tol * sigma(0)) return false;
    // S lambda = 0 with lambda >= 1, via mu = lambda - 1 >= 0.
    Eigen::VectorXd rhs = -s.matrix() * Eigen::VectorXd::Ones(k);
    return lp::equality_system_feasible(s.matrix(), rhs, tol.eq_tol);
}

}  // namespace cosmea
