#ifndef SSB_LINALG_HPP
#define SSB_LINALG_HPP

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "ssb/dual.hpp"
#include "ssb/errors.hpp"

namespace ssb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

template <class T>
using VecT = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <class T>
using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

/// LDLᵀ factorization (symmetric pivoting) of a matrix that must be SPD.
class SpdFactor {
public:
    explicit SpdFactor(const Mat& a) : ldlt_(a) {
        if (ldlt_.info() != Eigen::Success || !ldlt_.isPositive())
            throw geometry_error("matrix is not symmetric positive definite");
        const auto d = ldlt_.vectorD();
        for (Eigen::Index i = 0; i < d.size(); ++i)
            if (!(d(i) > 0.0) || !std::isfinite(d(i)))
                throw geometry_error("matrix is not symmetric positive definite");
    }

    Mat inverse() const { return ldlt_.solve(Mat::Identity(size(), size())); }
    Vec solve(const Vec& b) const { return ldlt_.solve(b); }
    double determinant() const { return ldlt_.vectorD().prod(); }
    Eigen::Index size() const { return ldlt_.rows(); }

private:
    Eigen::LDLT<Mat> ldlt_;
};

inline bool is_spd(const Mat& a, double symmetry_tol = 1e-12) {
    if (a.rows() != a.cols() || a.rows() == 0) return false;
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > symmetry_tol * (1.0 + a.cwiseAbs().maxCoeff()))
        return false;
    Eigen::LLT<Mat> llt(a);
    return llt.info() == Eigen::Success;
}

/// Real part of a jet-valued matrix.
template <class T>
Mat values_of(const MatT<T>& a) {
    Mat out(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out(i, j) = value_of(a(i, j));
    return out;
}

} // namespace ssb

#endif // SSB_LINALG_HPP
