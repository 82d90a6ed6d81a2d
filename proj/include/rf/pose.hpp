#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>

namespace rf {

/// Rigid-body transform: x -> R x + t. Rotation stored as an orthonormal
/// matrix; optimiser increments use the se(3) tangent [omega; nu].
template <typename S>
class PoseT {
 public:
  using Mat3 = Eigen::Matrix<S, 3, 3>;
  using Vec3 = Eigen::Matrix<S, 3, 1>;
  using Vec6 = Eigen::Matrix<S, 6, 1>;
  using Mat34 = Eigen::Matrix<S, 3, 4>;

  PoseT() : R_(Mat3::Identity()), t_(Vec3::Zero()) {}
  PoseT(const Mat3& R, const Vec3& t) : R_(R), t_(t) {}

  static PoseT Identity() { return PoseT(); }

  const Mat3& rotation() const { return R_; }
  const Vec3& translation() const { return t_; }
  Vec3& translation() { return t_; }

  Vec3 apply(const Vec3& x) const { return R_ * x + t_; }

  PoseT compose(const PoseT& o) const { return PoseT(R_ * o.R_, R_ * o.t_ + t_); }

  PoseT inverse() const {
    Mat3 Rt = R_.transpose();
    return PoseT(Rt, -(Rt * t_));
  }

  static Mat3 hat(const Vec3& w) {
    Mat3 W;
    W << S(0), -w.z(), w.y(), w.z(), S(0), -w.x(), -w.y(), w.x(), S(0);
    return W;
  }

  /// SE(3) exponential of tau = [omega; nu].
  static PoseT exp(const Vec6& tau) {
    const Vec3 w = tau.template head<3>();
    const Vec3 v = tau.template tail<3>();
    const S theta = w.norm();
    Mat3 W = hat(w);
    Mat3 R, V;
    if (theta < S(1e-8)) {
      R = Mat3::Identity() + W + S(0.5) * W * W;
      V = Mat3::Identity() + S(0.5) * W + W * W / S(6);
    } else {
      const S s = std::sin(theta), c = std::cos(theta);
      R = Mat3::Identity() + (s / theta) * W + ((S(1) - c) / (theta * theta)) * W * W;
      V = Mat3::Identity() + ((S(1) - c) / (theta * theta)) * W + ((theta - s) / (theta * theta * theta)) * W * W;
    }
    return PoseT(R, V * v);
  }

  /// SE(3) logarithm; inverse of exp for theta < pi.
  Vec6 log() const {
    Vec3 w = logRotation(R_);
    const S theta = w.norm();
    Mat3 W = hat(w);
    Mat3 Vinv;
    if (theta < S(1e-8)) {
      Vinv = Mat3::Identity() - S(0.5) * W + W * W / S(12);
    } else {
      const S half = theta / S(2);
      const S cot = half / std::tan(half);
      Vinv = Mat3::Identity() - S(0.5) * W + ((S(1) - cot) / (theta * theta)) * W * W;
    }
    Vec6 tau;
    tau.template head<3>() = w;
    tau.template tail<3>() = Vinv * t_;
    return tau;
  }

  static Vec3 logRotation(const Mat3& R) {
    const S tr = R.trace();
    const S cosTheta = std::clamp((tr - S(1)) / S(2), S(-1), S(1));
    const S theta = std::acos(cosTheta);
    Vec3 axis(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
    if (theta < S(1e-6)) return axis / S(2);
    if (theta > S(M_PI) - S(1e-4)) {
      // near pi the skew part degenerates; recover the axis from R + I
      Mat3 A = R + Mat3::Identity();
      int c = 0;
      A.colwise().norm().maxCoeff(&c);
      Vec3 a = A.col(c).normalized();
      // sign from the (unreliable but nonzero) skew part when possible
      if (axis.dot(a) < S(0)) a = -a;
      return a * theta;
    }
    return axis * (theta / (S(2) * std::sin(theta)));
  }

  /// Re-orthonormalise the rotation (drift control after long compositions).
  void orthonormalize() {
    Eigen::JacobiSVD<Mat3> svd(R_, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 R = svd.matrixU() * svd.matrixV().transpose();
    if (R.determinant() < S(0)) {
      Mat3 D = Mat3::Identity();
      D(2, 2) = S(-1);
      R = svd.matrixU() * D * svd.matrixV().transpose();
    }
    R_ = R;
  }

  Mat34 matrix34() const {
    Mat34 m;
    m.template leftCols<3>() = R_;
    m.col(3) = t_;
    return m;
  }

  static PoseT fromMatrix34(const Mat34& m) { return PoseT(m.template leftCols<3>(), m.col(3)); }

  template <typename T>
  PoseT<T> cast() const {
    return PoseT<T>(R_.template cast<T>(), t_.template cast<T>());
  }

 private:
  Mat3 R_;
  Vec3 t_;
};

template <typename S>
inline PoseT<S> operator*(const PoseT<S>& a, const PoseT<S>& b) {
  return a.compose(b);
}

using Pose = PoseT<float>;
using Posed = PoseT<double>;

}  // namespace rf
