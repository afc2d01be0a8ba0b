#ifndef DEGEN_ICP_TYPES_HPP
#define DEGEN_ICP_TYPES_HPP

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace degen_icp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat4 = Eigen::Matrix4d;

enum class Errc {
  TooFewPoints,
  DegenerateNeighborhood,
  EmptyFeatureSet,
  NotUnitLength,
  SingularHessian,
  NoCorrespondences,
  InvalidDimensions,
  RequiresDegenerateScene,
  InvalidArgument,
  Io,
  Parse,
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::DegenerateNeighborhood: return "DegenerateNeighborhood";
    case Errc::EmptyFeatureSet: return "EmptyFeatureSet";
    case Errc::NotUnitLength: return "NotUnitLength";
    case Errc::SingularHessian: return "SingularHessian";
    case Errc::NoCorrespondences: return "NoCorrespondences";
    case Errc::InvalidDimensions: return "InvalidDimensions";
    case Errc::RequiresDegenerateScene: return "RequiresDegenerateScene";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
    case Errc::Parse: return "Parse";
  }
  return "Unknown";
}

/// Library error. Every throw site in degen_icp raises this type, so callers
/// can branch on code() instead of parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace degen_icp

#endif  // DEGEN_ICP_TYPES_HPP
