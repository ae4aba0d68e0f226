#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace softucb {

// K feature vectors in d dimensions defining one bandit instance.
// Rows are arms.
class ArmSet {
public:
    explicit ArmSet(Eigen::MatrixXd features) : features_(std::move(features)) {
        if (features_.rows() < 2) throw std::invalid_argument("ArmSet: need at least 2 arms");
        if (features_.cols() < 1) throw std::invalid_argument("ArmSet: dimension must be >= 1");
        if (!features_.allFinite()) throw std::invalid_argument("ArmSet: non-finite feature");
    }

    int count() const { return static_cast<int>(features_.rows()); }
    int dimension() const { return static_cast<int>(features_.cols()); }
    const Eigen::MatrixXd& features() const { return features_; }
    Eigen::VectorXd feature(int arm) const { return features_.row(arm); }

private:
    Eigen::MatrixXd features_;
};

}  // namespace softucb
