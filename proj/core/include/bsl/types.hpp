#pragma once

#include <Eigen/Dense>

namespace bsl {

using ParameterVector = Eigen::VectorXd;
using SummaryVector = Eigen::VectorXd;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline bool all_finite(const Eigen::Ref<const Eigen::VectorXd>& v) {
    return v.allFinite();
}

}  // namespace bsl
