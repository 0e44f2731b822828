#pragma once

#include <complex>

#include <Eigen/Dense>

namespace adsholo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

} // namespace adsholo
