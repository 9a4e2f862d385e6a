#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace msi {

using Complex = std::complex<double>;
using ComplexList = std::vector<Complex>;

}  // namespace msi
