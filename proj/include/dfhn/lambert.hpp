#pragma once

#include <complex>

#include "dfhn/errors.hpp"

namespace dfhn {

/// Branch k of the Lambert W function: w e^w = z, standard branch cuts.
/// Halley iteration from branch-specific asymptotic seeds; relative residual 1e-13.
std::complex<double> lambert_w(int k, std::complex<double> z);

} // namespace dfhn
