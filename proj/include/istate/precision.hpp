#pragma once

// Extended-precision scalars for the few places where double loses too many
// digits to cancellation (alternating closed-form brackets, Cauchy products).

#include <complex>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

namespace istate {

using ext_real = boost::multiprecision::cpp_bin_float_50;
using ext_complex = boost::multiprecision::cpp_complex_50;

inline ext_complex to_ext(std::complex<double> z) { return ext_complex(ext_real(z.real()), ext_real(z.imag())); }

inline std::complex<double> to_double(const ext_complex& z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

}  // namespace istate
