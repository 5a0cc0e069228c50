// Copyright 2026 The wmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WMC_COMMON_HPP
#define WMC_COMMON_HPP

#include <complex>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace wmc {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr cplx kI{0.0, 1.0};

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A size limit was exceeded (partition ground set, memory budget, series order).
class SizeError : public Error {
  public:
    using Error::Error;
};

/// An argument violated a documented precondition.
class ArgumentError : public Error {
  public:
    using Error::Error;
};

/// The post-selection amplitude (or post-selected norm) is too small to divide by.
class DegeneratePostselectionError : public Error {
  public:
    DegeneratePostselectionError(const std::string &what, double magnitude)
        : Error(what + " (|amplitude| = " + format(magnitude) + ")"), magnitude_(magnitude) {
    }
    double magnitude() const {
        return magnitude_;
    }

  private:
    static std::string format(double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", x);
        return buf;
    }
    double magnitude_;
};

/// The generalised lowering operator is undefined because xi_q vanishes.
class SingularEtaError : public Error {
  public:
    using Error::Error;
};

}  // namespace wmc

#endif  // WMC_COMMON_HPP
