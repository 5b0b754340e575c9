// Copyright 2026 The qfluct Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QFLUCT_ERRORS_HPP
#define QFLUCT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qfluct {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  explicit NotHermitian(double defect)
      : Error("matrix is not Hermitian (max |M - M^dag| = " + std::to_string(defect) + ")"),
        defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

class NotUnitary : public Error {
 public:
  using Error::Error;
};

class AlphaOutOfBound : public Error {
 public:
  AlphaOutOfBound(double modulus, double bound)
      : Error("|alpha| = " + std::to_string(modulus) + " exceeds positivity bound " +
              std::to_string(bound)),
        modulus_(modulus),
        bound_(bound) {}
  double modulus() const noexcept { return modulus_; }
  double bound() const noexcept { return bound_; }

 private:
  double modulus_;
  double bound_;
};

class EnergyConservationViolated : public Error {
 public:
  explicit EnergyConservationViolated(double norm)
      : Error("propagator does not commute with H_A + H_B (max-norm " + std::to_string(norm) +
              ")"),
        norm_(norm) {}
  double norm() const noexcept { return norm_; }

 private:
  double norm_;
};

class UndefinedOnPath : public Error {
 public:
  using Error::Error;
};

class UnsnappableHeat : public Error {
 public:
  explicit UnsnappableHeat(double raw)
      : Error("path heat " + std::to_string(raw) + " peV is off the three-point support"),
        raw_(raw) {}
  double raw() const noexcept { return raw_; }

 private:
  double raw_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class InvalidSnapshot : public Error {
 public:
  InvalidSnapshot(std::size_t index, std::vector<std::string> violations)
      : Error(format(index, violations)), index_(index), violations_(std::move(violations)) {}
  std::size_t index() const noexcept { return index_; }
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string format(std::size_t index, const std::vector<std::string>& violations) {
    std::string msg = "snapshot " + std::to_string(index) + " invalid:";
    for (const auto& v : violations) msg += " " + v + ";";
    return msg;
  }
  std::size_t index_;
  std::vector<std::string> violations_;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace qfluct

#endif  // QFLUCT_ERRORS_HPP
