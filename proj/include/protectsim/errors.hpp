#pragma once

#include <stdexcept>
#include <string>

namespace protectsim {

// Base for every error the library raises on purpose. The CLI maps the three
// families onto exit codes 2 (config), 3 (physics validation), 4 (numeric).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
  virtual int exit_code() const noexcept = 0;
};

// Malformed or inconsistent inputs: bad labels, dimension mismatches, bad flags.
class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config"; }
  int exit_code() const noexcept override { return 2; }
};

// Inputs that are well-formed but violate a physical precondition.
class PhysicsError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "physics"; }
  int exit_code() const noexcept override { return 3; }
};

// A degenerate energy gap with a nonzero coupling across it: the perturbative
// picture (and protection) breaks down.
class DegeneracyError : public PhysicsError {
 public:
  DegeneracyError(const std::string& what, double gap, double element)
      : PhysicsError(what), gap_(gap), element_(element) {}
  const char* kind() const noexcept override { return "degeneracy"; }
  double gap() const noexcept { return gap_; }
  double matrix_element() const noexcept { return element_; }

 private:
  double gap_;
  double element_;
};

// Loss of accuracy: eigensolver failure, norm drift, non-Hermitian residue.
class NumericError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numeric"; }
  int exit_code() const noexcept override { return 4; }
};

}  // namespace protectsim
