#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace pfopt {

/* Base class for every error the library raises on purpose. */
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/* A caller-supplied value violates a precondition (non-finite input,
 * empty sample set, malformed index, ...). */
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/* Input data carries no usable signal (e.g. every sample identical, so the
 * per-coordinate scale is exactly zero and standardization is impossible). */
class DegenerateData : public Error {
 public:
  using Error::Error;
};

/* File could not be read, written, or renamed. */
class IoError : public Error {
 public:
  using Error::Error;
};

/* Config-file syntax or schema violation; `where` names the offending field. */
class ParseError : public Error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : Error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/* The damped normal equations could not be solved even after the ridge
 * retry.  Carries the parameter vector the caller should fall back to
 * (a zero step), so the optimizer can keep the particle alive. */
class SingularSystem : public Error {
 public:
  SingularSystem(const std::string& what, Eigen::VectorXd fallback)
      : Error(what), fallback_(std::move(fallback)) {}
  const Eigen::VectorXd& fallback() const { return fallback_; }

 private:
  Eigen::VectorXd fallback_;
};

}  // namespace pfopt
