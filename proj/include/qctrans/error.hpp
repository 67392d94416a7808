#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qct {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Out-of-range or non-finite parameter handed to a pure evaluation routine.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Base for errors raised while evaluating a field at a point. The integrators
// treat these as recoverable and retry with a smaller step.
class FieldError : public Error {
 public:
  FieldError(const std::string& what, std::vector<double> point, double t)
      : Error(what + " at " + format_point(point, t)), point_(std::move(point)), t_(t) {}

  const std::vector<double>& point() const noexcept { return point_; }
  double time() const noexcept { return t_; }

  static std::string format_point(const std::vector<double>& p, double t) {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
    os << "), t=" << t;
    return os.str();
  }

 private:
  std::vector<double> point_;
  double t_;
};

// Evaluation on a declared singular set (nodal point, symmetry axis, r = 0).
class SingularityError : public FieldError {
 public:
  using FieldError::FieldError;
};

// Density fell below the stencil's node guard.
class NodeProximityError : public FieldError {
 public:
  NodeProximityError(std::vector<double> point, double t, double density)
      : FieldError("density " + std::to_string(density) + " below node guard", std::move(point), t),
        density_(density) {}
  double density() const noexcept { return density_; }

 private:
  double density_;
};

// Scenario or sampler configuration problem. `path` is the dotted field path
// (e.g. "coupling.sigma"); line/column are set for syntax errors.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what, int line = 0, int column = 0)
      : Error(compose(path, what, line, column)), path_(std::move(path)), line_(line), column_(column) {}

  const std::string& path() const noexcept { return path_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string compose(const std::string& path, const std::string& what, int line, int column) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ", column " + std::to_string(column) + ": ";
    if (!path.empty()) out += path + ": ";
    return out + what;
  }

  std::string path_;
  int line_;
  int column_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

template <class Point>
std::vector<double> to_std_vector(const Point& p) {
  return std::vector<double>(p.begin(), p.end());
}

}  // namespace qct
