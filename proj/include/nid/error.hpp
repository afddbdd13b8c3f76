// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <stdexcept>
#include <string>

namespace nid {

// Raised for invalid input data and violated preconditions. Statistical
// warnings (e.g. an unconverged chain) are reported as flags, never thrown.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nid
