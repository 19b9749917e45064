#pragma once

#include <stdexcept>
#include <string>

namespace igkit {

// Every failure surfaced by the toolkit derives from this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace igkit
