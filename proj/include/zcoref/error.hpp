#ifndef ZCOREF_ERROR_HPP
#define ZCOREF_ERROR_HPP

#include <stdexcept>
#include <string>

namespace zcoref {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace zcoref

#endif
