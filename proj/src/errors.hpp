#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ndcglab {

// Error categories; the C API and CLI map these onto stable numeric codes.
enum class Errc {
  invalid_argument,
  config,
  assumption_violated,
  io,
  degenerate_dataset,
  resource,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool ok, Errc code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

}  // namespace ndcglab
