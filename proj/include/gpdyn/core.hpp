#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gpdyn {

using Elem = std::uint32_t;    // group element index
using Object = std::uint32_t;  // groupoid object / base vertex
using Arrow = std::uint32_t;   // groupoid arrow
using Dart = std::uint32_t;    // directed half-edge of a base graph
using Point = std::uint32_t;   // point of a finite space

using Vertex = Object;

// Thrown when an operation's precondition is violated by its input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Verdict { pass, axiom_failure, structural_error };

// Outcome of a verify_* routine: pass, or the first violated check with a
// witness tuple (indices whose meaning depends on the check).
struct Diagnostics {
  Verdict verdict = Verdict::pass;
  std::string check;
  std::string message;
  std::vector<std::size_t> witness;

  bool ok() const { return verdict == Verdict::pass; }
  explicit operator bool() const { return ok(); }

  static Diagnostics passed() { return {}; }

  static Diagnostics fail(std::string check, std::string message,
                          std::vector<std::size_t> witness = {}) {
    return {Verdict::axiom_failure, std::move(check), std::move(message),
            std::move(witness)};
  }

  static Diagnostics structural(std::string check, std::string message,
                                std::vector<std::size_t> witness = {}) {
    return {Verdict::structural_error, std::move(check), std::move(message),
            std::move(witness)};
  }
};

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::axiom_failure:
      return "fail";
    case Verdict::structural_error:
      return "structural_error";
  }
  return "unknown";
}

namespace detail {

inline std::string str(std::size_t v) { return std::to_string(v); }

template <typename... Ts>
std::string cat(const Ts&... parts) {
  std::string out;
  ((out += parts), ...);
  return out;
}

}  // namespace detail
}  // namespace gpdyn
