#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace sizegs {

enum class ErrorKind {
  malformed_input,    // unparseable file content
  schema_error,       // schema/file disagreement or missing channels
  invalid_input,      // precondition violation on in-memory data
  invalid_budget,     // budget cannot be met or would empty the model
  invalid_partition,  // partition constraints violated
  infeasible,         // solver floor exceeds the budget
  corrupt_container,  // container fails structural or checksum validation
  io_error,           // filesystem failure
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::malformed_input: return "malformed-input";
    case ErrorKind::schema_error: return "schema-error";
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::invalid_budget: return "invalid-budget";
    case ErrorKind::invalid_partition: return "invalid-partition";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::corrupt_container: return "corrupt-container";
    case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace sizegs
