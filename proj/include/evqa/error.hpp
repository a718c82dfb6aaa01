// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVQA_ERROR_HPP
#define EVQA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace evqa {

// Error with a stable machine-readable code; the CLI and server surface the
// code verbatim.
class EvalError : public std::runtime_error {
 public:
  EvalError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

}  // namespace evqa

#endif  // EVQA_ERROR_HPP
