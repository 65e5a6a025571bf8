/*
 * Copyright 2026 The GraphTreeGen Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace gtg {

/// Error categories raised by the core library. The C API maps each kind onto
/// a stable status code (see gtg.h).
enum class ErrorKind {
  InvalidArgument,
  Parse,          // malformed CSV / JSON
  InvalidGraph,   // graph invariant violated on load
  ShapeMismatch,
  MTooLarge,
  TooFewSamples,
  EmptyMask,
  NonFinite,      // NaN/Inf produced by a forward op
  NonScalarLoss,
  DoubleBackward,
  NonFiniteGradient,
  NoConvergence,
  SingularMatrix,
  AlphaTooLarge,
  Config,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace gtg
