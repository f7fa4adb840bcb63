/*
 * Copyright (c) 2026, The Tosca Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TOSCA_ERROR_HH_
#define TOSCA_ERROR_HH_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tosca {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax fault in a `.bspl` or `.cupid` source, with a 1-based position.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string detail_;
  std::size_t line_;
  std::size_t column_;
};

/// A protocol or commitment that parses but violates a structural condition.
class WellFormednessError : public Error {
 public:
  using Error::Error;
};

class UnresolvedReference : public Error {
 public:
  using Error::Error;
};

class CyclicReference : public Error {
 public:
  using Error::Error;
};

class UnknownCommitmentReference : public Error {
 public:
  using Error::Error;
};

class UnknownBaseEvent : public Error {
 public:
  using Error::Error;
};

class UnknownMessage : public Error {
 public:
  using Error::Error;
};

class NameClash : public Error {
 public:
  using Error::Error;
};

class UnknownForwardName : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

class ScriptedMoveNotEnabled : public Error {
 public:
  ScriptedMoveNotEnabled(const std::string& message, long tick);
  long tick() const { return tick_; }

 private:
  long tick_;
};

}  // namespace tosca

#endif  // TOSCA_ERROR_HH_
