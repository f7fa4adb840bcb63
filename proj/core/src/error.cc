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

#include "tosca/error.hh"

#include <fmt/format.h>

namespace tosca {

ParseError::ParseError(const std::string& message, std::size_t line,
                       std::size_t column)
    : Error(fmt::format("{}:{}: {}", line, column, message)),
      detail_(message),
      line_(line),
      column_(column) {}

ScriptedMoveNotEnabled::ScriptedMoveNotEnabled(const std::string& message,
                                               long tick)
    : Error(fmt::format("tick {}: {}", tick, message)), tick_(tick) {}

}  // namespace tosca
