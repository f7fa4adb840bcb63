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

#ifndef TOSCA_SRC_LEXER_HH_
#define TOSCA_SRC_LEXER_HH_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tosca::detail {

enum class TokenKind { kIdent, kInt, kPunct, kEnd };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

/// Splits `.bspl` / `.cupid` text into identifiers, integers and punctuation.
/// `//` starts a comment; `->` and the UTF-8 mapsto arrow are one token.
std::vector<Token> tokenize(std::string_view source);

/// Cursor over a token vector with the usual peek/expect helpers.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens);

  const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  bool at_end() const { return peek().kind == TokenKind::kEnd; }

  bool is_punct(std::string_view p, std::size_t ahead = 0) const;
  bool is_word(std::string_view w, std::size_t ahead = 0) const;
  bool accept_punct(std::string_view p);
  bool accept_word(std::string_view w);

  void expect_punct(std::string_view p);
  void expect_word(std::string_view w);
  std::string expect_ident(std::string_view what);
  long expect_int(std::string_view what);

  [[noreturn]] void fail(const std::string& message) const;
  [[noreturn]] void fail_at(const Token& at, const std::string& message) const;

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace tosca::detail

#endif  // TOSCA_SRC_LEXER_HH_
