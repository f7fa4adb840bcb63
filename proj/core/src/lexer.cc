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

#include "lexer.hh"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <limits>

#include <fmt/format.h>

#include "tosca/error.hh"

namespace tosca::detail {

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

constexpr std::string_view kMapsTo = "\xE2\x86\xA6";

// Set-operator glyphs accepted as spellings of the event operators.
struct Glyph {
  std::string_view bytes;
  std::string_view word;
};
constexpr Glyph kGlyphs[] = {{"\xE2\x8A\x93", "and"},
                             {"\xE2\x8A\x94", "or"},
                             {"\xE2\x8A\x96", "except"}};

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t i = 0;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++col;
      }
      ++i;
    }
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == '\n' || std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token tok{TokenKind::kPunct, "", line, col};
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      tok.kind = TokenKind::kIdent;
      tok.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
        ++j;
      tok.kind = TokenKind::kInt;
      tok.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (src.substr(i, 2) == "->") {
      tok.text = "->";
      advance(2);
    } else if (src.substr(i, kMapsTo.size()) == kMapsTo) {
      tok.text = "->";
      advance(kMapsTo.size());
    } else if (auto g = std::find_if(
                   std::begin(kGlyphs), std::end(kGlyphs),
                   [&](const Glyph& gl) {
                     return src.substr(i, gl.bytes.size()) == gl.bytes;
                   });
               g != std::end(kGlyphs)) {
      tok.kind = TokenKind::kIdent;
      tok.text = std::string(g->word);
      advance(g->bytes.size());
    } else if (std::string_view("{}[](),:+-").find(c) != std::string_view::npos) {
      tok.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError(fmt::format("unexpected character '{}'", c), line, col);
    }
    out.push_back(std::move(tok));
  }
  out.push_back(Token{TokenKind::kEnd, "", line, col});
  return out;
}

TokenStream::TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

const Token& TokenStream::peek(std::size_t ahead) const {
  std::size_t at = pos_ + ahead;
  return at < tokens_.size() ? tokens_[at] : tokens_.back();
}

const Token& TokenStream::next() {
  const Token& t = peek();
  if (pos_ + 1 < tokens_.size()) ++pos_;
  return t;
}

bool TokenStream::is_punct(std::string_view p, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == TokenKind::kPunct && t.text == p;
}

bool TokenStream::is_word(std::string_view w, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == TokenKind::kIdent && t.text == w;
}

bool TokenStream::accept_punct(std::string_view p) {
  if (!is_punct(p)) return false;
  next();
  return true;
}

bool TokenStream::accept_word(std::string_view w) {
  if (!is_word(w)) return false;
  next();
  return true;
}

void TokenStream::expect_punct(std::string_view p) {
  if (!accept_punct(p)) fail(fmt::format("expected '{}'", p));
}

void TokenStream::expect_word(std::string_view w) {
  if (!accept_word(w)) fail(fmt::format("expected '{}'", w));
}

std::string TokenStream::expect_ident(std::string_view what) {
  if (peek().kind != TokenKind::kIdent) fail(fmt::format("expected {}", what));
  return next().text;
}

long TokenStream::expect_int(std::string_view what) {
  if (peek().kind != TokenKind::kInt) fail(fmt::format("expected {}", what));
  const Token& t = next();
  try {
    return std::stol(t.text);
  } catch (const std::out_of_range&) {
    fail_at(t, "integer out of range");
  }
}

void TokenStream::fail(const std::string& message) const {
  fail_at(peek(), message);
}

void TokenStream::fail_at(const Token& at, const std::string& message) const {
  std::string found = at.kind == TokenKind::kEnd ? "end of input"
                                                 : fmt::format("'{}'", at.text);
  throw ParseError(fmt::format("{}, found {}", message, found), at.line,
                   at.column);
}

}  // namespace tosca::detail
