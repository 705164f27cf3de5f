// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

// Heuristic function extraction. The source is first masked (comments,
// literals and preprocessor lines become spaces, newlines are kept), then a
// brace scanner classifies the text preceding each '{' as a function
// signature, a container scope (namespace/class/struct/extern) or anything
// else (initializers, enums), which is skipped.

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clonefuse/corpus.hpp"
#include "clonefuse/error.hpp"
#include "text_util.hpp"

namespace clonefuse {
namespace {

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool space_char(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string mask_source(std::string_view src, Language lang) {
  std::string out(src);
  const bool c_family = lang == Language::kC || lang == Language::kCpp;
  const std::size_t n = src.size();
  auto blank = [&](std::size_t i) {
    if (out[i] != '\n') out[i] = ' ';
  };
  bool line_start = true;  // only whitespace seen since the last newline
  std::size_t i = 0;
  while (i < n) {
    const char c = src[i];
    if (c == '\n') {
      line_start = true;
      ++i;
      continue;
    }
    if (c_family && line_start && c == '#') {
      // directive, including backslash continuations
      while (i < n) {
        if (src[i] == '\n') {
          std::size_t k = i;
          while (k > 0 && (src[k - 1] == '\r')) --k;
          if (k > 0 && src[k - 1] == '\\') {
            ++i;
            continue;
          }
          break;
        }
        blank(i);
        ++i;
      }
      continue;
    }
    if (!space_char(c)) line_start = false;
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      while (i < n && src[i] != '\n') blank(i++);
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      blank(i++);
      blank(i++);
      while (i < n && !(src[i] == '*' && i + 1 < n && src[i + 1] == '/')) blank(i++);
      if (i < n) {
        blank(i++);
        blank(i++);
      }
      continue;
    }
    if (lang == Language::kJava && c == '"' && src.substr(i, 3) == "\"\"\"") {
      for (int k = 0; k < 3; ++k) blank(i++);
      while (i < n && src.substr(i, 3) != "\"\"\"") blank(i++);
      for (int k = 0; k < 3 && i < n; ++k) blank(i++);
      continue;
    }
    if (lang == Language::kCpp && c == '"' && i > 0 && src[i - 1] == 'R') {
      // raw string R"delim( ... )delim"
      const std::size_t open = src.find('(', i);
      if (open != std::string_view::npos && open - i <= 17) {
        const std::string delim = ")" + std::string(src.substr(i + 1, open - i - 1)) + "\"";
        const std::size_t close = src.find(delim, open);
        const std::size_t end = close == std::string_view::npos ? n : close + delim.size();
        for (; i < end; ++i) blank(i);
        continue;
      }
    }
    if (c == '"' || c == '\'') {
      if (c == '\'' && lang == Language::kCpp && i > 0 &&
          std::isxdigit(static_cast<unsigned char>(src[i - 1])) && i + 1 < n &&
          std::isxdigit(static_cast<unsigned char>(src[i + 1]))) {
        ++i;  // digit separator
        continue;
      }
      blank(i++);
      while (i < n && src[i] != c && src[i] != '\n') {
        if (src[i] == '\\' && i + 1 < n && src[i + 1] != '\n') blank(i++);
        blank(i++);
      }
      if (i < n && src[i] == c) blank(i++);
      continue;
    }
    ++i;
  }
  return out;
}

enum class TokKind { kIdent, kPunct };

struct Tok {
  TokKind kind;
  std::string_view text;
  std::size_t offset;  // relative to the header start
};

std::vector<Tok> tokenize(std::string_view s) {
  std::vector<Tok> toks;
  std::size_t i = 0;
  while (i < s.size()) {
    if (space_char(s[i])) {
      ++i;
      continue;
    }
    const std::size_t b = i;
    if (ident_char(s[i])) {
      while (i < s.size() && ident_char(s[i])) ++i;
      toks.push_back({TokKind::kIdent, s.substr(b, i - b), b});
      continue;
    }
    if (i + 1 < s.size()) {
      const std::string_view two = s.substr(i, 2);
      if (two == "::" || two == "->" || two == "&&" || two == "[[" || two == "]]") {
        toks.push_back({TokKind::kPunct, two, b});
        i += 2;
        continue;
      }
    }
    toks.push_back({TokKind::kPunct, s.substr(i, 1), b});
    ++i;
  }
  return toks;
}

bool is_one_of(std::string_view s, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), s) != set.end();
}

bool control_keyword(std::string_view s) {
  return is_one_of(s, {"if", "for", "while", "switch", "catch", "return", "sizeof", "else", "do",
                       "new", "delete", "throw", "case", "synchronized", "try", "typeof",
                       "alignof", "static_assert"});
}

bool attribute_like(std::string_view s) {
  return is_one_of(s, {"__attribute__", "__attribute", "__declspec", "alignas", "_Alignas",
                       "__asm__", "asm", "decltype"});
}

// Index one past the token closing the group opened at toks[open].
std::optional<std::size_t> close_group(const std::vector<Tok>& toks, std::size_t open) {
  const std::string_view o = toks[open].text;
  const std::string_view c = o == "(" ? ")" : o == "[" ? "]" : "}";
  int depth = 0;
  for (std::size_t k = open; k < toks.size(); ++k) {
    if (toks[k].text == o) ++depth;
    if (toks[k].text == c && --depth == 0) return k + 1;
  }
  return std::nullopt;
}

enum class HeaderKind { kFunction, kContainer, kMemberBraceInit, kOther };

HeaderKind classify(std::string_view header, Language lang) {
  const auto toks = tokenize(header);
  if (toks.empty()) return HeaderKind::kOther;

  // Locate the parameter list: the first top-level '(' group whose preceding
  // token names a function (identifier or operator symbol).
  std::optional<std::size_t> params_open;
  bool has_assignment = false;
  for (std::size_t k = 0; k < toks.size(); ++k) {
    const auto& t = toks[k];
    if (t.text == "[[") {  // [[attribute]]
      while (k < toks.size() && toks[k].text != "]]") ++k;
      continue;
    }
    if (t.text == "=") {
      // default template arguments are tolerated, other assignments are not
      const bool in_template = std::any_of(toks.begin(), toks.begin() + static_cast<long>(k),
                                           [](const Tok& x) { return x.text == "template"; });
      const bool operator_eq = k > 0 && (toks[k - 1].text == "operator" ||
                                         (k > 1 && toks[k - 2].text == "operator"));
      if (!in_template && !operator_eq) {
        has_assignment = true;
        break;
      }
      continue;
    }
    if (t.text != "(") continue;
    if (k == 0) break;
    const Tok& prev = toks[k - 1];
    if (prev.kind == TokKind::kIdent) {
      if (attribute_like(prev.text) || (k > 1 && toks[k - 2].text == "@")) {
        auto end = close_group(toks, k);
        if (!end) return HeaderKind::kOther;
        k = *end - 1;
        continue;
      }
      if (prev.text == "operator") {
        // operator()(...): the first "()" is part of the name
        auto end = close_group(toks, k);
        if (!end || *end >= toks.size() || toks[*end].text != "(") return HeaderKind::kOther;
        params_open = *end;
        break;
      }
      if (control_keyword(prev.text)) return HeaderKind::kOther;
      params_open = k;
      break;
    }
    // operator symbols: operator+, operator==, operator[] ...
    bool op = false;
    for (std::size_t b = k; b-- > 0 && k - b <= 3;) {
      if (toks[b].text == "operator") {
        op = true;
        break;
      }
      if (toks[b].kind == TokKind::kIdent) break;
    }
    if (op) {
      params_open = k;
      break;
    }
    break;
  }

  if (params_open) {
    auto after = close_group(toks, *params_open);
    if (after) {
      bool ok = true;
      bool init_list = false;
      for (std::size_t k = *after; k < toks.size(); ++k) {
        const auto& t = toks[k];
        if (t.text == ":" && lang == Language::kCpp) {
          init_list = true;
          break;
        }
        if (t.text == "=" || t.text == ";" || t.text == "{" || t.text == "}") {
          ok = false;
          break;
        }
        if (t.text == "(") {
          // qualifier calls only: noexcept(...), throw(...), __attribute__((...))
          if (k == *after || toks[k - 1].kind != TokKind::kIdent) {
            ok = false;
            break;
          }
          auto end = close_group(toks, k);
          if (!end) {
            ok = false;
            break;
          }
          k = *end - 1;
        }
      }
      if (ok && init_list) {
        // A '{' right after a member name in the initializer list is a
        // brace-initialized member, not the body.
        const Tok& last = toks.back();
        if (last.kind == TokKind::kIdent || last.text == ">") {
          const bool after_init_colon = std::any_of(
              toks.begin() + static_cast<long>(*after), toks.end(),
              [](const Tok& x) { return x.text == ":"; });
          if (after_init_colon && toks.size() >= 2 &&
              (toks[toks.size() - 2].text == ":" || toks[toks.size() - 2].text == "," ||
               toks[toks.size() - 2].text == "::" || last.text == ">")) {
            return HeaderKind::kMemberBraceInit;
          }
        }
        return HeaderKind::kFunction;
      }
      if (ok) return HeaderKind::kFunction;
    }
  }

  if (has_assignment) return HeaderKind::kOther;
  for (const auto& t : toks) {
    if (t.text == "enum") return HeaderKind::kOther;
  }
  for (const auto& t : toks) {
    if (is_one_of(t.text, {"namespace", "class", "struct", "union", "interface"})) {
      return HeaderKind::kContainer;
    }
  }
  if (toks.size() == 1 && toks[0].text == "extern") return HeaderKind::kContainer;
  return HeaderKind::kOther;
}

// Offset of the first significant character of a header, skipping access
// labels such as "public:".
std::size_t header_begin(std::string_view masked, std::size_t from, std::size_t to) {
  std::size_t i = from;
  for (;;) {
    while (i < to && space_char(masked[i])) ++i;
    std::size_t j = i;
    while (j < to && ident_char(masked[j])) ++j;
    const std::string_view word = masked.substr(i, j - i);
    if (!is_one_of(word, {"public", "private", "protected", "signals", "slots"})) return i;
    std::size_t k = j;
    while (k < to && space_char(masked[k])) ++k;
    if (k < to && masked[k] == ':' && !(k + 1 < to && masked[k + 1] == ':')) {
      i = k + 1;
      continue;
    }
    return i;
  }
}

std::optional<std::size_t> matching_brace(std::string_view masked, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < masked.size(); ++i) {
    if (masked[i] == '{') ++depth;
    if (masked[i] == '}' && --depth == 0) return i;
  }
  return std::nullopt;
}

}  // namespace

ExtractResult extract_functions(std::string_view file_text, std::string_view path,
                                Language language) {
  if (language == Language::kOther) {
    throw Error(ErrorCode::kUnsupportedLanguage,
                "no extraction rules for language 'other' (" + std::string(path) + ")");
  }
  if (auto bad = detail::find_invalid_utf8(file_text)) {
    throw Error(ErrorCode::kMalformedInput,
                std::string(path) + ": invalid UTF-8 at byte " + std::to_string(*bad));
  }

  ExtractResult result;
  const std::string masked = mask_source(file_text, language);

  std::vector<std::size_t> line_starts{0};
  for (std::size_t i = 0; i < file_text.size(); ++i) {
    if (file_text[i] == '\n') line_starts.push_back(i + 1);
  }
  const auto line_of = [&](std::size_t offset) {
    return static_cast<int>(std::upper_bound(line_starts.begin(), line_starts.end(), offset) -
                            line_starts.begin());
  };
  const auto source_lines = detail::split_lines(file_text);
  const auto region_text = [&](int first, int last) {
    std::string text;
    for (int ln = first; ln <= last && ln <= static_cast<int>(source_lines.size()); ++ln) {
      if (ln > first) text.push_back('\n');
      text.append(source_lines[static_cast<std::size_t>(ln - 1)]);
    }
    return text;
  };

  int open_containers = 0;
  std::size_t header_start = 0;
  std::size_t i = 0;
  while (i < masked.size()) {
    const char c = masked[i];
    if (c == ';') {
      header_start = i + 1;
    } else if (c == '}') {
      if (open_containers > 0) {
        --open_containers;
      } else {
        result.diagnostics.push_back({line_of(i), "unmatched '}' ignored"});
      }
      header_start = i + 1;
    } else if (c == '{') {
      const std::string_view header(masked.data() + header_start, i - header_start);
      const HeaderKind kind = classify(header, language);
      if (kind == HeaderKind::kContainer) {
        ++open_containers;
        header_start = i + 1;
      } else {
        const auto close = matching_brace(masked, i);
        if (!close) {
          result.diagnostics.push_back(
              {line_of(i), "unbalanced braces: block opened here is never closed"});
          return result;
        }
        if (kind == HeaderKind::kFunction) {
          const std::size_t begin = header_begin(masked, header_start, i);
          const int first = line_of(begin);
          const int last = line_of(*close);
          std::string text = region_text(first, last);
          if (!detail::is_blank(text)) {
            result.units.push_back(make_unit(std::string(path), first, last, std::move(text)));
          }
        }
        i = *close + 1;
        if (kind != HeaderKind::kMemberBraceInit) header_start = i;
        continue;
      }
    }
    ++i;
  }
  if (open_containers > 0) {
    result.diagnostics.push_back(
        {line_of(masked.size()), "unbalanced braces: " + std::to_string(open_containers) +
                                     " scope(s) still open at end of file"});
  }
  return result;
}

}  // namespace clonefuse
