#include "twinbeam/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <sstream>

namespace twinbeam::toml {

namespace {

struct Cursor {
  std::string_view s;
  std::size_t pos = 0;

  bool done() const { return pos >= s.size(); }
  char peek() const { return done() ? '\0' : s[pos]; }
  void skip_ws() {
    while (!done() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  // True if only whitespace and an optional comment remain.
  bool at_line_end() {
    skip_ws();
    return done() || s[pos] == '#';
  }
};

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::optional<std::string> parse_basic_string(Cursor& c, std::string& error) {
  ++c.pos;  // opening quote
  std::string out;
  while (!c.done()) {
    const char ch = c.s[c.pos++];
    if (ch == '"') return out;
    if (ch != '\\') {
      out.push_back(ch);
      continue;
    }
    if (c.done()) break;
    const char esc = c.s[c.pos++];
    switch (esc) {
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case 'r': out.push_back('\r'); break;
      case '"': out.push_back('"'); break;
      case '\\': out.push_back('\\'); break;
      case 'b': out.push_back('\b'); break;
      case 'f': out.push_back('\f'); break;
      case 'u':
      case 'U': {
        const std::size_t len = esc == 'u' ? 4 : 8;
        std::uint32_t cp = 0;
        const auto digits = c.s.substr(c.pos, len);
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, 16);
        if (digits.size() != len || ec != std::errc{} || ptr != digits.data() + len || cp > 0x10FFFF ||
            (cp >= 0xD800 && cp <= 0xDFFF)) {
          error = "invalid unicode escape";
          return std::nullopt;
        }
        c.pos += len;
        append_utf8(out, cp);
        break;
      }
      default: error = std::string("unsupported escape \\") + esc; return std::nullopt;
    }
  }
  error = "unterminated string";
  return std::nullopt;
}

std::optional<std::string> parse_literal_string(Cursor& c, std::string& error) {
  ++c.pos;
  const auto end = c.s.find('\'', c.pos);
  if (end == std::string_view::npos) {
    error = "unterminated literal string";
    return std::nullopt;
  }
  std::string out(c.s.substr(c.pos, end - c.pos));
  c.pos = end + 1;
  return out;
}

std::optional<Scalar> parse_number(std::string_view token, std::string& error) {
  std::string cleaned;
  for (std::size_t i = 0; i < token.size(); ++i) {
    if (token[i] != '_') {
      cleaned.push_back(token[i]);
      continue;
    }
    const bool ok = i > 0 && i + 1 < token.size() && std::isdigit(static_cast<unsigned char>(token[i - 1])) &&
                    std::isdigit(static_cast<unsigned char>(token[i + 1]));
    if (!ok) {
      error = "misplaced underscore in number '" + std::string(token) + "'";
      return std::nullopt;
    }
  }
  std::string_view body = cleaned;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  if (body == "inf" || body == "-inf" || body == "nan" || body == "-nan") {
    error = "non-finite numbers are not accepted";
    return std::nullopt;
  }
  const bool is_float = body.find_first_of(".eE") != std::string_view::npos;
  if (!is_float) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec == std::errc() && p == body.data() + body.size()) return Scalar{v};
  } else {
    double v = 0.0;
    auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec == std::errc() && p == body.data() + body.size()) return Scalar{v};
  }
  error = "invalid value '" + std::string(token) + "'";
  return std::nullopt;
}

std::optional<Scalar> parse_scalar(Cursor& c, std::string& error) {
  c.skip_ws();
  const char ch = c.peek();
  if (ch == '"') {
    auto s = parse_basic_string(c, error);
    if (!s) return std::nullopt;
    return Scalar{std::move(*s)};
  }
  if (ch == '\'') {
    auto s = parse_literal_string(c, error);
    if (!s) return std::nullopt;
    return Scalar{std::move(*s)};
  }
  const auto start = c.pos;
  while (!c.done() && c.s[c.pos] != ',' && c.s[c.pos] != ']' && c.s[c.pos] != '#' && c.s[c.pos] != ' ' &&
         c.s[c.pos] != '\t')
    ++c.pos;
  const auto token = c.s.substr(start, c.pos - start);
  if (token.empty()) {
    error = "missing value";
    return std::nullopt;
  }
  if (token == "true") return Scalar{true};
  if (token == "false") return Scalar{false};
  return parse_number(token, error);
}

std::optional<Value> parse_value(Cursor& c, std::string& error) {
  c.skip_ws();
  if (c.peek() != '[') {
    auto s = parse_scalar(c, error);
    if (!s) return std::nullopt;
    return std::visit([](auto&& v) -> Value { return v; }, std::move(*s));
  }
  ++c.pos;
  std::vector<Scalar> items;
  while (true) {
    c.skip_ws();
    if (c.peek() == ']') {
      ++c.pos;
      return Value{std::move(items)};
    }
    auto s = parse_scalar(c, error);
    if (!s) return std::nullopt;
    items.push_back(std::move(*s));
    c.skip_ws();
    if (c.peek() == ',') {
      ++c.pos;
    } else if (c.peek() != ']') {
      error = "expected ',' or ']' in array";
      return std::nullopt;
    }
  }
}

std::optional<std::string> parse_key(Cursor& c, std::string& error) {
  c.skip_ws();
  if (c.peek() == '"') return parse_basic_string(c, error);
  const auto start = c.pos;
  while (!c.done() && (is_bare_key_char(c.s[c.pos]) || c.s[c.pos] == '.')) ++c.pos;
  if (c.pos == start) {
    error = "expected a key";
    return std::nullopt;
  }
  return std::string(c.s.substr(start, c.pos - start));
}

}  // namespace

ParseResult parse(std::string_view text) {
  ParseResult result;
  auto& tables = result.document.tables;
  tables[""] = Table{};
  std::string current;

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    Cursor c{line};
    if (c.at_line_end()) continue;
    auto issue = [&](std::string msg) { result.issues.push_back({line_no, std::move(msg)}); };
    std::string error;

    if (c.peek() == '[') {
      ++c.pos;
      if (c.peek() == '[') {
        issue("arrays of tables are not supported");
        continue;
      }
      auto name = parse_key(c, error);
      c.skip_ws();
      if (!name || c.peek() != ']') {
        issue(error.empty() ? "malformed table header" : error);
        continue;
      }
      ++c.pos;
      if (!c.at_line_end()) {
        issue("unexpected text after table header");
        continue;
      }
      if (tables.count(*name)) {
        issue("table [" + *name + "] defined more than once");
        continue;
      }
      current = *name;
      tables[current].line = line_no;
      continue;
    }

    auto key = parse_key(c, error);
    if (!key) {
      issue(error);
      continue;
    }
    c.skip_ws();
    if (c.peek() != '=') {
      issue("expected '=' after key '" + *key + "'");
      continue;
    }
    ++c.pos;
    auto value = parse_value(c, error);
    if (!value) {
      issue(error + " for key '" + *key + "'");
      continue;
    }
    if (!c.at_line_end()) {
      issue("unexpected text after value of '" + *key + "'");
      continue;
    }
    auto& entries = tables[current].entries;
    if (entries.count(*key)) {
      issue("duplicate key '" + *key + "'");
      continue;
    }
    entries.emplace(*key, Entry{std::move(*value), line_no});
  }
  return result;
}

std::string type_name(const Value& v) {
  switch (v.index()) {
    case 0: return "boolean";
    case 1: return "integer";
    case 2: return "float";
    case 3: return "string";
    default: return "array";
  }
}

}  // namespace twinbeam::toml
