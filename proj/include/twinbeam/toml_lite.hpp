#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Reader for the flat TOML subset used by run configurations: [table] headers,
// key = value pairs, basic and literal strings, integers, floats, booleans,
// single-line arrays of scalars and # comments.
namespace twinbeam::toml {

using Scalar = std::variant<bool, std::int64_t, double, std::string>;
using Value = std::variant<bool, std::int64_t, double, std::string, std::vector<Scalar>>;

struct Entry {
  Value value;
  int line = 0;
};

struct Table {
  int line = 0;  // 0 for the root table
  std::map<std::string, Entry> entries;
};

struct Document {
  std::map<std::string, Table> tables;  // "" is the root table
};

struct SyntaxIssue {
  int line = 0;
  std::string message;
};

struct ParseResult {
  Document document;
  std::vector<SyntaxIssue> issues;
};

/// Parses the whole text and collects every syntax issue instead of stopping at
/// the first one.
ParseResult parse(std::string_view text);

std::string type_name(const Value& v);

}  // namespace twinbeam::toml
