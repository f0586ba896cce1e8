#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace starlab {

// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

// RFC-4180-style CSV: header row, fields quoted when they contain
// comma/quote/newline, '\n' record separator, doubles at 17 significant
// digits. Rows must match the header width.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& fields);
  void add_row_values(const std::vector<double>& values);
  std::string str() const;
  void write_file(const std::string& path) const;

 private:
  std::size_t width_;
  std::string body_;
};

// Minimal JSON value tree with insertion-ordered object keys, so emitted
// reports are byte-stable for identical inputs. Emission only; tests that
// need parsing use a real JSON library.
class JsonValue {
 public:
  enum class Kind { Null, Bool, Int, Double, String, Array, Object };

  JsonValue() : kind_(Kind::Null) {}
  static JsonValue boolean(bool b);
  static JsonValue integer(std::int64_t i);
  static JsonValue number(double d);
  static JsonValue string(std::string s);
  static JsonValue array();
  static JsonValue object();

  JsonValue& push_back(JsonValue v);              // arrays
  JsonValue& set(const std::string& key, JsonValue v);  // objects
  bool has(const std::string& key) const;

  Kind kind() const { return kind_; }
  std::string dump(int indent = 2) const;
  void write_file(const std::string& path, int indent = 2) const;

 private:
  void dump_to(std::string& out, int indent, int depth) const;

  Kind kind_;
  bool b_ = false;
  std::int64_t i_ = 0;
  double d_ = 0.0;
  std::string s_;
  std::vector<JsonValue> arr_;
  std::vector<std::pair<std::string, JsonValue>> obj_;
};

// Writes text to path atomically enough for our purposes (truncate+write).
void write_text_file(const std::string& path, const std::string& text);

}  // namespace starlab
