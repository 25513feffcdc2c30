#pragma once

// Game specification files. Two equivalent shapes are accepted:
//
//   # flat key-value text, one assignment per line
//   label = convex prisoner's dilemma
//   R = 21
//   S = 1
//   T = 22
//   P = 20
//   p_a = 0.8          (optional, default 0)
//   meta.source = any free text
//
// or a JSON object {"R": 21, "S": 1, "T": 22, "P": 20, "p_a": 0.8,
// "label": "...", "meta": {"source": "..."}}.

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "altperv/game.hpp"
#include "json.hpp"

namespace altperv {

/// Parse or validation failure. line is 1-based; 0 when not tied to a line.
class SpecError : public std::runtime_error {
 public:
  SpecError(std::size_t line, std::string field, const std::string& what)
      : std::runtime_error(format(line, field, what)), line_(line), field_(std::move(field)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string format(std::size_t line, const std::string& field, const std::string& what) {
    std::string out = line ? "line " + std::to_string(line) + ": " : std::string{};
    if (!field.empty()) out += "field '" + field + "': ";
    return out + what;
  }
  std::size_t line_;
  std::string field_;
};

struct GameSpec {
  PayoffMatrix matrix;
  double p_a = 0.0;
  std::string label;
  std::map<std::string, std::string> metadata;

  GameInstance instance() const { return GameInstance(matrix, p_a); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// Runs the game invariants and reports violations against the line the
// offending field was read from.
inline void validate_spec(const GameSpec& spec, const std::map<std::string, std::size_t>& lines) {
  try {
    (void)spec.instance();
  } catch (const InvalidGame& e) {
    const auto it = lines.find(e.field());
    throw SpecError(it == lines.end() ? 0 : it->second, e.field(),
                    std::string(e.what()).substr(e.field().size() + 2));
  }
}

inline GameSpec parse_json_spec(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecError(0, "", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SpecError(0, "", "top-level JSON value must be an object");

  GameSpec spec;
  bool seen[4] = {false, false, false, false};
  static constexpr const char* kPayoffs[4] = {"R", "S", "T", "P"};
  double* slots[4] = {&spec.matrix.R, &spec.matrix.S, &spec.matrix.T, &spec.matrix.P};
  for (const auto& [key, value] : doc.items()) {
    bool handled = false;
    for (int i = 0; i < 4; ++i) {
      if (key != kPayoffs[i]) continue;
      if (!value.is_number()) throw SpecError(0, key, "expected a number");
      *slots[i] = value.get<double>();
      seen[i] = handled = true;
    }
    if (handled) continue;
    if (key == "p_a") {
      if (!value.is_number()) throw SpecError(0, key, "expected a number");
      spec.p_a = value.get<double>();
    } else if (key == "label") {
      if (!value.is_string()) throw SpecError(0, key, "expected a string");
      spec.label = value.get<std::string>();
    } else if (key == "meta") {
      if (!value.is_object()) throw SpecError(0, key, "expected an object of strings");
      for (const auto& [mk, mv] : value.items()) {
        if (!mv.is_string()) throw SpecError(0, "meta." + mk, "expected a string");
        spec.metadata[mk] = mv.get<std::string>();
      }
    } else {
      throw SpecError(0, key, "unknown key");
    }
  }
  for (int i = 0; i < 4; ++i)
    if (!seen[i]) throw SpecError(0, kPayoffs[i], "missing required payoff");
  validate_spec(spec, {});
  return spec;
}

inline GameSpec parse_flat_spec(std::string_view text) {
  GameSpec spec;
  std::map<std::string, std::size_t> lines;
  std::istringstream in{std::string(text)};
  std::string raw;
  for (std::size_t line_no = 1; std::getline(in, raw); ++line_no) {
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw SpecError(line_no, "", "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw SpecError(line_no, "", "empty key");
    if (lines.count(key)) throw SpecError(line_no, key, "duplicate key");
    lines[key] = line_no;

    if (key == "label") {
      spec.label = std::string(value);
    } else if (key.rfind("meta.", 0) == 0 && key.size() > 5) {
      spec.metadata[key.substr(5)] = std::string(value);
    } else if (key == "R" || key == "S" || key == "T" || key == "P" || key == "p_a") {
      const auto v = parse_double(value);
      if (!v) throw SpecError(line_no, key, "expected a number, got '" + std::string(value) + "'");
      if (key == "R") spec.matrix.R = *v;
      if (key == "S") spec.matrix.S = *v;
      if (key == "T") spec.matrix.T = *v;
      if (key == "P") spec.matrix.P = *v;
      if (key == "p_a") spec.p_a = *v;
    } else {
      throw SpecError(line_no, key, "unknown key");
    }
  }
  for (const char* k : {"R", "S", "T", "P"})
    if (!lines.count(k)) throw SpecError(0, k, "missing required payoff");
  validate_spec(spec, lines);
  return spec;
}

}  // namespace detail

inline GameSpec parse_game_spec(std::string_view text) {
  const auto body = detail::trim(text);
  if (!body.empty() && body.front() == '{') return detail::parse_json_spec(body);
  return detail::parse_flat_spec(text);
}

inline GameSpec load_game_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError(0, "", "cannot open spec file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_game_spec(buf.str());
}

}  // namespace altperv
