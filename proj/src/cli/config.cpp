#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pal/cli.hpp"

namespace pal::cli {

nlohmann::json load_model(const std::string& path, const std::vector<std::string>& allowed,
                          const std::vector<std::string>& required) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("model file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("model file must hold a JSON object");
  if (!j.contains("schema_version")) throw ConfigError("model file lacks 'schema_version'");
  if (!j.at("schema_version").is_number_integer() || j.at("schema_version").get<int>() != kSchemaVersion)
    throw ConfigError("unsupported schema_version (this build reads version " + std::to_string(kSchemaVersion) + ")");
  j.erase("schema_version");
  for (const auto& [k, v] : j.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ConfigError("model file: unknown key '" + k + "'");
  for (const auto& k : required)
    if (!j.contains(k)) throw ConfigError("model file: missing key '" + k + "'");
  return j;
}

std::vector<double> parse_grid(const std::string& spec) {
  double a, b;
  int n;
  char c1, c2;
  std::istringstream is(spec);
  if (!(is >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || !is.eof() || n < 1)
    throw ConfigError("grid must look like a:b:n, got '" + spec + "'");
  if (n == 1) return {a};
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
  out.back() = b;
  return out;
}

int parse_random_count(const std::string& spec) {
  const std::string prefix = "random:";
  if (spec.rfind(prefix, 0) != 0) throw ConfigError("g family must look like random:K, got '" + spec + "'");
  try {
    std::size_t used = 0;
    const int k = std::stoi(spec.substr(prefix.size()), &used);
    if (used != spec.size() - prefix.size() || k < 1) throw ConfigError("");
    return k;
  } catch (const std::exception&) {
    throw ConfigError("g family must look like random:K with K >= 1, got '" + spec + "'");
  }
}

std::string format_number(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void dump_into(std::ostream& os, const nlohmann::json& j, int indent) {
  const std::string pad(indent + 2, ' '), close(indent, ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        os << pad << nlohmann::json(k).dump() << ": ";
        dump_into(os, v, indent + 2);
      }
      os << "\n" << close << "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // numeric arrays stay on one line
      const bool flat = std::all_of(j.begin(), j.end(), [](const auto& e) { return e.is_number(); });
      os << (flat ? "[" : "[\n");
      bool first = true;
      for (const auto& v : j) {
        if (!first) os << (flat ? ", " : ",\n");
        first = false;
        if (!flat) os << pad;
        dump_into(os, v, indent + 2);
      }
      if (!flat) os << "\n" << close;
      os << "]";
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      // JSON has no non-finite numbers
      if (!std::isfinite(v)) {
        os << "null";
        return;
      }
      os << format_number(v);
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& j) {
  std::ostringstream os;
  dump_into(os, j, 0);
  os << "\n";
  return os.str();
}

void emit(const CommonOptions& opt, const std::string& text, const nlohmann::json& meta) {
  if (opt.out.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(opt.out, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + opt.out + "'");
  f << text;
  std::ofstream m(opt.out + ".meta.json", std::ios::binary);
  if (!m) throw ConfigError("cannot write '" + opt.out + ".meta.json'");
  m << meta.dump(2) << "\n";
}

}  // namespace pal::cli
