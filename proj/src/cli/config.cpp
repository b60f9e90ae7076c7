#include "sfflab/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>

#include <CLI11.hpp>

#include "sfflab/error.hpp"

namespace sfflab::cli {
namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out + "]";
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InvalidArgument("config: bad number for " + key + ": " + text);
  return v;
}

template <typename T>
T parse_integer(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InvalidArgument("config: bad integer for " + key + ": " + text);
  return v;
}

const std::string& single(const CLI::ConfigItem& item) {
  if (item.inputs.size() != 1) throw InvalidArgument("config: " + item.name + " expects one value");
  return item.inputs.front();
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw InvalidArgument("config: bad boolean for " + key + ": " + text);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ptr);
  // Keep a decimal point so TOML reads the value back as a float.
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  return {
      {"kind", quote(kind)},
      {"model", quote(model)},
      {"N", std::to_string(N)},
      {"dt", format_double(dt)},
      {"steps", std::to_string(steps)},
      {"realizations", std::to_string(realizations)},
      {"t_grid", join(t_grid)},
      {"a_grid", join(a_grid)},
      {"n_max", std::to_string(n_max)},
      {"master_seed", std::to_string(master_seed)},
      {"workers", std::to_string(workers)},
      {"out", quote(out)},
      {"unfold", quote(unfold)},
      {"dbm_density", quote(dbm_density)},
      {"bins", std::to_string(bins)},
      {"grid", std::to_string(grid)},
      {"snapshots", join(snapshots)},
      {"dump_spectra", dump_spectra ? "true" : "false"},
  };
}

std::string RunConfig::to_toml() const {
  std::string out;
  for (const auto& [k, v] : entries()) out += k + " = " + v + "\n";
  return out;
}

std::vector<std::string> RunConfig::merge_toml(std::istream& in) {
  const std::vector<CLI::ConfigItem> items = CLI::ConfigTOML().from_config(in);
  std::vector<std::string> keys;
  for (const auto& item : items) {
    if (!item.parents.empty()) throw InvalidArgument("config: sections are not supported");
    const std::string& k = item.name;
    if (k == "kind") {
      kind = single(item);
    } else if (k == "model") {
      model = single(item);
    } else if (k == "N") {
      N = parse_integer<long long>(k, single(item));
    } else if (k == "dt") {
      dt = parse_double(k, single(item));
    } else if (k == "steps") {
      steps = parse_integer<std::uint64_t>(k, single(item));
    } else if (k == "realizations") {
      realizations = parse_integer<std::uint64_t>(k, single(item));
    } else if (k == "t_grid" || k == "a_grid") {
      std::vector<double> v;
      for (const auto& s : item.inputs) v.push_back(parse_double(k, s));
      (k == "t_grid" ? t_grid : a_grid) = std::move(v);
    } else if (k == "n_max") {
      n_max = parse_integer<int>(k, single(item));
    } else if (k == "master_seed") {
      master_seed = parse_integer<std::uint64_t>(k, single(item));
    } else if (k == "workers") {
      workers = parse_integer<int>(k, single(item));
    } else if (k == "out") {
      out = single(item);
    } else if (k == "unfold") {
      unfold = single(item);
    } else if (k == "dbm_density") {
      dbm_density = single(item);
    } else if (k == "bins") {
      bins = parse_integer<int>(k, single(item));
    } else if (k == "grid") {
      grid = parse_integer<int>(k, single(item));
    } else if (k == "snapshots") {
      snapshots.clear();
      for (const auto& s : item.inputs) snapshots.push_back(parse_integer<std::uint64_t>(k, s));
    } else if (k == "dump_spectra") {
      dump_spectra = parse_bool(k, single(item));
    } else {
      throw InvalidArgument("config: unknown key '" + k + "'");
    }
    keys.push_back(k);
  }
  return keys;
}

RunConfig RunConfig::from_toml(std::istream& in) {
  RunConfig c;
  c.merge_toml(in);
  return c;
}

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_toml()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace sfflab::cli
