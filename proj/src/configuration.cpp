#include "hardshift/configuration.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hardshift/grid_index.hpp"

namespace hardshift {

namespace {

std::string describe(Point p) { return "(" + format_real(p.x) + ", " + format_real(p.y) + ")"; }

std::vector<Point> points_from_json(const nlohmann::json& arr, const char* field) {
  if (!arr.is_array()) throw std::invalid_argument(std::string("field '") + field + "' must be an array");
  std::vector<Point> out;
  out.reserve(arr.size());
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw std::invalid_argument(std::string("entries of '") + field + "' must be [x, y] pairs");
    }
    out.push_back({e[0].get<double>(), e[1].get<double>()});
  }
  return out;
}

double parse_real(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("malformed real '" + std::string(s) + "'");
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void validate_layout(const Configuration& cfg) {
  const double n = cfg.n;
  for (const Point& p : cfg.interior) {
    if (!is_finite(p)) throw std::invalid_argument("non-finite interior particle");
    if (max_norm(p) > n) throw std::invalid_argument("interior particle outside the box: " + describe(p));
  }
  for (const Point& p : cfg.boundary) {
    if (!is_finite(p)) throw std::invalid_argument("non-finite boundary particle");
    if (!(max_norm(p) > n)) throw std::invalid_argument("boundary particle inside the box: " + describe(p));
  }
}

std::vector<ParticlePair> check_hard_core(const Configuration& cfg) {
  std::vector<Point> all;
  all.reserve(cfg.interior.size() + cfg.boundary.size());
  all.insert(all.end(), cfg.interior.begin(), cfg.interior.end());
  all.insert(all.end(), cfg.boundary.begin(), cfg.boundary.end());

  const GridIndex grid(all, 1.0);
  std::vector<ParticlePair> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    grid.for_each_within(all[i], 1.0, [&](int j, double d) {
      if (static_cast<std::size_t>(j) > i) out.push_back({i, static_cast<std::size_t>(j), d});
    });
  }
  return out;
}

bool is_hard_core(const Configuration& cfg) { return check_hard_core(cfg).empty(); }

std::string to_json(const Configuration& cfg) {
  const auto append_points = [](std::string& out, const std::vector<Point>& pts) {
    out += '[';
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) out += ',';
      out += '[' + format_real(pts[i].x) + ',' + format_real(pts[i].y) + ']';
    }
    out += ']';
  };
  std::string out = "{\"n\":" + std::to_string(cfg.n) + ",\"interior\":";
  append_points(out, cfg.interior);
  out += ",\"boundary\":";
  append_points(out, cfg.boundary);
  out += '}';
  return out;
}

Configuration config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("configuration JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer()) {
    throw std::invalid_argument("configuration JSON needs an integer field 'n'");
  }
  Configuration cfg;
  cfg.n = j["n"].get<int>();
  cfg.interior = points_from_json(j.value("interior", nlohmann::json::array()), "interior");
  cfg.boundary = points_from_json(j.value("boundary", nlohmann::json::array()), "boundary");
  return cfg;
}

std::string to_csv(const Configuration& cfg) {
  std::string out = "kind,x,y\n";
  for (const Point& p : cfg.interior) out += "interior," + format_real(p.x) + "," + format_real(p.y) + "\n";
  for (const Point& p : cfg.boundary) out += "boundary," + format_real(p.x) + "," + format_real(p.y) + "\n";
  return out;
}

Configuration config_from_csv(const std::string& text, int n) {
  Configuration cfg;
  cfg.n = n;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line != "kind,x,y") throw std::invalid_argument("CSV header must be 'kind,x,y'");
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) throw std::invalid_argument("CSV line " + std::to_string(lineno) + ": expected 3 columns");
    const std::string kind = line.substr(0, c1);
    const Point p{parse_real(std::string_view(line).substr(c1 + 1, c2 - c1 - 1)),
                  parse_real(std::string_view(line).substr(c2 + 1))};
    if (kind == "interior") {
      cfg.interior.push_back(p);
    } else if (kind == "boundary") {
      cfg.boundary.push_back(p);
    } else {
      throw std::invalid_argument("CSV line " + std::to_string(lineno) + ": unknown kind '" + kind + "'");
    }
  }
  return cfg;
}

Configuration load_configuration(const std::filesystem::path& path, int n_for_csv) {
  const std::string text = read_file(path);
  if (path.extension() == ".csv") return config_from_csv(text, n_for_csv);
  return config_from_json(text);
}

void save_configuration(const std::filesystem::path& path, const Configuration& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (path.extension() == ".csv") {
    out << to_csv(cfg);
  } else {
    out << to_json(cfg) << '\n';
  }
}

}  // namespace hardshift
