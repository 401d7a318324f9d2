#include "movsph/cli/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "movsph/errors.hpp"

namespace movsph::cli {

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("bad number '" + s + "'", line);
  return v;
}

}  // namespace

std::string solution_csv(const RadialField& u, double p) {
  std::ostringstream os;
  os << "# movsph solution schema_version=" << kSchemaVersion << " n=" << u.dim() << " p=" << fmt(p) << " center=";
  const Point& c = u.center();
  for (std::size_t i = 0; i < c.dim(); ++i) os << (i ? "," : "") << fmt(c[i]);
  os << "\n# columns: r = distance to center, u = solution value\nr,u\n";
  for (std::size_t i = 0; i < u.nodes().size(); ++i) os << fmt(u.nodes()[i]) << ',' << fmt(u.values()[i]) << '\n';
  return os.str();
}

LoadedSolution read_solution_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read solution file '" + path.string() + "'", 0);
  std::string line;
  std::size_t lineno = 0;
  int n = 0;
  double p = 0.0;
  std::vector<double> center;
  bool header_seen = false, columns_seen = false;
  std::vector<double> r, u;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# movsph solution", 0) != 0) continue;
      header_seen = true;
      std::istringstream fields(line.substr(17));
      std::string tok;
      while (fields >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "schema_version" && val != std::to_string(kSchemaVersion))
          throw ConfigError("unsupported schema_version " + val, lineno);
        if (key == "n") n = static_cast<int>(parse_double(val, lineno));
        if (key == "p") p = parse_double(val, lineno);
        if (key == "center") {
          std::istringstream cs(val);
          std::string c;
          while (std::getline(cs, c, ',')) center.push_back(parse_double(c, lineno));
        }
      }
      continue;
    }
    if (!columns_seen) {
      if (line != "r,u") throw ConfigError("expected column header 'r,u'", lineno);
      columns_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("expected 'r,u' row", lineno);
    const double rv = parse_double(line.substr(0, comma), lineno);
    const double uv = parse_double(line.substr(comma + 1), lineno);
    if (!(uv > 0.0)) throw DomainError("line " + std::to_string(lineno) + ": solution value must be positive");
    if (!r.empty() && !(rv > r.back())) throw ConfigError("radii must be strictly increasing", lineno);
    r.push_back(rv);
    u.push_back(uv);
  }
  if (!header_seen) throw ConfigError("missing '# movsph solution' header", 1);
  if (n < 2 || !(p > 0.0)) throw ConfigError("header must give n >= 2 and p > 0", 1);
  if (r.size() < 2) throw ConfigError("need at least two rows", lineno);
  Point c(static_cast<std::size_t>(n));
  if (!center.empty()) {
    if (center.size() != static_cast<std::size_t>(n)) throw ConfigError("center has wrong dimension", 1);
    c = Point::from_span(center);
  }
  return {RadialField(std::move(r), std::move(u), n, c), p};
}

}  // namespace movsph::cli
