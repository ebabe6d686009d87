#include "qpcircle/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "qpcircle/circle.hpp"
#include "qpcircle/errors.hpp"
#include "qpcircle/util.hpp"

namespace qpcircle {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw domain_error("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw domain_error("cannot open '" + path + "' for reading");
  return in;
}

[[noreturn]] void parse_fail(const std::string& path, int line,
                             const std::string& what) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%d", line);
  throw domain_error(path + ":" + buf + ": " + what);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& path, int line, const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v))
    parse_fail(path, line, "expected a number, got '" + s + "'");
  return v;
}

long long parse_integer(const std::string& path, int line, const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const long long v = std::strtoll(begin, &end, 10);
  if (end == begin || *end != '\0')
    parse_fail(path, line, "expected an integer, got '" + s + "'");
  return v;
}

void require_uniform_grid(const std::string& path,
                          const std::vector<double>& grid) {
  const int G = int(grid.size());
  if (G < 2) throw domain_error(path + ": need at least two fibres");
  for (int j = 0; j < G; ++j)
    if (std::abs(grid[std::size_t(j)] - double(j) / G) > 1e-9)
      throw domain_error(path +
                         ": fibre grid must be uniform and start at theta 0");
}

}  // namespace

void write_multigraph_csv(const std::string& path, const MultiGraph& g) {
  std::ofstream out = open_out(path);
  out << "theta,branch,value\n";
  for (int j = 0; j < g.fibres(); ++j)
    for (int i = 0; i < g.branches(); ++i)
      out << format_double(g.grid[std::size_t(j)]) << ',' << i << ','
          << format_double(g.values[std::size_t(j)][std::size_t(i)]) << '\n';
  if (!out) throw domain_error("write to '" + path + "' failed");
}

MultiGraph read_multigraph_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  int lineno = 0;
  MultiGraph g;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (split_fields(line) != std::vector<std::string>{"theta", "branch", "value"})
        parse_fail(path, lineno, "expected header 'theta,branch,value'");
      saw_header = true;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 3) parse_fail(path, lineno, "expected three fields");
    const double theta = parse_number(path, lineno, fields[0]);
    const long long branch = parse_integer(path, lineno, fields[1]);
    const double value = parse_number(path, lineno, fields[2]);
    if (g.grid.empty() || std::abs(theta - g.grid.back()) > 1e-12) {
      if (!g.grid.empty() && theta <= g.grid.back())
        parse_fail(path, lineno, "theta values must be ascending");
      g.grid.push_back(theta);
      g.values.emplace_back();
    }
    if (branch != static_cast<long long>(g.values.back().size()))
      parse_fail(path, lineno, "branch indices must count up from 0 per fibre");
    g.values.back().push_back(value);
  }
  if (!saw_header) throw domain_error(path + ": missing header");
  require_uniform_grid(path, g.grid);
  for (const auto& row : g.values)
    if (row.size() != g.values.front().size())
      throw domain_error(path + ": branch count varies across fibres");
  return g;
}

void write_tube_csv(const std::string& path, const Tube& t) {
  std::ofstream out = open_out(path);
  out << "# p=" << t.p << " q=" << t.q << '\n';
  out << "theta,branch,value,side\n";
  for (int j = 0; j < t.fibres(); ++j)
    for (int i = 0; i < t.p; ++i)
      for (int s = 0; s < t.q; ++s) {
        const Arc& a = t.arcs[std::size_t(j)][std::size_t(i)][std::size_t(s)];
        const int branch = i * t.q + s;
        out << format_double(t.grid[std::size_t(j)]) << ',' << branch << ','
            << format_double(a.lo) << ",lo\n";
        out << format_double(t.grid[std::size_t(j)]) << ',' << branch << ','
            << format_double(a.hi()) << ",hi\n";
      }
  if (!out) throw domain_error("write to '" + path + "' failed");
}

Tube read_tube_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  int lineno = 0;
  Tube t;
  bool saw_meta = false, saw_header = false;
  std::vector<double> grid;
  std::vector<std::vector<std::pair<double, double>>> rows;  // [fibre][branch]
  std::vector<std::vector<bool>> have_lo, have_hi;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      int p = 0, q = 0;
      if (std::sscanf(line.c_str(), "# p=%d q=%d", &p, &q) == 2) {
        if (p < 1 || q < 1) parse_fail(path, lineno, "p and q must be >= 1");
        t.p = p;
        t.q = q;
        saw_meta = true;
      }
      continue;
    }
    if (!saw_header) {
      if (split_fields(line) !=
          std::vector<std::string>{"theta", "branch", "value", "side"})
        parse_fail(path, lineno, "expected header 'theta,branch,value,side'");
      saw_header = true;
      continue;
    }
    if (!saw_meta) parse_fail(path, lineno, "missing '# p=.. q=..' metadata line");
    const auto fields = split_fields(line);
    if (fields.size() != 4) parse_fail(path, lineno, "expected four fields");
    const double theta = parse_number(path, lineno, fields[0]);
    const long long branch = parse_integer(path, lineno, fields[1]);
    const double value = parse_number(path, lineno, fields[2]);
    const std::string& side = fields[3];
    if (branch < 0 || branch >= (long long)(t.p) * t.q)
      parse_fail(path, lineno, "branch index out of range");
    if (side != "lo" && side != "hi")
      parse_fail(path, lineno, "side must be 'lo' or 'hi'");
    if (grid.empty() || std::abs(theta - grid.back()) > 1e-12) {
      if (!grid.empty() && theta <= grid.back())
        parse_fail(path, lineno, "theta values must be ascending");
      grid.push_back(theta);
      rows.emplace_back(std::size_t(t.p) * std::size_t(t.q));
      have_lo.emplace_back(std::size_t(t.p) * std::size_t(t.q), false);
      have_hi.emplace_back(std::size_t(t.p) * std::size_t(t.q), false);
    }
    auto& row = rows.back();
    if (side == "lo") {
      if (have_lo.back()[std::size_t(branch)])
        parse_fail(path, lineno, "duplicate lo entry for this branch");
      row[std::size_t(branch)].first = value;
      have_lo.back()[std::size_t(branch)] = true;
    } else {
      if (have_hi.back()[std::size_t(branch)])
        parse_fail(path, lineno, "duplicate hi entry for this branch");
      row[std::size_t(branch)].second = value;
      have_hi.back()[std::size_t(branch)] = true;
    }
  }
  if (!saw_meta || !saw_header)
    throw domain_error(path + ": missing metadata or header");
  require_uniform_grid(path, grid);
  for (std::size_t j = 0; j < grid.size(); ++j)
    for (std::size_t b = 0; b < rows[j].size(); ++b)
      if (!have_lo[j][b] || !have_hi[j][b])
        throw domain_error(path + ": missing lo or hi entry for some branch");
  t.grid = grid;
  t.arcs.assign(grid.size(),
                std::vector<std::vector<Arc>>(std::size_t(t.p),
                                              std::vector<Arc>(std::size_t(t.q))));
  for (std::size_t j = 0; j < grid.size(); ++j)
    for (int i = 0; i < t.p; ++i)
      for (int s = 0; s < t.q; ++s) {
        const auto& [lo, hi] = rows[j][std::size_t(i * t.q + s)];
        t.arcs[j][std::size_t(i)][std::size_t(s)] = Arc{wrap(lo), wrap(hi - lo)};
      }
  return t;
}

void write_qcurve_csv(const std::string& path, const QCurve& c) {
  std::ofstream out = open_out(path);
  out << "# q=" << c.q << " k=" << c.declared_k << '\n';
  out << "theta_hat,value\n";
  const int spw = c.samples_per_wrap();
  for (std::size_t t = 0; t < c.samples.size(); ++t)
    out << format_double(double(t) / spw) << ','
        << format_double(c.samples[t]) << '\n';
  if (!out) throw domain_error("write to '" + path + "' failed");
}

QCurve read_qcurve_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  int lineno = 0;
  QCurve c;
  bool saw_meta = false, saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      int q = 0;
      long long k = 0;
      if (std::sscanf(line.c_str(), "# q=%d k=%lld", &q, &k) == 2) {
        if (q < 1) parse_fail(path, lineno, "q must be >= 1");
        c.q = q;
        c.declared_k = k;
        saw_meta = true;
      }
      continue;
    }
    if (!saw_header) {
      if (split_fields(line) != std::vector<std::string>{"theta_hat", "value"})
        parse_fail(path, lineno, "expected header 'theta_hat,value'");
      saw_header = true;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 2) parse_fail(path, lineno, "expected two fields");
    parse_number(path, lineno, fields[0]);
    c.samples.push_back(parse_number(path, lineno, fields[1]));
  }
  if (!saw_meta || !saw_header)
    throw domain_error(path + ": missing metadata or header");
  return c;
}

void write_trajectory_csv(const std::string& path, const TrajectoryDump& d) {
  std::ofstream out = open_out(path);
  out << "theta,x\n";
  for (std::size_t t = 0; t < d.theta.size(); ++t)
    out << format_double(d.theta[t]) << ',' << format_double(d.x[t]) << '\n';
  if (!out) throw domain_error("write to '" + path + "' failed");
}

void write_reconstruction_csv(const std::string& path,
                              const ReconstructedGraph& g) {
  std::ofstream out = open_out(path);
  out << "theta,value,dispersion,count\n";
  for (std::size_t b = 0; b < g.values.size(); ++b)
    out << format_double(g.centers[b]) << ',' << format_double(g.values[b])
        << ',' << format_double(g.dispersion[b]) << ',' << g.counts[b] << '\n';
  if (!out) throw domain_error("write to '" + path + "' failed");
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out = open_out(path);
  out << content;
  if (!out) throw domain_error("write to '" + path + "' failed");
}

}  // namespace qpcircle
