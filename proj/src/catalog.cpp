#include "qpcircle/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qpcircle/util.hpp"

namespace qpcircle {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void record(QpfSystem& sys, const std::string& key, double value) {
  sys.params.emplace_back(key, value);
}

// Chart machinery for the projective action of [[a,b],[c,d]], det > 0.
// Points x = tan(phi) are identified with directions (cos phi, sin phi);
// the image direction is w = (d cos phi + c sin phi, b cos phi + a sin phi)
// and the chart is affine in the angle: u = phi/pi + 1/2.
struct Mobius {
  double a, b, c, d;

  double raw_angle(double phi) const {
    double wx = d * std::cos(phi) + c * std::sin(phi);
    double wy = b * std::cos(phi) + a * std::sin(phi);
    return std::atan2(wy, wx);
  }

  // Angle of the image of the chart origin u = 0 (phi = -pi/2), exact.
  double start_angle() const { return std::atan2(-a, -c); }

  double chart_map(double u) const {
    double phi = std::numbers::pi * (u - 0.5);
    return wrap(raw_angle(phi) / std::numbers::pi + 0.5);
  }

  // Continuous increasing lift of chart_map, normalized so the image of
  // u = 0 is canonical.
  double chart_lift(double uhat) const {
    double u = wrap(uhat);
    double whole = uhat - u;
    double phi = std::numbers::pi * (u - 0.5);
    double start = start_angle();
    double delta = raw_angle(phi) - start;
    delta = std::fmod(delta, kTwoPi);
    if (delta < 0) delta += kTwoPi;
    // The image direction sweeps exactly pi over a half period, so delta
    // belongs to [0, pi); larger values are wrap jitter at the seam.
    if (delta > 1.5 * std::numbers::pi)
      delta = 0.0;
    else if (delta > std::numbers::pi)
      delta = std::numbers::pi;
    double base = start / std::numbers::pi + 0.5;
    return whole + base - std::floor(base) + delta / std::numbers::pi;
  }

  double chart_derivative(double u) const {
    double phi = std::numbers::pi * (u - 0.5);
    double wx = d * std::cos(phi) + c * std::sin(phi);
    double wy = b * std::cos(phi) + a * std::sin(phi);
    return (a * d - b * c) / (wx * wx + wy * wy);
  }
};

double harper_coefficient(double E, double lambda, double theta) {
  return -E + lambda * std::cos(kTwoPi * theta);
}

}  // namespace

QpfSystem make_translation(double omega, long long k, long long q, long long l,
                           long long p) {
  if (q < 1 || p < 1)
    throw domain_error("make_translation: q and p must be >= 1");
  if (gcd_ll(k, q) != 1)
    throw domain_error("make_translation: k must be coprime to q");
  if (gcd_ll(l, p) != 1)
    throw domain_error("make_translation: l must be coprime to p");
  QpfSystem sys;
  sys.omega = wrap(omega);
  sys.smoothness = Smoothness::diffeomorphism;
  sys.name = "translation";
  double inc = (double(k) / double(q)) * sys.omega + double(l) / double(p * q);
  sys.nominal_increment = inc;
  sys.lift = [inc](double, double xhat) { return xhat + inc; };
  sys.derivative = [](double, double) { return 1.0; };
  sys.inverse = [inc](double, double x) { return wrap(x - inc); };
  record(sys, "k", double(k));
  record(sys, "q", double(q));
  record(sys, "l", double(l));
  record(sys, "p", double(p));
  return sys;
}

QpfSystem make_skew_translation(double omega, std::function<double(double)> g) {
  const int probe = 512;
  double prev = g(0.0);
  if (!std::isfinite(prev))
    throw domain_error("make_skew_translation: g not finite at 0");
  for (int i = 1; i <= probe; ++i) {
    double v = g(double(i % probe) / probe);
    if (!std::isfinite(v) || std::abs(v - prev) > 0.25)
      throw domain_error("make_skew_translation: g fails the continuity spot check");
    prev = v;
  }
  QpfSystem sys;
  sys.omega = wrap(omega);
  sys.smoothness = Smoothness::diffeomorphism;
  sys.name = "skew";
  sys.nominal_increment = g(0.0);
  sys.lift = [g](double theta, double xhat) { return xhat + g(theta); };
  sys.derivative = [](double, double) { return 1.0; };
  sys.inverse = [g](double theta, double x) { return wrap(x - g(theta)); };
  return sys;
}

QpfSystem make_skew_translation(double omega, double c0, double amp) {
  auto g = [c0, amp](double theta) { return c0 + amp * std::sin(kTwoPi * theta); };
  QpfSystem sys = make_skew_translation(omega, g);
  record(sys, "c0", c0);
  record(sys, "amp", amp);
  return sys;
}

QpfSystem make_forced_arnold(double omega, double a, double b, double rho0) {
  if (!(std::abs(a) < 1.0))
    throw domain_error("make_forced_arnold: need |a| < 1 for invertibility");
  QpfSystem sys;
  sys.omega = wrap(omega);
  sys.smoothness = Smoothness::diffeomorphism;
  sys.name = "arnold";
  sys.nominal_increment = rho0;
  sys.lift = [a, b, rho0](double theta, double xhat) {
    return xhat + rho0 + (a / kTwoPi) * std::sin(kTwoPi * xhat) +
           (b / kTwoPi) * std::sin(kTwoPi * theta);
  };
  sys.derivative = [a](double, double x) {
    return 1.0 + a * std::cos(kTwoPi * x);
  };
  sys.inverse = [a, b, rho0](double theta, double y) {
    double shift = rho0 + (b / kTwoPi) * std::sin(kTwoPi * theta);
    double xhat = y - shift;
    for (int it = 0; it < 40; ++it) {
      double f = xhat + shift + (a / kTwoPi) * std::sin(kTwoPi * xhat) - y;
      if (std::abs(f) < 1e-14) break;
      xhat -= f / (1.0 + a * std::cos(kTwoPi * xhat));
    }
    return wrap(xhat);
  };
  record(sys, "a", a);
  record(sys, "b", b);
  record(sys, "rho0", rho0);
  return sys;
}

QpfSystem make_harper(double E, double lambda, double omega) {
  QpfSystem sys;
  sys.omega = wrap(omega);
  sys.smoothness = Smoothness::diffeomorphism;
  sys.name = "harper";
  sys.nominal_increment = 0.5;
  sys.lift = [E, lambda](double theta, double uhat) {
    double c = harper_coefficient(E, lambda, theta);
    return Mobius{0.0, -1.0, 1.0, c}.chart_lift(uhat);
  };
  sys.circle_map = [E, lambda](double theta, double u) {
    double c = harper_coefficient(E, lambda, theta);
    return Mobius{0.0, -1.0, 1.0, c}.chart_map(u);
  };
  sys.derivative = [E, lambda](double theta, double u) {
    double c = harper_coefficient(E, lambda, theta);
    return Mobius{0.0, -1.0, 1.0, c}.chart_derivative(u);
  };
  sys.inverse = [E, lambda](double theta, double u) {
    double c = harper_coefficient(E, lambda, theta);
    return Mobius{c, 1.0, -1.0, 0.0}.chart_map(u);
  };
  record(sys, "E", E);
  record(sys, "lambda", lambda);
  return sys;
}

QpfSystem make_graph_contraction(double omega, double amplitude, double rate) {
  if (!(rate > 0.0 && rate < 1.0))
    throw domain_error("make_graph_contraction: rate must lie in (0, 1)");
  if (!(amplitude >= 0.0 && amplitude < 0.5))
    throw domain_error("make_graph_contraction: amplitude must lie in [0, 1/2)");
  QpfSystem sys;
  sys.omega = wrap(omega);
  sys.smoothness = Smoothness::diffeomorphism;
  sys.name = "contraction";
  sys.nominal_increment = 0.0;
  double w = sys.omega;
  auto graph = [amplitude](double theta) {
    return 0.5 + amplitude * std::sin(kTwoPi * theta);
  };
  sys.lift = [graph, rate, w](double theta, double xhat) {
    double y = xhat - graph(theta);
    double fy = y - (rate / kTwoPi) * std::sin(kTwoPi * y);
    return graph(wrap(theta + w)) + fy;
  };
  sys.derivative = [graph, rate](double theta, double x) {
    return 1.0 - rate * std::cos(kTwoPi * (x - graph(theta)));
  };
  sys.inverse = [graph, rate, w](double theta, double v) {
    double target = v - graph(wrap(theta + w));
    double y = target;
    for (int it = 0; it < 40; ++it) {
      double f = y - (rate / kTwoPi) * std::sin(kTwoPi * y) - target;
      if (std::abs(f) < 1e-14) break;
      y -= f / (1.0 - rate * std::cos(kTwoPi * y));
    }
    return wrap(graph(theta) + y);
  };
  record(sys, "amplitude", amplitude);
  record(sys, "rate", rate);
  return sys;
}

std::vector<std::string> catalog_names() {
  return {"translation", "skew", "arnold", "harper", "contraction"};
}

namespace {

double take(const std::map<std::string, double>& params, const std::string& key,
            double fallback, std::map<std::string, double>& leftover) {
  leftover.erase(key);
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

long long take_int(const std::map<std::string, double>& params,
                   const std::string& key, long long fallback,
                   std::map<std::string, double>& leftover) {
  double v = take(params, key, double(fallback), leftover);
  double r = std::round(v);
  if (std::abs(v - r) > 0.0)
    throw domain_error("parameter '" + key + "' must be an integer");
  return (long long)(r);
}

}  // namespace

QpfSystem build_catalog_system(const std::string& name,
                               const std::map<std::string, double>& params,
                               double omega) {
  std::map<std::string, double> leftover = params;
  QpfSystem sys;
  if (name == "translation") {
    long long k = take_int(params, "k", 1, leftover);
    long long q = take_int(params, "q", 2, leftover);
    long long l = take_int(params, "l", 1, leftover);
    long long p = take_int(params, "p", 2, leftover);
    sys = make_translation(omega, k, q, l, p);
  } else if (name == "skew") {
    double c0 = take(params, "c0", std::sqrt(2.0) - 1.0, leftover);
    double amp = take(params, "amp", 0.25, leftover);
    sys = make_skew_translation(omega, c0, amp);
  } else if (name == "arnold") {
    double a = take(params, "a", 0.5, leftover);
    double b = take(params, "b", 0.5, leftover);
    double rho0 = take(params, "rho0", 0.3, leftover);
    sys = make_forced_arnold(omega, a, b, rho0);
  } else if (name == "harper") {
    double E = take(params, "E", 0.0, leftover);
    double lambda = take(params, "lambda", 2.0, leftover);
    sys = make_harper(E, lambda, omega);
  } else if (name == "contraction") {
    double amplitude = take(params, "amplitude", 0.25, leftover);
    double rate = take(params, "rate", 0.5, leftover);
    sys = make_graph_contraction(omega, amplitude, rate);
  } else {
    throw usage_error("unknown system '" + name + "'");
  }
  if (!leftover.empty())
    throw domain_error("unknown parameter '" + leftover.begin()->first +
                       "' for system '" + name + "'");
  return sys;
}

double parse_omega(const std::string& text) {
  if (text == "golden") return golden_mean();
  double v = 0.0;
  auto* first = text.data();
  auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw domain_error("omega must be a decimal literal or the token 'golden'");
  return v;
}

QpfSystem load_system(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) throw domain_error("cannot open config '" + config_path + "'");

  std::string name;
  double omega = golden_mean();
  std::map<std::string, double> params;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw domain_error("config line " + std::to_string(lineno) +
                         ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty() || value.empty())
      throw domain_error("config line " + std::to_string(lineno) +
                         ": empty key or value");
    if (key == "system") {
      name = value;
    } else if (key == "omega") {
      omega = parse_omega(value);
    } else {
      double v = 0.0;
      auto* first = value.data();
      auto* last = value.data() + value.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last || !std::isfinite(v))
        throw domain_error("config key '" + key + "': '" + value +
                           "' is not a decimal literal");
      if (!params.emplace(key, v).second)
        throw domain_error("config key '" + key + "' given twice");
    }
  }
  if (name.empty()) throw domain_error("config is missing the 'system' key");

  QpfSystem sys = build_catalog_system(name, params, omega);
  SpotCheckReport report = spot_check(sys);
  if (!report.ok)
    throw domain_error("config '" + config_path + "': " + report.message);
  return sys;
}

}  // namespace qpcircle
