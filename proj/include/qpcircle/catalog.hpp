#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qpcircle/system.hpp"

namespace qpcircle {

/// x -> x + (k/q) omega + l/(pq). Requires q, p >= 1, gcd(k, q) = 1,
/// gcd(l, p) = 1; the increment realizes the rotation number attached to a
/// p,q-invariant graph with winding k and jumping number l.
QpfSystem make_translation(double omega, long long k, long long q, long long l,
                           long long p);

/// x -> x + g(theta) for continuous g (spot-checked on a sample grid).
QpfSystem make_skew_translation(double omega, std::function<double(double)> g);

/// Named catalog form of the skew translation, g(theta) = c0 + amp sin(2 pi theta).
QpfSystem make_skew_translation(double omega, double c0, double amp);

/// x -> x + rho0 + (a/2pi) sin(2 pi x) + (b/2pi) sin(2 pi theta); |a| < 1.
QpfSystem make_forced_arnold(double omega, double a, double b, double rho0);

/// Projective action of x -> -1/(x - E + lambda cos(2 pi theta)) in the
/// chart x' = atan(x)/pi + 1/2 (the point at infinity sits at x' = 0).
QpfSystem make_harper(double E, double lambda, double omega);

/// T_theta(x) = phi(theta + omega) + f(x - phi(theta)) with
/// phi(theta) = 1/2 + amplitude sin(2 pi theta) and
/// f(y) = y - (rate/2pi) sin(2 pi y), 0 < rate < 1. Has the attracting
/// invariant graph x = phi(theta) (and the repelling one x = phi + 1/2);
/// serves as the closed-form oracle for graph reconstruction.
QpfSystem make_graph_contraction(double omega, double amplitude, double rate);

std::vector<std::string> catalog_names();

/// Builds a catalog system by name from a key -> value parameter map.
/// Unknown names raise usage_error; bad parameter values raise domain_error.
QpfSystem build_catalog_system(const std::string& name,
                               const std::map<std::string, double>& params,
                               double omega);

/// Flat key = value config text: '#' comments, keys "system", "omega"
/// (decimal or the literal token "golden") and the named system's numeric
/// parameters as decimal literals. The built system is spot-checked.
QpfSystem load_system(const std::string& config_path);

/// Parses the omega spelling used by configs and CLI flags.
double parse_omega(const std::string& text);

}  // namespace qpcircle
