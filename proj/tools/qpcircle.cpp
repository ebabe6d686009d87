#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qpcircle/boxcomb.hpp"
#include "qpcircle/catalog.hpp"
#include "qpcircle/errors.hpp"
#include "qpcircle/harper.hpp"
#include "qpcircle/io.hpp"
#include "qpcircle/multigraph.hpp"
#include "qpcircle/qcurve.hpp"
#include "qpcircle/rotation.hpp"
#include "qpcircle/tube.hpp"
#include "qpcircle/util.hpp"
#include "qpcircle/variation.hpp"

namespace {

using nlohmann::ordered_json;
using namespace qpcircle;

struct CommonFlags {
  std::string out = ".";
  std::string omega_text = "golden";
  std::uint64_t seed = 0;
  int threads = 0;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--out", f.out, "output directory")->capture_default_str();
  cmd->add_option("--omega", f.omega_text,
                  "driving frequency: 'golden' or a decimal")
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "seed for all randomness")
      ->capture_default_str();
  cmd->add_option("--threads", f.threads,
                  "worker threads (0: QPCIRCLE_THREADS or 1)");
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("QPCIRCLE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

struct SystemFlags {
  std::string config;
  std::string name = "translation";
  double k = 1, q = 2, l = 1, p = 2;
  double c0 = 0, amp = 0;
  double a = 0, b = 0, rho0 = 0;
  double E = 0, lambda = 0;
  double amplitude = 0, rate = 0;
};

void add_system_flags(CLI::App* cmd, SystemFlags& f) {
  cmd->add_option("--config", f.config, "system config file (key = value lines)");
  cmd->add_option("--system", f.name, "catalog system name")
      ->capture_default_str();
  cmd->add_option("--k", f.k, "translation: winding numerator");
  cmd->add_option("--q", f.q, "translation: horizontal period");
  cmd->add_option("--l", f.l, "translation: jumping number");
  cmd->add_option("--p", f.p, "translation: vertical period");
  cmd->add_option("--c0", f.c0, "skew: mean increment");
  cmd->add_option("--amp", f.amp, "skew: increment modulation amplitude");
  cmd->add_option("--a", f.a, "arnold: fibre nonlinearity, |a| < 1");
  cmd->add_option("--b", f.b, "arnold: driving amplitude");
  cmd->add_option("--rho0", f.rho0, "arnold: bare increment");
  cmd->add_option("--E", f.E, "harper: energy");
  cmd->add_option("--lambda", f.lambda, "harper: coupling");
  cmd->add_option("--amplitude", f.amplitude, "contraction: graph amplitude");
  cmd->add_option("--rate", f.rate, "contraction: contraction rate");
}

QpfSystem build_system(const CLI::App* cmd, const SystemFlags& f, double omega,
                       ordered_json& params_out) {
  QpfSystem sys;
  if (!f.config.empty()) {
    sys = load_system(f.config);
    params_out["config"] = f.config;
  } else {
    std::map<std::string, double> params;
    const std::vector<std::pair<const char*, const double*>> table = {
        {"--k", &f.k},         {"--q", &f.q},
        {"--l", &f.l},         {"--p", &f.p},
        {"--c0", &f.c0},       {"--amp", &f.amp},
        {"--a", &f.a},         {"--b", &f.b},
        {"--rho0", &f.rho0},   {"--E", &f.E},
        {"--lambda", &f.lambda},
        {"--amplitude", &f.amplitude},
        {"--rate", &f.rate},
    };
    for (const auto& [flag, ptr] : table)
      if (cmd->count(flag)) params[flag + 2] = *ptr;
    sys = build_catalog_system(f.name, params, omega);
  }
  params_out["system"] = sys.name;
  params_out["omega"] = sys.omega;
  ordered_json sys_params = ordered_json::object();
  for (const auto& [key, value] : sys.params) sys_params[key] = value;
  params_out["system_params"] = sys_params;
  return sys;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_json_file(const std::string& path, const ordered_json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

void write_manifest(const CommonFlags& common, const std::string& command,
                    const ordered_json& params,
                    const std::vector<std::string>& outputs) {
  ordered_json m;
  m["command"] = command;
  m["parameters"] = params;
  m["seed"] = common.seed;
  m["threads"] = resolve_threads(common.threads);
  m["version"] = kVersion;
  m["outputs"] = outputs;
  write_json_file(join_path(common.out, "manifest.json"), m);
}

void prepare_run(const CommonFlags& common) {
  std::filesystem::create_directories(common.out);
  set_worker_threads(resolve_threads(common.threads));
}

struct GraphInputFlags {
  std::string file;
  std::string builtin;
  int grid = 512;
};

void add_graph_input_flags(CLI::App* cmd, GraphInputFlags& f) {
  cmd->add_option("--graph", f.file, "multigraph CSV file");
  cmd->add_option("--builtin", f.builtin,
                  "named built-in graph (available: figure1)");
  cmd->add_option("--grid", f.grid, "fibre count for built-in graphs")
      ->capture_default_str();
}

MultiGraph load_graph_input(const GraphInputFlags& f, ordered_json& params_out) {
  if (!f.file.empty()) {
    params_out["graph"] = f.file;
    return read_multigraph_csv(f.file);
  }
  if (f.builtin == "figure1") {
    params_out["builtin"] = f.builtin;
    params_out["grid"] = f.grid;
    return make_translation_graph(f.grid, 1, 2, 1, 2);
  }
  if (f.builtin.empty())
    throw usage_error("provide --graph FILE or --builtin figure1");
  throw usage_error("unknown built-in graph '" + f.builtin +
                    "' (available: figure1)");
}

struct BoxFlags {
  double center = 0.0;
  double halfwidth = 0.05;
  double kcenter = 0.5;
  double khalfwidth = 0.01;
};

void add_box_flags(CLI::App* cmd, BoxFlags& f, const std::string& prefix = "") {
  const std::string tag = prefix.empty() ? "" : prefix + "-";
  cmd->add_option("--" + tag + "center", f.center, "base interval center")
      ->capture_default_str();
  cmd->add_option("--" + tag + "halfwidth", f.halfwidth,
                  "base interval half-width")
      ->capture_default_str();
  cmd->add_option("--" + tag + "kcenter", f.kcenter, "fibre interval center")
      ->capture_default_str();
  cmd->add_option("--" + tag + "khalfwidth", f.khalfwidth,
                  "fibre interval half-width")
      ->capture_default_str();
}

Box make_box(const BoxFlags& f) {
  return Box{CircleInterval(f.center, f.halfwidth),
             CircleInterval(f.kcenter, f.khalfwidth)};
}

ordered_json box_json(const BoxFlags& f) {
  return ordered_json{{"center", f.center},
                      {"halfwidth", f.halfwidth},
                      {"kcenter", f.kcenter},
                      {"khalfwidth", f.khalfwidth}};
}

ordered_json signature_json(const GraphSignature& sig) {
  return ordered_json{{"p", sig.p}, {"q", sig.q}, {"k", sig.k}, {"l", sig.l}};
}

void setup_rotnum(CLI::App& app) {
  auto cmd = app.add_subcommand("rotnum", "fibrewise rotation number");
  auto common = std::make_shared<CommonFlags>();
  auto sysf = std::make_shared<SystemFlags>();
  auto n = std::make_shared<std::int64_t>(100000);
  auto method = std::make_shared<std::string>("pointwise");
  auto theta0 = std::make_shared<double>(0.0);
  auto xhat0 = std::make_shared<double>(0.0);
  auto grid = std::make_shared<int>(64);
  auto detect_q = std::make_shared<long long>(0);
  auto detect_p = std::make_shared<long long>(0);
  auto detect_tol = std::make_shared<double>(1e-4);
  add_common_flags(cmd, *common);
  add_system_flags(cmd, *sysf);
  cmd->add_option("--n", *n, "iterates")->capture_default_str();
  cmd->add_option("--method", *method, "pointwise or integrated")
      ->capture_default_str();
  cmd->add_option("--theta0", *theta0, "starting base point")
      ->capture_default_str();
  cmd->add_option("--xhat0", *xhat0, "starting lifted fibre point")
      ->capture_default_str();
  cmd->add_option("--avg-grid", *grid, "theta grid for the integrated method")
      ->capture_default_str();
  cmd->add_option("--detect-q", *detect_q,
                  "scan for rational dependence up to this q");
  cmd->add_option("--detect-p", *detect_p, "companion p bound for the scan");
  cmd->add_option("--detect-tol", *detect_tol, "scan tolerance")
      ->capture_default_str();
  cmd->callback([cmd, common, sysf, n, method, theta0, xhat0, grid, detect_q,
                 detect_p, detect_tol] {
    prepare_run(*common);
    ordered_json params;
    const QpfSystem sys =
        build_system(cmd, *sysf, parse_omega(common->omega_text), params);
    params["n"] = *n;
    params["method"] = *method;

    RotationEstimate est;
    if (*method == "pointwise") {
      params["theta0"] = *theta0;
      params["xhat0"] = *xhat0;
      est = rotation_number_pointwise(sys, *theta0, *xhat0, *n);
    } else if (*method == "integrated") {
      params["avg_grid"] = *grid;
      est = rotation_number_integrated(sys, *grid, *n);
    } else {
      throw usage_error("unknown method '" + *method +
                        "' (use pointwise or integrated)");
    }

    ordered_json out;
    out["value"] = est.value;
    out["iterations"] = est.iterations;
    out["method"] = *method;
    out["residual"] = est.residual;
    if (*detect_q > 0 && *detect_p > 0) {
      params["detect_q"] = *detect_q;
      params["detect_p"] = *detect_p;
      params["detect_tol"] = *detect_tol;
      const auto sig = detect_rational_dependence(est.value, sys.omega,
                                                  *detect_q, *detect_p,
                                                  *detect_tol);
      out["detected"] = sig ? signature_json(*sig) : ordered_json(nullptr);
    }
    const std::string path = join_path(common->out, "rotnum.json");
    write_json_file(path, out);
    write_manifest(*common, "rotnum", params, {path});
  });
}

void setup_lyapunov(CLI::App& app) {
  auto cmd = app.add_subcommand("lyapunov", "vertical Lyapunov exponent");
  auto common = std::make_shared<CommonFlags>();
  auto sysf = std::make_shared<SystemFlags>();
  auto n = std::make_shared<std::int64_t>(1000000);
  auto theta0 = std::make_shared<double>(0.0);
  auto x0 = std::make_shared<double>(0.5);
  auto samples = std::make_shared<int>(4);
  add_common_flags(cmd, *common);
  add_system_flags(cmd, *sysf);
  cmd->add_option("--n", *n, "iterates")->capture_default_str();
  cmd->add_option("--theta0", *theta0, "starting base point")
      ->capture_default_str();
  cmd->add_option("--x0", *x0, "starting fibre point")->capture_default_str();
  cmd->add_option("--samples", *samples, "fibre starting points averaged over")
      ->capture_default_str();
  cmd->callback([cmd, common, sysf, n, theta0, x0, samples] {
    prepare_run(*common);
    ordered_json params;
    const QpfSystem sys =
        build_system(cmd, *sysf, parse_omega(common->omega_text), params);
    params["n"] = *n;
    params["theta0"] = *theta0;
    params["x0"] = *x0;
    params["samples"] = *samples;
    const LyapunovEstimate est = lyapunov_exponent(sys, *theta0, *x0, *n, *samples);
    ordered_json out;
    out["value"] = est.value;
    out["iterations"] = est.iterations;
    out["per_orbit_spread"] = est.per_orbit_spread;
    const std::string path = join_path(common->out, "lyapunov.json");
    write_json_file(path, out);
    write_manifest(*common, "lyapunov", params, {path});
  });
}

void setup_graph_check(CLI::App& app) {
  auto cmd = app.add_subcommand("graph-check", "invariance check of a multigraph");
  auto common = std::make_shared<CommonFlags>();
  auto sysf = std::make_shared<SystemFlags>();
  auto graphf = std::make_shared<GraphInputFlags>();
  auto tol = std::make_shared<double>(1e-6);
  add_common_flags(cmd, *common);
  add_system_flags(cmd, *sysf);
  add_graph_input_flags(cmd, *graphf);
  cmd->add_option("--tol", *tol, "invariance tolerance")->capture_default_str();
  cmd->callback([cmd, common, sysf, graphf, tol] {
    prepare_run(*common);
    ordered_json params;
    const QpfSystem sys =
        build_system(cmd, *sysf, parse_omega(common->omega_text), params);
    const MultiGraph g = load_graph_input(*graphf, params);
    params["tol"] = *tol;
    const InvarianceReport rep = check_invariance(sys, g, *tol);
    ordered_json out;
    out["pass"] = rep.pass;
    out["tol"] = rep.tol;
    out["max_defect"] = rep.max_defect;
    out["mean_defect"] = rep.mean_defect;
    out["worst_theta"] = rep.worst_theta;
    const std::string path = join_path(common->out, "graph_check.json");
    write_json_file(path, out);
    write_manifest(*common, "graph-check", params, {path});
  });
}

void setup_graph_decompose(CLI::App& app) {
  auto cmd = app.add_subcommand(
      "graph-decompose", "split an invariant multigraph into minimal parts");
  auto common = std::make_shared<CommonFlags>();
  auto sysf = std::make_shared<SystemFlags>();
  auto graphf = std::make_shared<GraphInputFlags>();
  auto tol = std::make_shared<double>(1e-6);
  add_common_flags(cmd, *common);
  add_system_flags(cmd, *sysf);
  add_graph_input_flags(cmd, *graphf);
  cmd->add_option("--tol", *tol, "invariance tolerance")->capture_default_str();
  cmd->callback([cmd, common, sysf, graphf, tol] {
    prepare_run(*common);
    ordered_json params;
    const QpfSystem sys =
        build_system(cmd, *sysf, parse_omega(common->omega_text), params);
    const MultiGraph g = load_graph_input(*graphf, params);
    params["tol"] = *tol;
    const std::vector<GraphPart> parts = decompose_graph(sys, g, *tol);
    std::vector<std::string> outputs;
    ordered_json out;
    out["parts"] = ordered_json::array();
    for (std::size_t r = 0; r < parts.size(); ++r) {
      const std::string part_csv =
          join_path(common->out, "part" + std::to_string(r) + ".csv");
      write_multigraph_csv(part_csv, parts[r].graph);
      outputs.push_back(part_csv);
      ordered_json pj;
      pj["signature"] = signature_json(parts[r].signature);
      pj["graph_csv"] = part_csv;
      pj["curve_csvs"] = ordered_json::array();
      for (std::size_t c = 0; c < parts[r].curves.size(); ++c) {
        const std::string curve_csv =
            join_path(common->out, "part" + std::to_string(r) + "_curve" +
                                       std::to_string(c) + ".csv");
        write_qcurve_csv(curve_csv, parts[r].curves[c]);
        outputs.push_back(curve_csv);
        pj["curve_csvs"].push_back(curve_csv);
      }
      out["parts"].push_back(pj);
    }
    const std::string path = join_path(common->out, "decompose.json");
    write_json_file(path, out);
    outputs.push_back(path);
    write_manifest(*common, "graph-decompose", params, outputs);
  });
}

void setup_winding(CLI::App& app) {
  auto cmd = app.add_subcommand("winding", "winding number of a closed curve");
  auto common = std::make_shared<CommonFlags>();
  auto curve_file = std::make_shared<std::string>();
  add_common_flags(cmd, *common);
  cmd->add_option("--curve", *curve_file, "lifted curve CSV file")->required();
  cmd->callback([common, curve_file] {
    prepare_run(*common);
    ordered_json params;
    params["curve"] = *curve_file;
    const QCurve c = read_qcurve_csv(*curve_file);
    require_valid_qcurve(c);
    const WindingNumber w = winding_number(c);
    ordered_json out;
    out["q"] = w.q;
    out["k"] = w.k;
    const std::string path = join_path(common->out, "winding.json");
    write_json_file(path, out);
    write_manifest(*common, "winding", params, {path});
  });
}

void setup_jumping(CLI::App& app) {
  auto cmd = app.add_subcommand("jumping",
                                "jumping number of a connected invariant graph");
  auto common = std::make_shared<CommonFlags>();
  auto sysf = std::make_shared<SystemFlags>();
  auto graphf = std::make_shared<GraphInputFlags>();
  auto tol = std::make_shared<double>(1e-6);
  add_common_flags(cmd, *common);
  add_system_flags(cmd, *sysf);
  add_graph_input_flags(cmd, *graphf);
  cmd->add_option("--tol", *tol, "invariance tolerance")->capture_default_str();
  cmd->callback([cmd, common, sysf, graphf, tol] {
    prepare_run(*common);
    ordered_json params;
    const QpfSystem sys =
        build_system(cmd, *sysf, parse_omega(common->omega_text), params);
    const MultiGraph g = load_graph_input(*graphf, params);
    params["tol"] = *tol;
    const std::vector<GraphPart> parts = decompose_graph(sys, g, *tol);
    if (parts.size() != 1)
      throw domain_error(
          "graph splits into several invariant parts; run graph-decompose "
          "and query one part");
    ordered_json out;
    out["l"] = parts[0].signature.l;
    out["signature"] = signature_json(parts[0].signature);
    out["predicted_rotation_number"] =
        predicted_rotation_number(parts[0].signature, sys.omega);
    const std::string path = join_path(common->out, "jumping.json");
    write_json_file(path, out);
    write_manifest(*common, "jumping", params, {path});
  });
}

void setup_tube_verify(CLI::App& app) {
  auto cmd = app.add_subcommand("tube-verify",
                                "check the defining properties of a tube");
  auto common = std::make_shared<CommonFlags>();
  auto sysf = std::make_shared<SystemFlags>();
  auto tube_file = std::make_shared<std::string>();
  auto graphf = std::make_shared<GraphInputFlags>();
  auto eps = std::make_shared<double>(0.0);
  auto tol = std::make_shared<double>(1e-6);
  add_common_flags(cmd, *common);
  add_system_flags(cmd, *sysf);
  cmd->add_option("--tube", *tube_file, "tube CSV file");
  cmd->add_option("--around-graph", graphf->file,
                  "build the tube around this multigraph CSV");
  cmd->add_option("--builtin", graphf->builtin,
                  "named built-in graph (available: figure1)");
  cmd->add_option("--grid", graphf->grid, "fibre count for built-in graphs")
      ->capture_default_str();
  cmd->add_option("--eps", *eps, "tube half-width when building around a graph");
  cmd->add_option("--tol", *tol, "verification tolerance")->capture_default_str();
  cmd->callback([cmd, common, sysf, tube_file, graphf, eps, tol] {
    prepare_run(*common);
    ordered_json params;
    const QpfSystem sys =
        build_system(cmd, *sysf, parse_omega(common->omega_text), params);
    params["tol"] = *tol;
    std::vector<std::string> outputs;
    Tube t;
    if (!tube_file->empty()) {
      params["tube"] = *tube_file;
      t = read_tube_csv(*tube_file);
    } else {
      if (!(*eps > 0.0))
        throw usage_error("building a tube around a graph needs --eps > 0");
      const MultiGraph g = load_graph_input(*graphf, params);
      params["eps"] = *eps;
      t = make_tube_around_graph(sys, g, *eps, *tol);
      const std::string tube_csv = join_path(common->out, "tube.csv");
      write_tube_csv(tube_csv, t);
      outputs.push_back(tube_csv);
    }
    const TubeReport rep = verify_tube(sys, t, *tol);
    ordered_json out;
    out["pass"] = rep.pass;
    out["intervals_ok"] = rep.intervals_ok;
    out["connected_ok"] = rep.connected_ok;
    out["invariance_ok"] = rep.invariance_ok;
    out["max_defect"] = rep.max_defect;
    out["signature"] =
        rep.pass ? signature_json(rep.signature) : ordered_json(nullptr);
    out["reason"] = rep.reason;
    const std::string path = join_path(common->out, "tube_verify.json");
    write_json_file(path, out);
    outputs.push_back(path);
    write_manifest(*common, "tube-verify", params, outputs);
  });
}

void setup_variation(CLI::App& app) {
  auto cmd = app.add_subcommand("variation",
                                "average total variation of log DT over fibres");
  auto common = std::make_shared<CommonFlags>();
  auto sysf = std::make_shared<SystemFlags>();
  auto theta_grid = std::make_shared<int>(64);
  auto max_x_grid = std::make_shared<int>(4096);
  add_common_flags(cmd, *common);
  add_system_flags(cmd, *sysf);
  cmd->add_option("--theta-grid", *theta_grid, "base quadrature fibres")
      ->capture_default_str();
  cmd->add_option("--max-x-grid", *max_x_grid, "refinement cap on each fibre")
      ->capture_default_str();
  cmd->callback([cmd, common, sysf, theta_grid, max_x_grid] {
    prepare_run(*common);
    ordered_json params;
    const QpfSystem sys =
        build_system(cmd, *sysf, parse_omega(common->omega_text), params);
    params["theta_grid"] = *theta_grid;
    params["max_x_grid"] = *max_x_grid;
    const VariationEstimate est = variation(sys, *theta_grid, *max_x_grid);
    ordered_json out;
    out["value"] = est.value;
    out["max_fibre"] = est.max_fibre;
    out["theta_grid"] = est.theta_grid;
    out["x_grid"] = est.x_grid;
    out["trace"] = ordered_json::array();
    for (const auto& [grid, value] : est.trace)
      out["trace"].push_back(ordered_json{{"x_grid", grid}, {"value", value}});
    const std::string path = join_path(common->out, "variation.json");
    write_json_file(path, out);
    write_manifest(*common, "variation", params, {path});
  });
}

void setup_distortion(CLI::App& app) {
  auto cmd = app.add_subcommand(
      "distortion", "integrated distortion bound for a strip over an interval");
  auto common = std::make_shared<CommonFlags>();
  auto sysf = std::make_shared<SystemFlags>();
  auto center = std::make_shared<double>(0.0);
  auto halfwidth = std::make_shared<double>(0.05);
  auto phi = std::make_shared<double>(0.45);
  auto psi = std::make_shared<double>(0.55);
  auto n = std::make_shared<int>(1);
  auto s = std::make_shared<double>(0.5);
  auto quad = std::make_shared<int>(256);
  add_common_flags(cmd, *common);
  add_system_flags(cmd, *sysf);
  cmd->add_option("--center", *center, "interval center")->capture_default_str();
  cmd->add_option("--halfwidth", *halfwidth, "interval half-width")
      ->capture_default_str();
  cmd->add_option("--phi", *phi, "lower constant edge")->capture_default_str();
  cmd->add_option("--psi", *psi, "upper constant edge")->capture_default_str();
  cmd->add_option("--n", *n, "iterates (sign selects the direction)")
      ->capture_default_str();
  cmd->add_option("--s", *s, "exponent")->capture_default_str();
  cmd->add_option("--quad", *quad, "quadrature cells")->capture_default_str();
  cmd->callback([cmd, common, sysf, center, halfwidth, phi, psi, n, s, quad] {
    prepare_run(*common);
    ordered_json params;
    const QpfSystem sys =
        build_system(cmd, *sysf, parse_omega(common->omega_text), params);
    params["center"] = *center;
    params["halfwidth"] = *halfwidth;
    params["phi"] = *phi;
    params["psi"] = *psi;
    params["n"] = *n;
    params["s"] = *s;
    params["quad"] = *quad;
    const CircleInterval I(*center, *halfwidth);
    const std::vector<double> lo(2, wrap(*phi));
    const std::vector<double> hi(2, wrap(*psi));
    const DistortionBound b = distortion_integral(sys, I, lo, hi, *n, *s, *quad);
    ordered_json out;
    out["lhs"] = b.lhs;
    out["rhs"] = b.rhs;
    out["margin"] = b.margin;
    out["variation_used"] = b.variation_used;
    out["iterations"] = b.iterations;
    out["s"] = b.s;
    const std::string path = join_path(common->out, "distortion.json");
    write_json_file(path, out);
    write_manifest(*common, "distortion", params, {path});
  });
}

void setup_returns(CLI::App& app) {
  auto cmd = app.add_subcommand("returns",
                                "return times of a box under the base rotation");
  auto common = std::make_shared<CommonFlags>();
  auto boxf = std::make_shared<BoxFlags>();
  auto alpha = std::make_shared<double>(0.5);
  auto horizon = std::make_shared<std::int64_t>(100);
  add_common_flags(cmd, *common);
  add_box_flags(cmd, *boxf);
  cmd->add_option("--alpha", *alpha, "middle fraction of the base interval")
      ->capture_default_str();
  cmd->add_option("--horizon", *horizon, "scan |n| up to this bound")
      ->capture_default_str();
  cmd->callback([common, boxf, alpha, horizon] {
    prepare_run(*common);
    ordered_json params;
    const double omega = parse_omega(common->omega_text);
    params["omega"] = omega;
    params["box"] = box_json(*boxf);
    params["alpha"] = *alpha;
    params["horizon"] = *horizon;
    const std::vector<std::int64_t> times =
        return_times(make_box(*boxf), *alpha, omega, *horizon);
    ordered_json out;
    out["times"] = times;
    const std::string path = join_path(common->out, "returns.json");
    write_json_file(path, out);
    write_manifest(*common, "returns", params, {path});
  });
}

void setup_closest(CLI::App& app) {
  auto cmd = app.add_subcommand(
      "closest", "closest return times and measure bounds for a wandering box");
  auto common = std::make_shared<CommonFlags>();
  auto sysf = std::make_shared<SystemFlags>();
  auto boxf = std::make_shared<BoxFlags>();
  auto alpha = std::make_shared<double>(0.5);
  auto horizon = std::make_shared<std::int64_t>(100);
  auto grid = std::make_shared<int>(64);
  add_common_flags(cmd, *common);
  add_system_flags(cmd, *sysf);
  add_box_flags(cmd, *boxf);
  cmd->add_option("--alpha", *alpha, "middle fraction of the base interval")
      ->capture_default_str();
  cmd->add_option("--horizon", *horizon, "scan |n| up to this bound")
      ->capture_default_str();
  cmd->add_option("--box-grid", *grid, "base grid cells per box")
      ->capture_default_str();
  cmd->callback([cmd, common, sysf, boxf, alpha, horizon, grid] {
    prepare_run(*common);
    ordered_json params;
    const QpfSystem sys =
        build_system(cmd, *sysf, parse_omega(common->omega_text), params);
    params["box"] = box_json(*boxf);
    params["alpha"] = *alpha;
    params["horizon"] = *horizon;
    params["box_grid"] = *grid;
    const BoxCombinatorics bc =
        analyze_box(sys, make_box(*boxf), *alpha, *horizon, *grid);
    ordered_json out;
    out["returns"] = bc.returns;
    out["closest"] = bc.closest;
    out["bounds"] = ordered_json::array();
    for (const ReturnBound& b : bc.bounds)
      out["bounds"].push_back(ordered_json{{"n", b.n},
                                           {"measure", b.measure},
                                           {"bound", b.bound},
                                           {"beta", b.beta},
                                           {"variation_used", b.variation_used}});
    const std::string path = join_path(common->out, "closest.json");
    write_json_file(path, out);
    write_manifest(*common, "closest", params, {path});
  });
}

void setup_bound(CLI::App& app) {
  auto cmd = app.add_subcommand(
      "bound", "measure lower bound at one closest return time");
  auto common = std::make_shared<CommonFlags>();
  auto sysf = std::make_shared<SystemFlags>();
  auto boxf = std::make_shared<BoxFlags>();
  auto n = std::make_shared<std::int64_t>(1);
  auto alpha = std::make_shared<double>(0.5);
  auto quad = std::make_shared<int>(64);
  add_common_flags(cmd, *common);
  add_system_flags(cmd, *sysf);
  add_box_flags(cmd, *boxf);
  cmd->add_option("--n", *n, "return time")->capture_default_str();
  cmd->add_option("--alpha", *alpha, "middle fraction of the base interval")
      ->capture_default_str();
  cmd->add_option("--quad", *quad, "quadrature cells per box side")
      ->capture_default_str();
  cmd->callback([cmd, common, sysf, boxf, n, alpha, quad] {
    prepare_run(*common);
    ordered_json params;
    const QpfSystem sys =
        build_system(cmd, *sysf, parse_omega(common->omega_text), params);
    params["box"] = box_json(*boxf);
    params["n"] = *n;
    params["alpha"] = *alpha;
    params["quad"] = *quad;
    const ReturnBound b =
        closest_return_bound(sys, make_box(*boxf), *n, *alpha, *quad);
    ordered_json out;
    out["n"] = b.n;
    out["measure"] = b.measure;
    out["bound"] = b.bound;
    out["beta"] = b.beta;
    out["variation_used"] = b.variation_used;
    out["satisfied"] = b.measure + 1e-12 >= b.bound;
    const std::string path = join_path(common->out, "bound.json");
    write_json_file(path, out);
    write_manifest(*common, "bound", params, {path});
  });
}

void setup_probe(CLI::App& app) {
  auto cmd = app.add_subcommand(
      "probe", "search for an iterate connecting two boxes");
  auto common = std::make_shared<CommonFlags>();
  auto sysf = std::make_shared<SystemFlags>();
  auto source = std::make_shared<BoxFlags>();
  auto target = std::make_shared<BoxFlags>();
  auto horizon = std::make_shared<std::int64_t>(1000);
  auto grid = std::make_shared<int>(64);
  add_common_flags(cmd, *common);
  add_system_flags(cmd, *sysf);
  add_box_flags(cmd, *source);
  add_box_flags(cmd, *target, "target");
  cmd->add_option("--horizon", *horizon, "scan |n| up to this bound")
      ->capture_default_str();
  cmd->add_option("--box-grid", *grid, "base grid cells per box")
      ->capture_default_str();
  cmd->callback([cmd, common, sysf, source, target, horizon, grid] {
    prepare_run(*common);
    ordered_json params;
    const QpfSystem sys =
        build_system(cmd, *sysf, parse_omega(common->omega_text), params);
    params["source"] = box_json(*source);
    params["target"] = box_json(*target);
    params["horizon"] = *horizon;
    params["box_grid"] = *grid;
    const ProbeResult res = transitivity_probe(sys, make_box(*source),
                                               make_box(*target), *horizon, *grid);
    ordered_json out;
    out["hit"] = res.hit ? ordered_json(*res.hit) : ordered_json(nullptr);
    out["horizon"] = res.horizon;
    const std::string path = join_path(common->out, "probe.json");
    write_json_file(path, out);
    write_manifest(*common, "probe", params, {path});
  });
}

void setup_harper(CLI::App& app) {
  auto cmd = app.add_subcommand("harper", "critical Harper map studies");
  cmd->require_subcommand(1);

  {
    auto traj = cmd->add_subcommand("traj", "dump a long trajectory");
    auto common = std::make_shared<CommonFlags>();
    auto n = std::make_shared<std::int64_t>(100000);
    auto skip = std::make_shared<std::int64_t>(0);
    auto theta0 = std::make_shared<double>(0.0);
    auto x0 = std::make_shared<double>(0.5);
    add_common_flags(traj, *common);
    traj->add_option("--n", *n, "points to record")->capture_default_str();
    traj->add_option("--skip", *skip, "transient steps to drop")
        ->capture_default_str();
    traj->add_option("--theta0", *theta0, "starting base point")
        ->capture_default_str();
    traj->add_option("--x0", *x0, "starting chart point")->capture_default_str();
    traj->callback([common, n, skip, theta0, x0] {
      prepare_run(*common);
      ordered_json params;
      const double omega = parse_omega(common->omega_text);
      params["omega"] = omega;
      params["n"] = *n;
      params["skip"] = *skip;
      params["theta0"] = *theta0;
      params["x0"] = *x0;
      const TrajectoryDump dump = harper_trajectory(omega, *n, *skip, *theta0, *x0);
      const std::string csv = join_path(common->out, "harper_traj.csv");
      const std::string gp = join_path(common->out, "harper_traj.gp");
      const std::string png = join_path(common->out, "harper_traj.png");
      write_trajectory_csv(csv, dump);
      write_text_file(gp, trajectory_plot_script(csv, png));
      write_manifest(*common, "harper traj", params, {csv, gp});
    });
  }

  {
    auto graph = cmd->add_subcommand("graph", "reconstruct the invariant graph");
    auto common = std::make_shared<CommonFlags>();
    auto n = std::make_shared<std::int64_t>(1000000);
    auto bins = std::make_shared<int>(512);
    auto ensemble = std::make_shared<int>(1);
    auto skip = std::make_shared<std::int64_t>(1000);
    add_common_flags(graph, *common);
    graph->add_option("--n", *n, "orbit length per start")->capture_default_str();
    graph->add_option("--bins", *bins, "base bins")->capture_default_str();
    graph->add_option("--ensemble", *ensemble, "independent starts")
        ->capture_default_str();
    graph->add_option("--skip", *skip, "transient steps to drop")
        ->capture_default_str();
    graph->callback([common, n, bins, ensemble, skip] {
      prepare_run(*common);
      ordered_json params;
      const double omega = parse_omega(common->omega_text);
      params["omega"] = omega;
      params["n"] = *n;
      params["bins"] = *bins;
      params["ensemble"] = *ensemble;
      params["skip"] = *skip;
      const QpfSystem sys = make_harper(0.0, 2.0, omega);
      Rng rng(common->seed);
      const ReconstructedGraph g =
          reconstruct_invariant_graph(sys, *bins, *n, *ensemble, *skip, rng);
      const double defect = graph_invariance_defect(sys, g);
      const std::string csv = join_path(common->out, "harper_graph.csv");
      const std::string gp = join_path(common->out, "harper_graph.gp");
      const std::string png = join_path(common->out, "harper_graph.png");
      const std::string path = join_path(common->out, "harper_graph.json");
      write_reconstruction_csv(csv, g);
      write_text_file(gp, graph_plot_script(csv, png));
      ordered_json out;
      out["bins"] = *bins;
      out["invariance_defect"] = defect;
      write_json_file(path, out);
      write_manifest(*common, "harper graph", params, {csv, gp, path});
    });
  }

  {
    auto diag = cmd->add_subcommand("diag", "rotation number, Lyapunov exponent, symmetry");
    auto common = std::make_shared<CommonFlags>();
    auto n = std::make_shared<std::int64_t>(100000);
    add_common_flags(diag, *common);
    diag->add_option("--n", *n, "iterates")->capture_default_str();
    diag->callback([common, n] {
      prepare_run(*common);
      ordered_json params;
      const double omega = parse_omega(common->omega_text);
      params["omega"] = omega;
      params["n"] = *n;
      const HarperDiagnostics d = harper_diagnostics(omega, *n);
      ordered_json out;
      out["rotation_number"] = d.rotation_number;
      out["rotation_residual"] = d.rotation_residual;
      out["lyapunov"] = d.lyapunov;
      out["lyapunov_spread"] = d.lyapunov_spread;
      out["symmetry_residual"] = d.symmetry_residual;
      out["iterates"] = d.iterates;
      const std::string path = join_path(common->out, "harper_diag.json");
      write_json_file(path, out);
      write_manifest(*common, "harper diag", params, {path});
    });
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical toolkit for quasiperiodically forced circle maps"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  setup_rotnum(app);
  setup_lyapunov(app);
  setup_graph_check(app);
  setup_graph_decompose(app);
  setup_winding(app);
  setup_jumping(app);
  setup_tube_verify(app);
  setup_variation(app);
  setup_distortion(app);
  setup_returns(app);
  setup_closest(app);
  setup_bound(app);
  setup_probe(app);
  setup_harper(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const usage_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
