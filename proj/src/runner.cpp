#include "mrfsi/runner.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

namespace mrfsi {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument("expected a number, got '" + s + "'");
  return v;
}

template <class Int>
Int to_int(const std::string& s) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument("expected an integer, got '" + s + "'");
  return v;
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"nu", [](RunConfig& c, const std::string& v) { c.physics.nu = to_double(v); c.physics.check(); }},
      {"lambda", [](RunConfig& c, const std::string& v) { c.physics.lambda = to_double(v); c.physics.check(); }},
      {"delta", [](RunConfig& c, const std::string& v) { c.physics.delta = to_double(v); c.physics.check(); }},
      {"gamma", [](RunConfig& c, const std::string& v) { c.physics.gamma = to_double(v); c.physics.check(); }},
      {"h", [](RunConfig& c, const std::string& v) { c.physics.h = to_double(v); c.physics.check(); }},
      {"beta",
       [](RunConfig& c, const std::string& v) {
         const auto parts = split_list(v);
         if (parts.size() != 2) throw std::invalid_argument("beta expects two comma separated numbers");
         c.physics.beta = {to_double(parts[0]), to_double(parts[1])};
       }},
      {"T", [](RunConfig& c, const std::string& v) { c.T = to_double(v); require(c.T > 0.0, "T must be > 0"); }},
      {"N", [](RunConfig& c, const std::string& v) { c.N = to_int<int>(v); require(c.N >= 1, "N must be >= 1"); }},
      {"M", [](RunConfig& c, const std::string& v) { c.M = to_int<int>(v); require(c.M >= 1, "M must be >= 1"); }},
      {"L", [](RunConfig& c, const std::string& v) { c.L = to_int<int>(v); require(c.L >= 1, "L must be >= 1"); }},
      {"config",
       [](RunConfig& c, const std::string& v) {
         c.config_id = to_int<int>(v);
         require(c.config_id == 1 || c.config_id == 2, "config must be 1 or 2");
       }},
      {"functional", [](RunConfig& c, const std::string& v) { c.functional = parse_goal(v); }},
      {"method", [](RunConfig& c, const std::string& v) { c.decoupler.method = parse_method(v); }},
      {"tau", [](RunConfig& c, const std::string& v) { c.decoupler.tau = to_double(v); c.decoupler.check(); }},
      {"tol", [](RunConfig& c, const std::string& v) { c.decoupler.tol = to_double(v); c.decoupler.check(); }},
      {"max_iter",
       [](RunConfig& c, const std::string& v) { c.decoupler.max_iter = to_int<int>(v); c.decoupler.check(); }},
      {"gmres_tol",
       [](RunConfig& c, const std::string& v) { c.decoupler.gmres_tol = to_double(v); c.decoupler.check(); }},
      {"gmres_max_iter",
       [](RunConfig& c, const std::string& v) { c.decoupler.gmres_max_iter = to_int<int>(v); c.decoupler.check(); }},
      {"fd_scale",
       [](RunConfig& c, const std::string& v) { c.decoupler.fd_scale = to_double(v); c.decoupler.check(); }},
      {"adjoint_method", [](RunConfig& c, const std::string& v) { c.adjoint.method = parse_adjoint_method(v); }},
      {"adjoint_tau",
       [](RunConfig& c, const std::string& v) {
         c.adjoint.tau = to_double(v);
         require(c.adjoint.tau > 0.0 && c.adjoint.tau <= 1.0, "adjoint_tau must lie in (0, 1]");
       }},
      {"adjoint_tol",
       [](RunConfig& c, const std::string& v) {
         c.adjoint.tol = to_double(v);
         require(c.adjoint.tol > 0.0, "adjoint_tol must be > 0");
       }},
      {"adjoint_max_iter",
       [](RunConfig& c, const std::string& v) {
         c.adjoint.max_iter = to_int<int>(v);
         require(c.adjoint.max_iter >= 1, "adjoint_max_iter must be >= 1");
       }},
      {"experiment", [](RunConfig& c, const std::string& v) { c.experiment = parse_experiment(v); }},
      {"out_dir",
       [](RunConfig& c, const std::string& v) {
         require(!v.empty(), "out_dir must not be empty");
         c.out_dir = v;
       }},
      {"seed", [](RunConfig& c, const std::string& v) { c.seed = to_int<std::uint64_t>(v); }},
      {"adaptive_steps",
       [](RunConfig& c, const std::string& v) {
         c.adaptive_steps = to_int<int>(v);
         require(c.adaptive_steps >= 0, "adaptive_steps must be >= 0");
       }},
      {"levels",
       [](RunConfig& c, const std::string& v) {
         std::vector<int> levels;
         for (const auto& s : split_list(v)) levels.push_back(to_int<int>(s));
         require(!levels.empty() && levels.front() >= 1, "levels must be positive");
         for (std::size_t i = 1; i < levels.size(); ++i)
           require(levels[i] == 2 * levels[i - 1], "each level must double the previous one");
         c.levels = std::move(levels);
       }},
      {"reference", [](RunConfig& c, const std::string& v) { c.reference = to_double(v); }},
  };
  return table;
}

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json breakdown_json(const ErrorBreakdown& e) {
  return {{"theta_f", e.theta_f_total}, {"theta_s", e.theta_s_total}, {"vartheta_f", e.vartheta_f_total},
          {"vartheta_s", e.vartheta_s_total}, {"sigma", e.sigma},          {"sigma_bar", e.sigma_bar}};
}

nlohmann::json config_json(const RunConfig& c) {
  return {{"experiment", to_string(c.experiment)},
          {"nu", c.physics.nu},
          {"beta", {c.physics.beta[0], c.physics.beta[1]}},
          {"lambda", c.physics.lambda},
          {"delta", c.physics.delta},
          {"gamma", c.physics.gamma},
          {"h", c.physics.h},
          {"T", c.T},
          {"N", c.N},
          {"M", c.M},
          {"L", c.L},
          {"config", c.config_id},
          {"functional", to_string(c.functional)},
          {"method", to_string(c.decoupler.method)},
          {"tau", c.decoupler.tau},
          {"tol", c.decoupler.tol},
          {"adjoint_method", to_string(c.adjoint.method)},
          {"seed", c.seed},
          {"adaptive_steps", c.adaptive_steps},
          {"levels", c.levels},
          {"reference", opt(c.reference)}};
}

void append_stats(std::vector<DecouplerRow>& rows, const std::vector<IterationStats>& stats, DecouplingMethod m) {
  for (const auto& s : stats)
    rows.push_back({s.macro_index, to_string(m), s.evaluations, s.newton_iterations, s.final_residual});
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  return out;
}

}  // namespace

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::primal: return "primal";
    case ExperimentKind::decoupler_compare: return "decoupler-compare";
    case ExperimentKind::convergence: return "convergence";
    case ExperimentKind::adaptive: return "adaptive";
    case ExperimentKind::render: return "render";
  }
  return "?";
}

ExperimentKind parse_experiment(const std::string& name) {
  for (auto k : {ExperimentKind::primal, ExperimentKind::decoupler_compare, ExperimentKind::convergence,
                 ExperimentKind::adaptive, ExperimentKind::render})
    if (name == to_string(k)) return k;
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string content = trim(raw.substr(0, raw.find('#')));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, "expected 'key = value'");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(source, line, "unknown key '" + key + "'");
    try {
      it->second(cfg, value);
    } catch (const std::exception& e) {
      throw ConfigError(source, line, key + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

Extrapolation reference_from_levels(const RunConfig& cfg, const OperatorSet& ops) {
  if (cfg.levels.size() < 3) throw std::invalid_argument("reference extrapolation needs at least three levels");
  const GoalFunctional J{cfg.functional};
  std::vector<double> values;
  for (std::size_t i = cfg.levels.size() - 3; i < cfg.levels.size(); ++i) {
    const TimePartition p = uniform_partition(cfg.T, cfg.levels[i], cfg.M, cfg.L);
    values.push_back(goal_value(J, p, ops, solve_primal(p, ops, cfg.decoupler).trajectory));
  }
  return extrapolate_reference(values[0], values[1], values[2]);
}

RunReport run_experiment(const RunConfig& cfg) {
  RunReport rep;
  rep.config = cfg;
  spdlog::info("experiment {}: config {} functional {} N={} M={} L={}", to_string(cfg.experiment), cfg.config_id,
               to_string(cfg.functional), cfg.N, cfg.M, cfg.L);
  if (cfg.experiment == ExperimentKind::render) {
    rep.meshes.push_back(uniform_partition(cfg.T, cfg.N, cfg.M, cfg.L));
    return rep;
  }

  cfg.physics.check();
  cfg.decoupler.check();
  const OperatorSet ops = assemble_operators(build_domain_mesh(cfg.physics.h), cfg.physics, cfg.config_id);
  const GoalFunctional J{cfg.functional};

  switch (cfg.experiment) {
    case ExperimentKind::primal: {
      const TimePartition p = uniform_partition(cfg.T, cfg.N, cfg.M, cfg.L);
      const PrimalSolution U = solve_primal(p, ops, cfg.decoupler);
      rep.goal = goal_value(J, p, ops, U.trajectory);
      append_stats(rep.decoupler, U.stats, cfg.decoupler.method);
      break;
    }
    case ExperimentKind::decoupler_compare: {
      const TimePartition p = uniform_partition(cfg.T, cfg.N, cfg.M, cfg.L);
      for (auto m : {DecouplingMethod::relaxation, DecouplingMethod::shooting}) {
        DecouplerConfig dc = cfg.decoupler;
        dc.method = m;
        const PrimalSolution U = solve_primal(p, ops, dc);
        append_stats(rep.decoupler, U.stats, m);
        if (!rep.goal) rep.goal = goal_value(J, p, ops, U.trajectory);
      }
      break;
    }
    case ExperimentKind::convergence: {
      for (int n : cfg.levels) {
        const TimePartition p = uniform_partition(cfg.T, n, cfg.M, cfg.L);
        const PrimalSolution U = solve_primal(p, ops, cfg.decoupler);
        const AdjointTrajectory Z = solve_adjoint(p, ops, J, U.trajectory, cfg.adjoint);
        ConvergenceRow row;
        row.N = n;
        row.M = p.micro_count(Subdomain::fluid);
        row.L = p.micro_count(Subdomain::solid);
        row.goal = goal_value(J, p, ops, U.trajectory);
        row.breakdown = estimate_error(p, ops, U.trajectory, Z, J);
        spdlog::info("level N={}: J={:.12e} sigma={:.4e}", n, row.goal, row.breakdown.sigma);
        rep.convergence.push_back(std::move(row));
      }
      std::optional<double> ref = cfg.reference;
      if (!ref && rep.convergence.size() >= 3) {
        const auto k = rep.convergence.size();
        rep.extrapolation = extrapolate_reference(rep.convergence[k - 3].goal, rep.convergence[k - 2].goal,
                                                  rep.convergence[k - 1].goal);
        ref = rep.extrapolation->value;
      }
      if (ref)
        for (auto& row : rep.convergence) {
          row.error = *ref - row.goal;
          row.eff = effectivity(row.breakdown.sigma, *ref, row.goal);
        }
      break;
    }
    case ExperimentKind::adaptive: {
      AdaptiveProblem problem;
      problem.ops = &ops;
      problem.goal = J;
      problem.primal = cfg.decoupler;
      problem.adjoint = cfg.adjoint;
      problem.reference = cfg.reference;
      if (!problem.reference) {
        rep.extrapolation = reference_from_levels(cfg, ops);
        problem.reference = rep.extrapolation->value;
      }
      AdaptiveResult res = adaptive_loop(uniform_partition(cfg.T, cfg.N, cfg.M, cfg.L), cfg.adaptive_steps, problem);
      rep.adaptive = std::move(res.records);
      rep.meshes = std::move(res.partitions);
      break;
    }
    case ExperimentKind::render: break;
  }
  return rep;
}

std::string render_time_mesh(const TimePartition& p) {
  constexpr double left = 40.0, width = 920.0;
  const auto x_of = [&](Tick t) {
    return left + width * static_cast<double>(t) / static_cast<double>(p.horizon_ticks());
  };
  std::ostringstream svg;
  svg << std::setprecision(10);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"120\" viewBox=\"0 0 1000 120\">\n";
  struct Row {
    const char* name;
    const char* color;
    double y;
    std::vector<Tick> ticks;
  };
  std::vector<Tick> macro_ticks{p.macro(0).begin()};
  for (const auto& m : p.macros()) macro_ticks.push_back(m.end());
  const Row rows[] = {{"fluid", "#1f5fbf", 25.0, p.nodes(Subdomain::fluid)},
                      {"macro", "#000000", 60.0, macro_ticks},
                      {"solid", "#bf1f1f", 95.0, p.nodes(Subdomain::solid)}};
  for (const auto& r : rows) {
    svg << "  <text x=\"2\" y=\"" << r.y + 4 << "\" font-size=\"10\" fill=\"" << r.color << "\">" << r.name
        << "</text>\n";
    svg << "  <line class=\"" << r.name << "-axis\" x1=\"" << left << "\" y1=\"" << r.y << "\" x2=\""
        << left + width << "\" y2=\"" << r.y << "\" stroke=\"" << r.color << "\" stroke-width=\"1\"/>\n";
    for (Tick t : r.ticks) {
      const double x = x_of(t);
      svg << "  <line class=\"" << r.name << "-tick\" x1=\"" << x << "\" y1=\"" << r.y - 8 << "\" x2=\"" << x
          << "\" y2=\"" << r.y + 8 << "\" stroke=\"" << r.color << "\" stroke-width=\"1\"/>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_reports(const RunReport& rep, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json j;
  j["config"] = config_json(rep.config);
  j["goal"] = opt(rep.goal);
  if (rep.extrapolation)
    j["reference"] = {{"value", rep.extrapolation->value},
                      {"rate", rep.extrapolation->rate},
                      {"fallback", rep.extrapolation->fallback}};

  if (!rep.decoupler.empty()) {
    std::map<std::string, nlohmann::json> per_method;
    for (const auto& r : rep.decoupler) {
      auto& m = per_method[r.method];
      if (m.is_null()) m = {{"steps", 0}, {"evaluations", 0}, {"newton_iterations", 0}, {"max_evaluations", 0}};
      m["steps"] = m["steps"].get<int>() + 1;
      m["evaluations"] = m["evaluations"].get<int>() + r.evaluations;
      m["newton_iterations"] = m["newton_iterations"].get<int>() + r.newton_iterations;
      m["max_evaluations"] = std::max(m["max_evaluations"].get<int>(), r.evaluations);
    }
    j["decoupler"] = per_method;

    auto out = open_out(dir / "decoupler.csv");
    out << "# mrfsi decoupler v1\n";
    out << "step,method,evaluations,final_residual\n";
    for (const auto& r : rep.decoupler)
      out << r.step << ',' << r.method << ',' << r.evaluations << ',' << num(r.final_residual) << '\n';
  }

  if (!rep.convergence.empty()) {
    auto rows = nlohmann::json::array();
    auto out = open_out(dir / "convergence.csv");
    out << "# mrfsi convergence v1\n";
    out << "N,M,L,theta_f,theta_s,vartheta_f,vartheta_s,sigma,J,Jref_minus_J,eff\n";
    for (const auto& r : rep.convergence) {
      const auto& e = r.breakdown;
      out << r.N << ',' << r.M << ',' << r.L << ',' << num(e.theta_f_total) << ',' << num(e.theta_s_total) << ','
          << num(e.vartheta_f_total) << ',' << num(e.vartheta_s_total) << ',' << num(e.sigma) << ','
          << num(r.goal) << ',' << num(r.error) << ',' << num(r.eff) << '\n';
      auto row = breakdown_json(e);
      row.update({{"N", r.N}, {"M", r.M}, {"L", r.L}, {"J", r.goal}, {"Jref_minus_J", opt(r.error)},
                  {"eff", opt(r.eff)}});
      rows.push_back(row);
    }
    j["convergence"] = rows;
  }

  if (!rep.adaptive.empty()) {
    // wall time is logged, not reported, to keep reports reproducible
    auto rows = nlohmann::json::array();
    for (const auto& r : rep.adaptive) {
      auto row = breakdown_json(r.breakdown);
      row.update({{"step", r.step}, {"N", r.macro_count}, {"M", r.fluid_count}, {"L", r.solid_count},
                  {"J", r.goal}, {"Jref_minus_J", opt(r.error)}, {"eff", opt(r.eff)},
                  {"marked_fluid", r.marked_fluid}, {"marked_solid", r.marked_solid}});
      rows.push_back(row);
      spdlog::info("adaptive step {} took {:.2f} s", r.step, r.wall_seconds);
    }
    j["adaptive"] = rows;
  }

  for (std::size_t k = 0; k < rep.meshes.size(); ++k) {
    auto out = open_out(dir / ("mesh_step" + std::to_string(k) + ".svg"));
    out << render_time_mesh(rep.meshes[k]);
  }
  j["meshes"] = rep.meshes.size();

  auto out = open_out(dir / "report.json");
  out << j.dump(2) << '\n';
}

}  // namespace mrfsi
