#pragma once

// wirefield command line: config ingestion, runs, CSV/JSON artifacts.
//
// Every subcommand takes an optional JSON --config; flags given explicitly override it.
// A manifest (inputs, version, seed, wall time, artifacts) is printed to stdout.
// Exit status: 0 ok, 2 validation / usage / I/O, 3 numerical failure.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wirefield/wirefield.hpp"

namespace wirefield::cli {

using json = nlohmann::json;

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_numerical = 3;

/// FNV-1a, 64 bit.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV with a '#' metadata header. Contents depend only on the config, never on the clock.
class csv_writer {
 public:
  csv_writer(const std::filesystem::path& path, const std::string& command, const json& config,
             const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw validation_error("cannot write " + path.string());
    out_ << "# wirefield " << command << "\n";
    out_ << "# version: " << version << "\n";
    out_ << "# config_hash: " << hex64(fnv1a(config.dump())) << "\n";
    if (config.contains("seed")) out_ << "# seed: " << config["seed"].dump() << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
  }
  void row(const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? "," : "") << num(v[i]);
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

struct context {
  std::string command;
  json config;  // merged inputs
  std::filesystem::path out_dir;
  json result = json::object();
  std::vector<std::string> artifacts;

  std::filesystem::path artifact(const std::string& name) {
    artifacts.push_back((out_dir / name).string());
    return out_dir / name;
  }
  void write_json(const std::string& name, const json& j) {
    std::ofstream f(artifact(name));
    if (!f) throw validation_error("cannot write " + name);
    f << j.dump(2) << "\n";
  }
};

// Config readers.

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw validation_error(std::string("config field '") + key + "': " + e.what());
  }
}

inline current_profile read_profile(const json& cfg) {
  const json p = cfg.value("profile", json::object());
  for (const char* bad : {"constant", "mean", "a0", "c0"})
    if (p.contains(bad)) throw invalid_profile(std::string("profile must not carry a constant term ('") + bad + "')");
  const std::string type = get_or<std::string>(p, "type", "sinusoid");
  const double T = get_or(p, "T", 0.5), I0 = get_or(p, "I0", 1.0), k = get_or(p, "k", 0.0);
  if (type == "sinusoid") return sinusoid(I0, k, T, get_or(p, "amplitude", 1.0));
  if (type == "fourier")
    return fourier(I0, k, T, get_or(p, "cos_coeffs", std::vector<double>{}), get_or(p, "sin_coeffs", std::vector<double>{}));
  if (type == "square") return smoothed_square(I0, k, T, get_or(p, "harmonics", 15), get_or(p, "smoothing", 0.05));
  throw invalid_profile("unknown profile type '" + type + "' (sinusoid, fourier, square)");
}

inline triplet read_triplet(const json& cfg, double I0) {
  const json t = cfg.value("triplet", json::object());
  const double rbar = get_or(t, "rbar", 1.0);
  if (t.contains("L") || t.contains("p_z")) return {rbar, get_or(t, "L", 0.0), get_or(t, "p_z", 0.0), I0};
  return complete_triplet(rbar, I0, get_or(t, "branch", 1));
}

inline ode_options read_ode(const json& cfg, ode_options d) {
  const json t = cfg.value("tol", json::object());
  d.rtol = get_or(t, "rtol", d.rtol);
  d.atol = get_or(t, "atol", d.atol);
  return d;
}

inline potential_field read_field(const json& cfg) {
  quadrature_config q;
  q.abs_tol = get_or(cfg.value("tol", json::object()), "quad", q.abs_tol);
  const std::string tail = get_or<std::string>(cfg, "tail", "contour");
  if (tail == "integration_by_parts") q.tail = tail_method::integration_by_parts;
  else if (tail != "contour") throw validation_error("tail must be 'contour' or 'integration_by_parts'");
  return potential_field(read_profile(cfg), get_or(cfg, "c", 1.0), q);
}

inline std::shared_ptr<const potential_source> read_source(const json& cfg, double rbar) {
  const auto field = read_field(cfg);
  if (get_or<std::string>(cfg, "potential", "table") == "exact") return std::make_shared<exact_potential>(field);
  return make_table(field, rbar);
}

inline std::vector<double> grid(const json& g, double lo, double hi, std::size_t n) {
  if (g.is_array()) return g.get<std::vector<double>>();
  if (g.is_object()) {
    lo = get_or(g, "from", lo);
    hi = get_or(g, "to", hi);
    n = get_or<std::size_t>(g, "count", n);
  }
  if (n < 1) throw validation_error("grid needs at least one point");
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  return v;
}

// Commands.

inline void cmd_potential_table(context& ctx) {
  const auto field = read_field(ctx.config);
  const auto ts = grid(ctx.config.value("t", json()), 0.0, field.profile().period(), 5);
  const auto rs = grid(ctx.config.value("r", json()), 0.5, 5.0, 5);
  csv_writer csv(ctx.artifact("potential_table.csv"), ctx.command, ctx.config,
                 {"t", "r", "a", "da_dr", "da_dt", "wave_residual", "est_error"});
  double worst = 0.0;
  for (double t : ts)
    for (double r : rs) {
      const auto p0 = partials(field, t, r, 0, 1);
      const auto p1 = partials(field, t, r, 1, 0);
      const auto w = wave_residual(field, t, r);
      const double err = std::max({p0.error[0], p0.error[1], p1.error[0]});
      worst = std::max(worst, err);
      csv.row({t, r, p0.d[0], p0.d[1], p1.d[0], w.value, err});
    }
  ctx.result["rows"] = ts.size() * rs.size();
  ctx.result["max_error_estimate"] = worst;
}

inline void cmd_fields(context& ctx) {
  const auto field = read_field(ctx.config);
  const auto ts = grid(ctx.config.value("t", json()), 0.0, field.profile().period(), 5);
  const auto rs = grid(ctx.config.value("r", json()), 0.5, 5.0, 5);
  csv_writer csv(ctx.artifact("fields.csv"), ctx.command, ctx.config, {"t", "r", "E_z", "B_theta"});
  for (double t : ts)
    for (double r : rs) {
      const auto s = field_eval(field, t, r);
      csv.row({t, r, s.E.z, s.B.theta});
    }
  ctx.result["rows"] = ts.size() * rs.size();
}

inline void cmd_simulate(context& ctx) {
  const auto& cfg = ctx.config;
  const auto profile = read_profile(cfg);
  const auto trip = read_triplet(cfg, profile.I0());
  const json init = cfg.value("initial", json::object());
  const momenta mom{get_or(init, "L", trip.L), get_or(init, "p_z", trip.p_z)};
  const radial_state x0{get_or(init, "r", trip.rbar), get_or(init, "rdot", 0.0)};
  const auto m = make_model(read_source(cfg, trip.rbar), mom);
  const auto span = get_or(cfg, "t_span", std::vector<double>{0.0, 100.0 * profile.period()});
  if (span.size() != 2) throw validation_error("t_span must be [t0, t1]");
  const auto samples = uniform_samples(span[0], span[1], get_or<std::size_t>(cfg, "samples", 1000));
  const auto opt = read_ode(cfg, {});
  const std::string system = get_or<std::string>(cfg, "system", "cylindrical");
  csv_writer csv(ctx.artifact("trajectory.csv"), ctx.command, cfg, {"t", "r", "rdot", "theta", "z", "L", "p_z", "E0"});
  auto energy0 = [&](double r, double rdot, double L, double pz) {
    const double g0 = pz + m.I0 * std::log(r);
    return 0.5 * rdot * rdot + 0.5 * L * L / (r * r) + 0.5 * g0 * g0;
  };
  double r_min = x0.r, r_max = x0.r;
  if (system == "radial" || system == "cylindrical") {
    const auto tr = integrate_cylindrical(m, {x0.r, x0.rdot, 0.0, 0.0}, span[0], span[1], samples, opt);
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
      const auto& x = tr.x[i];
      r_min = std::min(r_min, x[0]);
      r_max = std::max(r_max, x[0]);
      csv.row({tr.t[i], x[0], x[1], x[2], x[3], m.L, m.p_z, energy0(x[0], x[1], m.L, m.p_z)});
    }
  } else if (system == "cartesian") {
    const auto tr = integrate_cartesian(m, cartesian_initial(m, span[0], x0), span[0], span[1], samples, opt);
    const auto fi = first_integrals(tr, m);
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
      const auto& x = tr.x[i];
      const double r = std::hypot(x[0], x[1]);
      r_min = std::min(r_min, r);
      r_max = std::max(r_max, r);
      csv.row({tr.t[i], r, (x[0] * x[3] + x[1] * x[4]) / r, std::atan2(x[1], x[0]), x[2], fi[i].L, fi[i].p_z, fi[i].E0});
    }
  } else {
    throw validation_error("system must be radial, cylindrical or cartesian");
  }
  ctx.result["r_min"] = r_min;
  ctx.result["r_max"] = r_max;
}

inline void cmd_triplet(context& ctx) {
  const auto& cfg = ctx.config;
  const double I0 = get_or(cfg.value("triplet", json::object()), "I0", 1.0);
  const double T = get_or(cfg, "T", 0.5);
  const auto t = read_triplet(cfg, I0);
  const auto adm = is_admissible(t);
  json j{{"rbar", t.rbar}, {"L", t.L}, {"p_z", t.p_z}, {"I0", t.I0}, {"T", T},
         {"admissible", adm.admissible}, {"defect", adm.defect}, {"omega0", t.omega0()}};
  if (adm.admissible) {
    const auto res = resonance_check(t, T);
    const auto strong = strong_resonance_check(t, T);
    j["paper_literal"] = res.paper_literal;
    j["spectral"] = res.spectral;
    j["strong"] = strong.strong;
    j["margins"] = {{"paper_literal", res.literal_margin}, {"paper_literal_n", res.literal_n},
                    {"spectral", res.spectral_margin}, {"spectral_n", res.spectral_n}, {"strong", strong.margin}};
  }
  ctx.write_json("triplet.json", j);
  ctx.result = j;
}

inline period_map_problem read_problem(const json& cfg, triplet& trip) {
  const auto profile = read_profile(cfg);
  trip = read_triplet(cfg, profile.I0());
  if (!is_admissible(trip).admissible) throw invalid_triplet("triplet is not admissible");
  period_map_problem pm{make_model(read_source(cfg, trip.rbar), {trip.L, trip.p_z}), profile.period(), {}};
  pm.opt.ode = read_ode(cfg, pm.opt.ode);
  return pm;
}

inline json orbit_json(const periodic_orbit& o, double rbar) {
  return {{"k", o.k},
          {"r0", o.x0.r},
          {"rdot0", o.x0.rdot},
          {"residual", o.residual},
          {"deviation_sup", o.deviation_sup(rbar)},
          {"monodromy", o.monodromy},
          {"trace", o.trace()},
          {"determinant", o.determinant()},
          {"rotation_angle", o.rotation_angle},
          {"sigma_min", o.sigma_min},
          {"elliptic", o.elliptic()}};
}

inline void cmd_continue(context& ctx) {
  triplet trip;
  const auto pm = read_problem(ctx.config, trip);
  const auto ks = get_or(ctx.config, "k_list", std::vector<double>{1e-4, 1e-3, 1e-2});
  const auto b = continue_in_k(pm, trip, ks);
  json orbits = json::array();
  for (std::size_t i = 0; i < b.orbits.size(); ++i) {
    const auto& o = b.orbits[i];
    orbits.push_back(orbit_json(o, trip.rbar));
    csv_writer csv(ctx.artifact("orbit_" + std::to_string(i) + ".csv"), ctx.command, ctx.config, {"k", "t", "r", "rdot"});
    for (std::size_t s = 0; s < o.t.size(); ++s) csv.row({o.k, o.t[s], o.r[s], o.rdot[s]});
  }
  json j{{"orbits", orbits}, {"reason", to_string(b.reason)}, {"message", b.message}, {"k0_estimate", b.k0_estimate}};
  ctx.write_json("branch.json", j);
  ctx.result = {{"orbits", b.orbits.size()}, {"reason", to_string(b.reason)}, {"k0_estimate", b.k0_estimate}};
}

inline const periodic_orbit shoot_at(const period_map_problem& pm, const triplet& trip, double k) {
  if (k == 0.0) return newton_shoot(pm, {trip.rbar, 0.0}, 0.0);
  auto b = continue_in_k(pm, trip, {k});
  if (b.orbits.back().k != k) throw no_branch(std::string("continuation stopped before k: ") + b.message);
  return b.orbits.back();
}

inline void cmd_twist_check(context& ctx) {
  triplet trip;
  const auto pm = read_problem(ctx.config, trip);
  const double k = get_or(ctx.config, "k", pm.model.k);
  const std::string formula = get_or<std::string>(ctx.config, "formula", "taylor");
  if (formula != "taylor" && formula != "unweighted") throw validation_error("formula must be taylor or unweighted");
  const auto o = shoot_at(pm, trip, k);
  const auto c = compute_coefficients(o, pm.model, trip, formula == "taylor" ? twist_formula::taylor : twist_formula::unweighted);
  const auto z = check_twist(c, o);
  csv_writer csv(ctx.artifact("twist_coefficients.csv"), ctx.command, ctx.config, {"t", "A", "B", "C"});
  for (std::size_t i = 0; i < c.t.size(); ++i) csv.row({c.t[i], c.A[i], c.B[i], c.C[i]});
  json j{{"k", k},
         {"Abar", c.Abar}, {"Bbar", c.Bbar}, {"Cbar", c.Cbar},
         {"A_inf", z.A_inf}, {"A_sup", z.A_sup}, {"C_inf", z.C_inf}, {"C_sup", z.C_sup}, {"B_inf_sq", z.B_inf_sq},
         {"condition_i", z.condition_i}, {"condition_ii", z.condition_ii}, {"condition_iii", z.condition_iii},
         {"margin_i", z.margin_i}, {"margin_ii", z.margin_ii}, {"margin_iii", z.margin_iii},
         {"rotation_bound", z.rotation_bound}, {"certified", z.certified()}};
  ctx.write_json("twist_certificate.json", j);
  ctx.result = j;
}

inline void cmd_subharmonics(context& ctx) {
  triplet trip;
  const auto pm = read_problem(ctx.config, trip);
  const double k = get_or(ctx.config, "k", pm.model.k);
  auto pairs = get_or(ctx.config, "pairs", std::vector<std::vector<int>>{{1, 8}});
  const auto o = shoot_at(pm, trip, k);
  json list = json::array();
  for (const auto& pq : pairs) {
    if (pq.size() != 2) throw validation_error("pairs must be [[p, q], ...]");
    const auto s = find_subharmonic(pm, o, trip.rbar, pq[0], pq[1]);
    list.push_back({{"p", s.p}, {"q", s.q}, {"found", s.found}, {"residual", s.residual}, {"zeros", s.zero_count},
                    {"r0", s.x0.r}, {"rdot0", s.x0.rdot}, {"amplitude", s.amplitude}, {"message", s.message}});
    if (s.found) {
      csv_writer csv(ctx.artifact("subharmonic_" + std::to_string(s.p) + "_" + std::to_string(s.q) + ".csv"),
                     ctx.command, ctx.config, {"t", "r"});
      for (std::size_t i = 0; i < s.t.size(); ++i) csv.row({s.t[i], s.r[i]});
    }
  }
  ctx.write_json("subharmonics.json", list);
  ctx.result = list;
}

inline void cmd_stability(context& ctx) {
  triplet trip;
  const auto pm = read_problem(ctx.config, trip);
  const double k = get_or(ctx.config, "k", pm.model.k);
  const auto o = shoot_at(pm, trip, k);
  probe_options po;
  po.members = get_or<std::size_t>(ctx.config, "members", po.members);
  po.seed = get_or<std::uint64_t>(ctx.config, "seed", po.seed);
  po.escape = get_or(ctx.config, "escape", po.escape);
  const double delta = get_or(ctx.config, "delta", 1e-3);
  const auto horizon = get_or<std::size_t>(ctx.config, "horizon", 1000);
  const auto rep = run_stability_probe(o, pm.model, delta, horizon, po);
  csv_writer csv(ctx.artifact("ensemble.csv"), ctx.command, ctx.config,
                 {"member", "dr", "drdot", "dL", "dp_z", "max_excursion", "max_phase_excursion", "collided", "escaped"});
  for (std::size_t i = 0; i < rep.members.size(); ++i) {
    const auto& m = rep.members[i];
    csv.row({static_cast<double>(i), m.perturbation[0], m.perturbation[1], m.perturbation[2], m.perturbation[3],
             m.max_excursion, m.max_phase_excursion, static_cast<double>(m.collided), static_cast<double>(m.escaped)});
  }
  json j{{"k", k}, {"delta", delta}, {"horizon", horizon}, {"members", rep.members.size()},
         {"max_excursion", rep.max_excursion}, {"max_phase_excursion", rep.max_phase_excursion},
         {"collisions", rep.collisions}, {"escapes", rep.escapes}};
  ctx.write_json("stability.json", j);
  ctx.result = j;
}

/// Entry point. Manifest goes to `out`, diagnostics to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"wirefield: charged particle near a wire with periodic current"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".";
  std::map<std::string, double> numeric;  // explicitly given numeric flags
  std::string profile_type, system, formula;
  std::uint64_t seed = 0;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"potential-table", "a, its derivatives and the wave residual on a (t, r) grid"},
      {"fields", "E_z and B_theta on a (t, r) grid"},
      {"simulate", "integrate one trajectory"},
      {"triplet", "classify an equilibrium triplet"},
      {"continue", "continue the T-periodic orbit in k"},
      {"twist-check", "twist coefficients and certificate"},
      {"subharmonics", "search (p, q) subharmonics"},
      {"stability", "perturbation ensemble around the periodic orbit"}};
  // flag name -> config path (object, key)
  const std::vector<std::tuple<std::string, std::string, std::string>> flags = {
      {"--T", "profile", "T"},       {"--I0", "profile", "I0"},        {"--k", "", "k"},
      {"--rbar", "triplet", "rbar"}, {"--branch", "triplet", "branch"}, {"--L", "triplet", "L"},
      {"--pz", "triplet", "p_z"},    {"--rtol", "tol", "rtol"},         {"--atol", "tol", "atol"},
      {"--quad-tol", "tol", "quad"}, {"--c", "", "c"},                  {"--delta", "", "delta"},
      {"--horizon", "", "horizon"},  {"--members", "", "members"},      {"--samples", "", "samples"}};

  std::string chosen;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--profile", profile_type, "sinusoid | fourier | square");
    sub->add_option("--system", system, "radial | cylindrical | cartesian");
    sub->add_option("--formula", formula, "taylor | unweighted");
    for (const auto& [flag, obj, key] : flags) {
      auto* o = sub->add_option_function<double>(flag, [&numeric, f = flag](double v) { numeric[f] = v; });
      (void)o;
    }
    sub->callback([&chosen, n = name] { chosen = n; });
  }

  const auto t_start = std::chrono::steady_clock::now();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_validation;
  }

  context ctx;
  ctx.command = chosen;
  ctx.out_dir = out_dir;
  try {
    json cfg = json::object();
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw validation_error("cannot open config file '" + config_path + "'");
      try {
        cfg = json::parse(f);
      } catch (const json::exception& e) {
        throw validation_error(std::string("malformed config: ") + e.what());
      }
      if (!cfg.is_object()) throw validation_error("config must be a JSON object");
    }
    for (const auto& [flag, obj, key] : flags) {
      auto it = numeric.find(flag);
      if (it == numeric.end()) continue;
      json& target = obj.empty() ? cfg : cfg[obj];
      const bool integral = key == "branch" || key == "horizon" || key == "members" || key == "samples";
      if (integral) target[key] = static_cast<long long>(std::llround(it->second));
      else target[key] = it->second;
    }
    if (!profile_type.empty()) cfg["profile"]["type"] = profile_type;
    if (!system.empty()) cfg["system"] = system;
    if (!formula.empty()) cfg["formula"] = formula;
    if (app.get_subcommand(chosen)->get_option("--seed")->count()) cfg["seed"] = seed;
    if (chosen == "stability" && !cfg.contains("seed")) cfg["seed"] = probe_options{}.seed;
    if (cfg.contains("k") && chosen != "triplet") cfg["profile"]["k"] = cfg["k"];
    if (chosen == "triplet" && cfg.contains("profile") && cfg["profile"].contains("T") && !cfg.contains("T"))
      cfg["T"] = cfg["profile"]["T"];
    if (chosen == "triplet" && cfg.contains("profile") && cfg["profile"].contains("I0"))
      cfg["triplet"]["I0"] = cfg["profile"]["I0"];
    ctx.config = cfg;

    std::error_code ec;
    std::filesystem::create_directories(ctx.out_dir, ec);
    if (ec) throw validation_error("cannot create output directory '" + out_dir + "'");

    static const std::map<std::string, std::function<void(context&)>> table = {
        {"potential-table", cmd_potential_table}, {"fields", cmd_fields},           {"simulate", cmd_simulate},
        {"triplet", cmd_triplet},                 {"continue", cmd_continue},       {"twist-check", cmd_twist_check},
        {"subharmonics", cmd_subharmonics},       {"stability", cmd_stability}};
    table.at(chosen)(ctx);
  } catch (const validation_error& e) {
    err << "wirefield " << chosen << ": " << e.what() << "\n";
    return exit_validation;
  } catch (const numerical_error& e) {
    err << "wirefield " << chosen << ": numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const json::exception& e) {
    err << "wirefield " << chosen << ": bad config: " << e.what() << "\n";
    return exit_validation;
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  json manifest{{"command", ctx.command},
                {"inputs", ctx.config},
                {"config_hash", hex64(fnv1a(ctx.config.dump()))},
                {"version", version},
                {"seed", ctx.config.value("seed", json())},
                {"wall_time_s", wall},
                {"artifacts", ctx.artifacts},
                {"result", ctx.result}};
  out << manifest.dump(2) << "\n";
  return exit_ok;
}

}  // namespace wirefield::cli
