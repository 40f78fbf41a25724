#include "kdvh/cli.hpp"

#include "kdvh/hodograph.hpp"
#include "kdvh/io.hpp"
#include "kdvh/painleve.hpp"
#include "kdvh/parallel.hpp"
#include "kdvh/profile.hpp"
#include "kdvh/spectral.hpp"
#include "kdvh/universality.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <charconv>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <list>
#include <map>
#include <memory>
#include <set>

namespace kdvh::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Knobs: every configurable value has a name (CLI flag and JSON key), a kind
// and a default. A resolved config is a JSON object holding all of them.

enum class Kind { Int, Real, OptReal, Str, Bool, RealList };

struct Knob {
  std::string name;
  Kind kind;
  json def;
  std::string help;
};

using KnobTable = std::vector<Knob>;

const std::vector<std::string> kTasks = {"catastrophe", "hodograph", "p12", "evolve",
                                         "universality"};

KnobTable profile_knobs() {
  return {{"profile", Kind::Str, "sech2", "initial hump: sech2 | gaussian"},
          {"m", Kind::Int, 1, "flow index"}};
}

KnobTable evolve_numerics(double Lx, int N) {
  return {{"Lx", Kind::Real, Lx, "periodic box half-width"},
          {"N", Kind::Int, N, "Fourier modes (power of two)"},
          {"dt", Kind::OptReal, nullptr, "fixed time step (automatic when omitted)"},
          {"c_cfl", Kind::Real, 0.5, "advective step safety factor"},
          {"c_disp", Kind::Real, 0.1, "dispersive step safety factor"},
          {"sentinel_tol", Kind::Real, 1e-10, "allowed spectral tail ratio"}};
}

KnobTable knobs_for(const std::string& task) {
  KnobTable t;
  auto append = [&t](const KnobTable& more) { t.insert(t.end(), more.begin(), more.end()); };
  if (task == "catastrophe") {
    append(profile_knobs());
    t.push_back({"scan_points", Kind::Int, 20001, "samples of the breakup scan"});
  } else if (task == "hodograph") {
    append(profile_knobs());
    t.push_back({"x", Kind::RealList, "-5:5:0.1", "x values: list a,b,c or range lo:hi:step"});
    t.push_back({"t", Kind::Real, 0.1, "time (before breakup)"});
  } else if (task == "p12") {
    t = {{"T", Kind::Real, 0.0, "Painleve time"},
         {"L", Kind::Real, 120.0, "grid half-width"},
         {"N", Kind::Int, 7201, "grid points"},
         {"fd_accuracy", Kind::Int, 12, "finite-difference order (even)"},
         {"dT", Kind::Real, 0.25, "continuation step"},
         {"start_T", Kind::Real, -3.0, "continuation origin"},
         {"newton_tol", Kind::Real, 1e-12, "Newton target residual"},
         {"accept_residual", Kind::Real, 1e-10, "largest accepted residual"},
         {"boundary_constant", Kind::Real, 1.0, "far-field budget C in C/(L/2)"}};
  } else if (task == "evolve") {
    append(profile_knobs());
    t.push_back({"eps", Kind::Real, 0.05, "dispersion parameter"});
    t.push_back({"t", Kind::Real, 0.15, "final time"});
    t.push_back({"snap", Kind::RealList, json::array(), "extra snapshot times"});
    append(evolve_numerics(60.0, 16384));
    t.push_back({"checkpoint", Kind::Bool, false, "write a binary checkpoint of the final state"});
    t.push_back({"restart", Kind::Str, "", "start from this checkpoint instead of u0"});
  } else if (task == "universality") {
    append(profile_knobs());
    t.push_back({"eps", Kind::RealList, json::array({0.1, 0.07, 0.05, 0.035}), "eps ladder"});
    t.push_back({"X", Kind::RealList, "-3:3:0.5", "window X values"});
    t.push_back({"T", Kind::RealList, json::array({-1.0, 0.0, 1.0}), "window T values"});
    // Resolves eps = 0.035 through T = 1 under the default sentinel.
    append(evolve_numerics(30.0, 32768));
    t.push_back({"L", Kind::Real, 120.0, "Painleve grid half-width"});
    t.push_back({"p12_N", Kind::Int, 7201, "Painleve grid points"});
    t.push_back({"p12_fd_accuracy", Kind::Int, 12, "Painleve finite-difference order"});
    t.push_back({"prebreakup", Kind::Bool, true, "also measure the pre-breakup error"});
    t.push_back({"prebreakup_dx", Kind::Real, -0.5, "pre-breakup point x_c + dx"});
    t.push_back({"prebreakup_time_fraction", Kind::Real, 0.7, "pre-breakup time fraction of t_c"});
  } else if (task == "sweep") {
    t = {{"axis", Kind::Str, "eps", "knob of the task to vary"},
         {"values", Kind::RealList, json::array(), "values of the swept knob"}};
  } else {
    throw ConfigError("unknown subcommand '" + task + "'");
  }
  return t;
}

const Knob& find_knob(const KnobTable& table, const std::string& name) {
  for (const auto& k : table) {
    if (k.name == name) return k;
  }
  throw ConfigError("unknown configuration key '" + name + "'");
}

double parse_real(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("'" + s + "' is not a number (" + what + ")");
  }
  return v;
}

long long parse_int(const std::string& s, const std::string& what) {
  long long v = 0;
  const char* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("'" + s + "' is not an integer (" + what + ")");
  }
  return v;
}

// "a,b,c" or "lo:hi:step" (inclusive).
json parse_list(const std::string& s, const std::string& what) {
  json out = json::array();
  if (s.empty()) return out;
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t pos; (pos = s.find(':', start)) != std::string::npos; start = pos + 1) {
      parts.push_back(s.substr(start, pos - start));
    }
    parts.push_back(s.substr(start));
    if (parts.size() != 3) throw ConfigError("range '" + s + "' must be lo:hi:step (" + what + ")");
    const double lo = parse_real(parts[0], what);
    const double hi = parse_real(parts[1], what);
    const double step = parse_real(parts[2], what);
    if (!(step > 0.0) || hi < lo) throw ConfigError("bad range '" + s + "' (" + what + ")");
    const long n = std::lround(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (long i = 0; i < n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
  }
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t pos = s.find(',', start);
    if (pos == std::string::npos) pos = s.size();
    out.push_back(parse_real(s.substr(start, pos - start), what));
    start = pos + 1;
  }
  return out;
}

json coerce(const Knob& k, const json& v) {
  const std::string& what = k.name;
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    switch (k.kind) {
      case Kind::Int: return parse_int(s, what);
      case Kind::Real: return parse_real(s, what);
      case Kind::OptReal:
        if (s.empty() || s == "auto") return nullptr;
        return parse_real(s, what);
      case Kind::Str: return s;
      case Kind::Bool:
        if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
        if (s == "false" || s == "0" || s == "no" || s == "off") return false;
        throw ConfigError("'" + s + "' is not a boolean (" + what + ")");
      case Kind::RealList: return parse_list(s, what);
    }
  }
  switch (k.kind) {
    case Kind::Int:
      if (v.is_number_integer()) return v;
      break;
    case Kind::Real:
      if (v.is_number()) return v.get<double>();
      break;
    case Kind::OptReal:
      if (v.is_null()) return v;
      if (v.is_number()) return v.get<double>();
      break;
    case Kind::Str:
      break;
    case Kind::Bool:
      if (v.is_boolean()) return v;
      break;
    case Kind::RealList:
      if (v.is_number()) return json::array({v.get<double>()});
      if (v.is_array()) {
        json out = json::array();
        for (const auto& e : v) {
          if (!e.is_number()) throw ConfigError("non-numeric entry in list '" + what + "'");
          out.push_back(e.get<double>());
        }
        return out;
      }
      break;
  }
  throw ConfigError("wrong type for configuration key '" + what + "'");
}

json defaults(const std::string& task) {
  json cfg = json::object();
  for (const auto& k : knobs_for(task)) cfg[k.name] = coerce(k, k.def);
  return cfg;
}

// Keys that may appear in a config file besides the task knobs.
const std::set<std::string> kMetaKeys = {"subcommand", "task", "jobs", "seed"};

void merge_into(json& cfg, const std::string& task, const json& overrides) {
  const KnobTable table = knobs_for(task);
  for (const auto& [key, value] : overrides.items()) {
    if (kMetaKeys.count(key)) continue;
    cfg[key] = coerce(find_knob(table, key), value);
  }
}

std::vector<double> reals(const json& v) { return v.get<std::vector<double>>(); }

// ---------------------------------------------------------------------------
// Output locations. `--out` naming a file with an extension fixes the stem
// of every file the task writes; otherwise it is a directory.

struct Outputs {
  fs::path dir = ".";
  std::string stem;

  fs::path file(const std::string& suffix) const { return dir / (stem + suffix); }
};

Outputs outputs_for(const std::string& out, const std::string& default_stem) {
  Outputs o;
  o.stem = default_stem;
  if (out.empty()) return o;
  const fs::path p(out);
  if (p.has_extension()) {
    o.dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    o.stem = p.stem().string();
  } else {
    o.dir = p;
  }
  return o;
}

struct Context {
  std::ostream* out = nullptr;
  std::ostream* log = nullptr;
  bool verbose = false;
  int jobs = 1;
  long long seed = 0;
  PainleveContinuation* shared_path = nullptr;  // reused across a T sweep
};

void say(const Context& ctx, const std::string& msg) {
  if (ctx.verbose && ctx.log) *ctx.log << "[kdvh] " << msg << '\n';
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json echo(const std::string& task, const json& cfg, const Context& ctx) {
  json e = cfg;
  e["subcommand"] = task;
  e["jobs"] = ctx.jobs;
  e["seed"] = ctx.seed;
  return e;
}

void write_echo(const Outputs& o, const std::string& task, const json& cfg, const Context& ctx) {
  io::write_atomic(o.file(".config.json"), dump(echo(task, cfg, ctx)));
}

// ---------------------------------------------------------------------------
// Tasks

json catastrophe_json(const CatastrophePoint& cp) {
  return {{"m", cp.m},
          {"u_c", cp.u_c},
          {"x_c", cp.x_c},
          {"t_c", cp.t_c},
          {"xi_star", cp.xi_star},
          {"k", cp.k},
          {"F4", cp.F4},
          {"residuals", {{"F", cp.residual_F}, {"F_u", cp.residual_F1}, {"F_uu", cp.residual_F2}}}};
}

json constants_json(const UniversalityConstants& c) {
  return {{"a1", c.a1}, {"a2", c.a2}, {"a3", c.a3}, {"a4", c.a4}, {"Cm", c.Cm}};
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

void run_catastrophe(const json& cfg, const Outputs& o, const Context& ctx) {
  const InitialProfile p = InitialProfile::by_name(cfg["profile"]);
  CatastropheOptions opts;
  opts.scan_points = cfg["scan_points"];
  const CatastrophePoint cp = catastrophe(p, cfg["m"], opts);
  json j = catastrophe_json(cp);
  j["profile"] = p.name();
  io::write_atomic(o.file(".json"), dump(j));
  write_echo(o, "catastrophe", cfg, ctx);
  if (ctx.out) *ctx.out << dump(j);
}

void run_hodograph(const json& cfg, const Outputs& o, const Context& ctx) {
  const InitialProfile p = InitialProfile::by_name(cfg["profile"]);
  const std::vector<double> xs = reals(cfg["x"]);
  const double t = cfg["t"];
  Field x(static_cast<Eigen::Index>(xs.size())), u(x.size()), xi(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const CharacteristicSolution s = solve_u(xs[i], t, p, cfg["m"]);
    x[i] = s.x;
    u[i] = s.u;
    xi[i] = s.xi;
  }
  io::write_atomic(o.file(".csv"), io::csv({"x", "u", "xi"}, {&x, &u, &xi}));
  write_echo(o, "hodograph", cfg, ctx);
}

PainleveOptions painleve_options(const json& cfg) {
  PainleveOptions po;
  po.L = cfg["L"];
  po.N = cfg["N"];
  po.fd_accuracy = cfg["fd_accuracy"];
  po.dT = cfg["dT"];
  po.start_T = cfg["start_T"];
  po.newton_tol = cfg["newton_tol"];
  po.accept_residual = cfg["accept_residual"];
  po.boundary_constant = cfg["boundary_constant"];
  return po;
}

void run_p12(const json& cfg, const Outputs& o, const Context& ctx) {
  const PainleveOptions po = painleve_options(cfg);
  const double T = cfg["T"];
  say(ctx, "solving P_I^2 at T = " + io::format_double(T));
  const PainleveField f = ctx.shared_path ? ctx.shared_path->solve(T) : solve_p12(T, po);
  io::write_atomic(o.file(".csv"),
                   io::csv({"X", "U", "U_X", "U_XX", "U_XXX", "U_T", "Q", "Q_T", "U_XXT"},
                           {&f.X, &f.U, &f.U_X, &f.U_XX, &f.U_XXX, &f.U_T, &f.Q, &f.Q_T, &f.U_XXT}));
  const json side = {{"T", f.T},
                     {"L", f.L},
                     {"N", f.size()},
                     {"h", f.h()},
                     {"ode_residual", f.newton_residual},
                     {"newton_iterations", f.newton_iterations},
                     {"boundary_deviation", f.boundary_deviation},
                     {"U_at_0", f.interpolate(f.U, 0.0)},
                     {"csv", o.stem + ".csv"}};
  io::write_atomic(o.file(".json"), dump(side));
  write_echo(o, "p12", cfg, ctx);
}

EvolveOptions evolve_options(const json& cfg) {
  EvolveOptions eo;
  if (!cfg["dt"].is_null()) eo.dt = cfg["dt"].get<double>();
  eo.c_cfl = cfg["c_cfl"];
  eo.c_disp = cfg["c_disp"];
  eo.sentinel_tol = cfg["sentinel_tol"];
  return eo;
}

void run_evolve(const json& cfg, const Outputs& o, const Context& ctx) {
  const int m = cfg["m"];
  const double eps = cfg["eps"];
  SpectralState s;
  const std::string restart = cfg["restart"];
  if (restart.empty()) {
    s = init_state(InitialProfile::by_name(cfg["profile"]), eps, m, cfg["Lx"], cfg["N"]);
  } else {
    s = io::read_checkpoint(restart);
    if (s.flow.m != m || s.flow.eps != eps) {
      throw ConfigError("checkpoint flow (m, eps) differs from the requested one");
    }
  }
  const double t_final = cfg["t"];
  std::set<double> times;
  for (double t : reals(cfg["snap"])) times.insert(t);
  times.insert(t_final);
  if (*times.begin() < s.t) throw DomainError("snapshot time before the start time");
  if (*times.rbegin() > t_final) throw ConfigError("snapshot time after the final time");

  EvolveOptions eo = evolve_options(cfg);
  eo.record_dt = true;
  const Conserved c0 = conserved(s.u, s.dx());
  const double t0 = s.t;
  json snaps = json::array();
  std::vector<double> dt_history;
  int steps = 0, index = 0;
  for (double t : times) {
    say(ctx, "evolving to t = " + io::format_double(t));
    EvolveStats st;
    s = evolve(s, t, eo, &st);
    steps += st.steps;
    dt_history.insert(dt_history.end(), st.dt_history.begin(), st.dt_history.end());
    char name[32];
    std::snprintf(name, sizeof name, "_snap%03d.csv", index++);
    const Field x = s.x();
    io::write_atomic(o.file(name), io::csv({"x", "u"}, {&x, &s.u}));
    snaps.push_back({{"t", t},
                     {"file", o.stem + name},
                     {"steps", st.steps},
                     {"tail_ratio", st.tail_ratio},
                     {"mass_drift", st.mass_drift},
                     {"h0_drift", st.h0_drift}});
  }
  const Conserved c1 = conserved(s.u, s.dx());
  const double span = std::max(s.t - t0, 1e-300);
  const double mass_drift = std::abs(c1.mass - c0.mass) / std::abs(c0.mass);
  const double h0_drift = std::abs(c1.h0 - c0.h0) / std::abs(c0.h0);
  json manifest = {{"m", m},
                   {"eps", eps},
                   {"Lx", s.Lx},
                   {"N", s.N},
                   {"t_start", t0},
                   {"t_final", s.t},
                   {"steps", steps},
                   {"mass_drift", mass_drift},
                   {"h0_drift", h0_drift},
                   {"mass_drift_per_time", mass_drift / span},
                   {"h0_drift_per_time", h0_drift / span},
                   {"snapshots", snaps},
                   {"dt_history", dt_history}};
  if (cfg["checkpoint"].get<bool>()) {
    io::write_checkpoint(o.file(".kdvh"), s);
    manifest["checkpoint"] = o.stem + ".kdvh";
  }
  io::write_atomic(o.file("_manifest.json"), dump(manifest));
  write_echo(o, "evolve", cfg, ctx);
}

void run_universality(const json& cfg, const Outputs& o, const Context& ctx) {
  const InitialProfile p = InitialProfile::by_name(cfg["profile"]);
  const int m = cfg["m"];
  StudyOptions so;
  so.Lx = cfg["Lx"];
  so.N = cfg["N"];
  so.evolve = evolve_options(cfg);
  so.painleve.L = cfg["L"];
  so.painleve.N = cfg["p12_N"];
  so.painleve.fd_accuracy = cfg["p12_fd_accuracy"];
  so.prebreakup = cfg["prebreakup"];
  so.prebreakup_dx = cfg["prebreakup_dx"];
  so.prebreakup_time_fraction = cfg["prebreakup_time_fraction"];
  so.jobs = ctx.jobs;
  const std::vector<double> eps = reals(cfg["eps"]);
  if (eps.empty()) throw ConfigError("eps ladder is empty");
  say(ctx, "scaling study over " + std::to_string(eps.size()) + " eps values");
  const ScalingReport r = scaling_study(p, m, eps, reals(cfg["X"]), reals(cfg["T"]), so);

  json results = json::array();
  Field c_eps(static_cast<Eigen::Index>(r.results.size())), c_lead(c_eps.size()),
      c_corr(c_eps.size()), c_pre(c_eps.size());
  std::vector<Field> cols(8);
  std::size_t total = 0;
  for (const auto& e : r.results) total += e.samples.size();
  for (auto& c : cols) c.resize(static_cast<Eigen::Index>(total));
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < r.results.size(); ++i) {
    const auto& e = r.results[i];
    c_eps[i] = e.eps;
    c_lead[i] = e.E_lead;
    c_corr[i] = e.E_corr;
    c_pre[i] = e.prebreakup_error;
    json samples = json::array();
    for (const auto& smp : e.samples) {
      samples.push_back({{"X", smp.X}, {"T", smp.T}, {"x", smp.x}, {"t", smp.t},
                         {"u_num", smp.u_num}, {"u_lead", smp.u_lead}, {"u_corr", smp.u_corr}});
      const double vals[8] = {e.eps, smp.X, smp.T, smp.x, smp.t, smp.u_num, smp.u_lead, smp.u_corr};
      for (int c = 0; c < 8; ++c) cols[c][row] = vals[c];
      ++row;
    }
    json entry = {{"eps", e.eps},
                  {"E_lead", e.E_lead},
                  {"E_corr", e.E_corr},
                  {"steps", e.steps},
                  {"mass_drift", e.mass_drift},
                  {"h0_drift", e.h0_drift},
                  {"tail_ratio", e.tail_ratio},
                  {"samples", samples}};
    if (so.prebreakup) {
      entry["prebreakup"] = {{"u_num", e.prebreakup_u_num},
                           {"u_hodograph", e.prebreakup_u_hodograph},
                           {"error", e.prebreakup_error}};
    }
    results.push_back(entry);
  }
  json residuals = json::array();
  for (const auto& [T, res] : r.painleve_residuals) residuals.push_back({{"T", T}, {"residual", res}});

  json report = {{"profile", r.profile},
                 {"m", r.m},
                 {"catastrophe", catastrophe_json(r.catastrophe)},
                 {"constants", constants_json(r.constants)},
                 {"painleve_residuals", residuals},
                 {"results", results},
                 {"slopes",
                  {{"E_lead", optional_json(r.slope_lead)},
                   {"E_corr", optional_json(r.slope_corr)},
                   {"prebreakup", optional_json(r.slope_prebreakup)}}}};
  if (so.prebreakup) {
    const double t1 = so.prebreakup_time_fraction * r.catastrophe.t_c;
    report["prebreakup_point"] = {{"x", r.catastrophe.x_c + so.prebreakup_dx}, {"t", t1}};
  }
  io::write_atomic(o.file(".json"), dump(report));
  io::write_atomic(o.file("_errors.csv"), io::csv({"eps", "E_lead", "E_corr", "prebreakup_error"},
                                                  {&c_eps, &c_lead, &c_corr, &c_pre}));
  io::write_atomic(o.file("_samples.csv"),
                   io::csv({"eps", "X", "T", "x", "t", "u_num", "u_lead", "u_corr"},
                           {&cols[0], &cols[1], &cols[2], &cols[3], &cols[4], &cols[5], &cols[6],
                            &cols[7]}));
  write_echo(o, "universality", cfg, ctx);
}

void run_task(const std::string& task, const json& cfg, const Outputs& o, const Context& ctx) {
  if (task == "catastrophe") return run_catastrophe(cfg, o, ctx);
  if (task == "hodograph") return run_hodograph(cfg, o, ctx);
  if (task == "p12") return run_p12(cfg, o, ctx);
  if (task == "evolve") return run_evolve(cfg, o, ctx);
  if (task == "universality") return run_universality(cfg, o, ctx);
  throw ConfigError("unknown subcommand '" + task + "'");
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

json error_json(const std::string& kind, const std::string& family, const std::string& message,
                int code) {
  return {{"error", {{"kind", kind}, {"family", family}, {"message", message}}}, {"exit_code", code}};
}

// Runs the template task once per value; returns the exit code.
int run_sweep(const json& sweep_cfg, const std::string& task, const json& task_cfg,
              const fs::path& dir, const Context& ctx) {
  const std::string axis = sweep_cfg["axis"];
  const std::vector<double> values = reals(sweep_cfg["values"]);
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  const Knob& knob = find_knob(knobs_for(task), axis);
  if (knob.kind != Kind::Real) throw ConfigError("sweep axis '" + axis + "' is not a real knob");

  std::unique_ptr<PainleveContinuation> path;
  Context job_ctx = ctx;
  job_ctx.out = nullptr;
  if (task == "p12") {
    path = std::make_unique<PainleveContinuation>(painleve_options(task_cfg));
    job_ctx.shared_path = path.get();
  }

  struct JobRecord {
    std::string dir, started, finished;
    double seconds = 0.0;
  };
  std::vector<JobRecord> records(values.size());
  auto job = [&](int i) {
    json cfg = task_cfg;
    cfg[axis] = values[i];
    records[i].dir = axis + "_" + io::format_double(values[i]);
    Outputs o;
    o.dir = dir / records[i].dir;
    o.stem = task;
    records[i].started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    struct Stamp {
      JobRecord& r;
      std::chrono::steady_clock::time_point t0;
      ~Stamp() {
        r.finished = utc_now();
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      }
    } stamp{records[i], t0};
    run_task(task, cfg, o, job_ctx);
  };
  // A shared continuation path serializes anyway; keep its order fixed.
  const int jobs = path ? 1 : ctx.jobs;
  const auto errors = parallel_for(static_cast<int>(values.size()), jobs, job);

  json entries = json::array();
  int failed = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    json e = {{"value", values[i]},
              {"dir", records[i].dir},
              {"started", records[i].started},
              {"finished", records[i].finished},
              {"wall_seconds", records[i].seconds}};
    if (!errors[i]) {
      e["status"] = "ok";
    } else {
      ++failed;
      e["status"] = "failed";
      try {
        std::rethrow_exception(errors[i]);
      } catch (const Error& err) {
        e["error"] = {{"kind", err.kind()}, {"message", err.what()}};
      } catch (const std::exception& err) {
        e["error"] = {{"kind", "InternalError"}, {"message", err.what()}};
      }
    }
    entries.push_back(e);
  }
  json manifest = {{"task", task},
                   {"axis", axis},
                   {"jobs", entries},
                   {"failed", failed},
                   {"template", echo(task, task_cfg, ctx)}};
  io::write_atomic(dir / "sweep_manifest.json", dump(manifest));
  json sweep_echo = echo("sweep", sweep_cfg, ctx);
  sweep_echo["task"] = echo(task, task_cfg, ctx);
  io::write_atomic(dir / "sweep.config.json", dump(sweep_echo));
  if (failed && ctx.log) {
    *ctx.log << error_json("PartialFailure", "numerical",
                           std::to_string(failed) + " of " + std::to_string(values.size()) +
                               " sweep jobs failed; see sweep_manifest.json",
                           2)
                    .dump()
             << '\n';
  }
  return failed ? 2 : 0;
}

// ---------------------------------------------------------------------------
// Parsing

struct TaskParser {
  std::string name;
  CLI::App* app = nullptr;
  KnobTable knobs;
  std::map<std::string, std::string> raw;
};

void register_knobs(TaskParser& tp) {
  for (const auto& k : tp.knobs) {
    tp.app->add_option("--" + k.name, tp.raw[k.name], k.help + " [default " + k.def.dump() + "]");
  }
}

// Values given explicitly on the command line.
json given(const TaskParser& tp) {
  json out = json::object();
  for (const auto& k : tp.knobs) {
    if (tp.app->get_option("--" + k.name)->count() > 0) out[k.name] = tp.raw.at(k.name);
  }
  return out;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  return j;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Small-dispersion KdV hierarchy: breakup, Painleve I2 universality, spectral runs"};
  app.require_subcommand(0, 1);
  std::string config_path, out_path;
  int jobs = 1;
  long long seed = 0;
  bool verbose = false;
  app.add_option("--config", config_path, "JSON config (keys as the long flags)");
  app.add_option("--out", out_path, "output directory, or a file whose stem names all outputs");
  app.add_option("--jobs", jobs, "concurrent jobs for eps ladders and sweeps")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "reserved; no computation is random");
  app.add_flag("--verbose", verbose, "progress on stderr");

  std::list<TaskParser> parsers;
  auto add_task = [&](CLI::App* parent, const std::string& name, const std::string& desc) {
    TaskParser& tp = parsers.emplace_back();
    tp.name = name;
    tp.app = parent->add_subcommand(name, desc);
    tp.app->fallthrough();
    tp.knobs = knobs_for(name);
    register_knobs(tp);
    return &tp;
  };
  const std::map<std::string, std::string> descriptions = {
      {"catastrophe", "breakup point of the dispersionless flow (JSON)"},
      {"hodograph", "dispersionless solution on an x list (CSV)"},
      {"p12", "P_I^2 solution and derived fields at one T (CSV + JSON)"},
      {"evolve", "spectral evolution with snapshots, manifest and checkpoint"},
      {"universality", "eps-scaling study of the Painleve prediction (JSON + CSV)"}};
  std::map<std::string, TaskParser*> top;
  for (const auto& t : kTasks) top[t] = add_task(&app, t, descriptions.at(t));
  TaskParser* sweep = add_task(&app, "sweep", "run a task over a list of values of one knob");
  std::map<std::string, TaskParser*> nested;
  for (const auto& t : kTasks) nested[t] = add_task(sweep->app, t, descriptions.at(t));
  sweep->app->require_subcommand(0, 1);

  auto fail = [&](const std::string& kind, const std::string& family, const std::string& msg,
                  int code) {
    err << error_json(kind, family, msg, code).dump() << '\n';
    return code;
  };

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
      return fail("UsageError", "validation", e.what(), 1);
    }

    const json file_cfg = load_config(config_path);
    Context ctx;
    ctx.out = &out;
    ctx.log = &err;
    ctx.verbose = verbose;
    ctx.seed = seed;
    ctx.jobs = jobs;
    if (file_cfg.contains("jobs") && app.get_option("--jobs")->count() == 0) {
      ctx.jobs = std::max(1, file_cfg["jobs"].get<int>());
    }
    if (file_cfg.contains("seed") && app.get_option("--seed")->count() == 0) {
      ctx.seed = file_cfg["seed"].get<long long>();
    }

    // Which task: the command line wins, then the config file.
    std::string task;
    const auto chosen = app.get_subcommands();
    if (!chosen.empty()) {
      task = chosen.front()->get_name();
    } else if (file_cfg.contains("subcommand")) {
      task = file_cfg["subcommand"].get<std::string>();
    } else {
      return fail("UsageError", "validation", "no subcommand given; see --help", 1);
    }
    if (file_cfg.contains("subcommand") && file_cfg["subcommand"] != task) {
      throw ConfigError("config is for '" + file_cfg["subcommand"].get<std::string>() +
                        "' but the command line asks for '" + task + "'");
    }

    if (task != "sweep") {
      if (!top.count(task)) throw ConfigError("unknown subcommand '" + task + "'");
      json cfg = defaults(task);
      merge_into(cfg, task, file_cfg);
      merge_into(cfg, task, given(*top.at(task)));
      run_task(task, cfg, outputs_for(out_path, task), ctx);
      return 0;
    }

    json sweep_cfg = defaults("sweep");
    merge_into(sweep_cfg, "sweep", file_cfg);
    merge_into(sweep_cfg, "sweep", given(*sweep));
    const json file_task = file_cfg.contains("task") ? file_cfg["task"] : json::object();
    std::string inner;
    const auto inner_chosen = sweep->app->get_subcommands();
    if (!inner_chosen.empty()) {
      inner = inner_chosen.front()->get_name();
    } else if (file_task.contains("subcommand")) {
      inner = file_task["subcommand"].get<std::string>();
    } else {
      inner = sweep_cfg["axis"] == "T" ? "p12" : "evolve";
    }
    if (!nested.count(inner)) throw ConfigError("unknown sweep task '" + inner + "'");
    json task_cfg = defaults(inner);
    merge_into(task_cfg, inner, file_task);
    merge_into(task_cfg, inner, given(*nested.at(inner)));
    return run_sweep(sweep_cfg, inner, task_cfg, out_path.empty() ? fs::path(".") : fs::path(out_path),
                     ctx);
  } catch (const Error& e) {
    const bool numerical = e.family() == Error::Family::Numerical;
    return fail(e.kind(), numerical ? "numerical" : "validation", e.what(), numerical ? 2 : 1);
  } catch (const fs::filesystem_error& e) {
    return fail("IOError", "validation", e.what(), 1);
  } catch (const json::exception& e) {
    return fail("ConfigError", "validation", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("InternalError", "numerical", e.what(), 2);
  }
}

}  // namespace kdvh::cli
