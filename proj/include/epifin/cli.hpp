#pragma once

// Command-line front end: argument/config parsing and subcommand dispatch.
//
// Exit status: 0 ok, 1 model error, 2 usage error, 3 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "epifin/epi_sir.hpp"
#include "epifin/errors.hpp"
#include "epifin/fundstats.hpp"
#include "epifin/fundstats_reference.hpp"
#include "epifin/gossip.hpp"
#include "epifin/io.hpp"
#include "epifin/netdiff.hpp"
#include "epifin/rdwave.hpp"

namespace epifin::cli {

using json = nlohmann::ordered_json;

enum class ExitCode : int { Ok = 0, ModelError = 1, Usage = 2, Io = 3 };

enum class Kind { Real, Integer, Text, Flag };

struct ParamSpec {
  std::string name;
  Kind kind = Kind::Real;
  json fallback;  // null: no default
  std::string help;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
  std::vector<std::string> choices;
  bool input_file = false;  // must exist before dispatch
};

namespace detail {

inline ParamSpec make_spec(std::string name, Kind kind, json def, std::string help) {
  ParamSpec p;
  p.name = std::move(name);
  p.kind = kind;
  p.fallback = std::move(def);
  p.help = std::move(help);
  return p;
}

inline ParamSpec real(std::string name, json def, std::string help, double lo = -std::numeric_limits<double>::infinity(),
                      double hi = std::numeric_limits<double>::infinity(), bool lo_open = false) {
  ParamSpec p = make_spec(std::move(name), Kind::Real, std::move(def), std::move(help));
  p.lo = lo;
  p.hi = hi;
  p.lo_open = lo_open;
  return p;
}
inline ParamSpec probability(std::string name, json def, std::string help) {
  return real(std::move(name), std::move(def), std::move(help), 0.0, 1.0);
}
inline ParamSpec positive(std::string name, json def, std::string help) {
  return real(std::move(name), std::move(def), std::move(help), 0.0, std::numeric_limits<double>::infinity(), true);
}
inline ParamSpec integer(std::string name, json def, std::string help, double lo, double hi = 1e15) {
  ParamSpec p = make_spec(std::move(name), Kind::Integer, std::move(def), std::move(help));
  p.lo = lo;
  p.hi = hi;
  return p;
}
inline ParamSpec text(std::string name, json def, std::string help, std::vector<std::string> choices = {}) {
  ParamSpec p = make_spec(std::move(name), Kind::Text, std::move(def), std::move(help));
  p.choices = std::move(choices);
  return p;
}
inline ParamSpec input(std::string name, std::string help) {
  ParamSpec p = make_spec(std::move(name), Kind::Text, json(), std::move(help));
  p.input_file = true;
  return p;
}
inline ParamSpec flag(std::string name, std::string help) {
  return make_spec(std::move(name), Kind::Flag, json(false), std::move(help));
}

inline std::vector<ParamSpec> network_source() {
  return {input("network", "network CSV (n rows of n weights, no header); generated when omitted"),
          integer("n", 10, "generated network size", 1),
          probability("density", 0.5, "generated edge probability")};
}

inline std::vector<ParamSpec> exchange_params() {
  return {probability("p_select", 1.0, "probability the item is selected in an exchange"),
          probability("p_drop", 0.0, "probability the sender drops the item after confirmed delivery"),
          probability("p_loss", 0.0, "probability the delivery confirmation is lost"),
          probability("p_gain", 1.0, "probability the data message reaches the partner"),
          probability("p_ext", json(), "exogenous acquisition probability (default p_select * p_gain)"),
          flag("tie_gain_loss", "set p_gain = 1 - p_loss"),
          text("params", json(), "exchange parameters as an inline JSON object, or @file.json")};
}

inline std::vector<ParamSpec> sir_params(double beta, double alpha, double mu) {
  return {real("beta", beta, "transmission rate", 0.0),
          real("alpha", alpha, "recovery rate", 0.0),
          real("mu", mu, "market entry-exit rate", 0.0),
          positive("n", 1.0, "total population N"),
          real("s0", json(), "initial susceptible (default N - i0 - r0)", 0.0),
          real("i0", 0.001, "initial informed", 0.0),
          real("r0", 0.0, "initial recovered", 0.0),
          positive("h", 0.01, "RK4 step")};
}

}  // namespace detail

/// Parameter table for a "command" or "command action" key.
inline const std::map<std::string, std::vector<ParamSpec>>& command_table() {
  using namespace detail;
  static const std::map<std::string, std::vector<ParamSpec>> table = [] {
    std::map<std::string, std::vector<ParamSpec>> t;
    t["network gen"] = {integer("n", 10, "network size", 1), probability("density", 0.5, "edge probability")};
    t["network centrality"] = network_source();
    t["network centrality"].push_back(integer("T", 3, "horizon in periods", 1));
    t["network eigen"] = network_source();
    t["network eigen"].push_back(positive("tol", 1e-12, "residual tolerance"));
    t["network eigen"].push_back(integer("max_iter", 100000, "iteration cap", 1));

    t["gossip matrix"] = exchange_params();
    t["gossip stationary"] = exchange_params();
    t["gossip simulate"] = exchange_params();
    for (auto& p : network_source()) t["gossip simulate"].push_back(p);
    t["gossip simulate"].push_back(integer("rounds", 100, "number of rounds", 1));
    t["gossip simulate"].push_back(text("informed", "0", "comma-separated initially informed node indices"));
    t["gossip simulate"].push_back(integer("replicates", 1, "independent replicates", 1, 100000));

    t["sir"] = sir_params(0.2, 0.1, 0.0);
    t["sir"].push_back(positive("horizon", 500.0, "end time"));
    t["sir"].push_back(text("preset", json(), "parameter preset", {"fig6b", "fig6c", "fig6d"}));
    t["sir"].push_back(integer("every", 1, "write every k-th step", 1));

    t["rd"] = {positive("D", 1.0, "diffusivity"),
               real("r", 1.0, "intrinsic flow rate", 0.0),
               positive("K", 1.0, "carrying capacity"),
               positive("dx", 0.1, "grid spacing"),
               positive("dt", 0.002, "time step"),
               positive("length", 200.0, "domain length"),
               positive("horizon", 80.0, "end time"),
               text("init", "step", "initial field: step or uniform:<v>"),
               real("front", 10.0, "step initial data: u = K for x < front", 0.0),
               integer("snapshot_every", 5000, "steps between snapshots", 1),
               text("rate", "logistic", "flow-rate family", {"logistic", "allee"}),
               real("allee_a", 0.0, "Allee threshold a (rate = allee)", 0.0),
               text("speed_window", json(), "fit window t0,t1 for a front-speed estimate"),
               real("level", json(), "front level for the speed estimate (default K/2)", 0.0)};

    t["fastslow"] = sir_params(0.5, 0.1, 0.05);
    for (auto& p : t["fastslow"])
      if (p.name == "i0") p.fallback = 0.01;
    t["fastslow"].push_back(real("epsilon", 0.01, "fast-variable multiplier", 0.0, 1.0, true));
    t["fastslow"].push_back(positive("horizon", 100.0, "end time"));
    t["fastslow"].push_back(real("layer_time", 5.0, "initial transient excluded from the deviation", 0.0));

    const auto funds = [] {
      return std::vector<ParamSpec>{input("input", "fund CSV")};
    };
    t["funds summarize"] = funds();
    t["funds summarize"].push_back(text("group_by", "category", "grouping field",
                                        {"fund_id", "family", "province", "category", "manager_race", "manager_gender"}));
    t["funds summarize"].push_back(text("value", "performance", "summarized field", {"assets", "performance"}));
    t["funds provinces"] = funds();
    t["funds demographics"] = funds();
    return t;
  }();
  return table;
}

inline const std::map<std::string, std::vector<std::string>>& command_actions() {
  static const std::map<std::string, std::vector<std::string>> actions{
      {"network", {"gen", "centrality", "eigen"}},
      {"gossip", {"matrix", "stationary", "simulate"}},
      {"sir", {}},
      {"rd", {}},
      {"fastslow", {}},
      {"funds", {"summarize", "provinces", "demographics"}},
  };
  return actions;
}

struct RunConfig {
  std::string command;
  std::string action;  // empty for single-action commands
  std::uint64_t seed = 0;
  std::string out;     // empty: CSV to stdout, no manifest
  bool quiet = false;
  std::string config_path;
  json params = json::object();  // effective values, defaults filled in

  std::string key() const { return action.empty() ? command : command + " " + action; }
};

class HelpRequested : public std::exception {
 public:
  explicit HelpRequested(std::string text) : text_(std::move(text)) {}
  const char* what() const noexcept override { return text_.c_str(); }

 private:
  std::string text_;
};

namespace detail {

inline json convert(const ParamSpec& spec, const std::string& raw, const std::string& origin) {
  const auto bad = [&](const std::string& why) {
    return UsageError("--" + spec.name + " (" + origin + "): " + why);
  };
  switch (spec.kind) {
    case Kind::Real: {
      double v = 0.0;
      if (!io::parse_double(raw, v)) throw bad("expected a number, got '" + raw + "'");
      return v;
    }
    case Kind::Integer: {
      long long v = 0;
      const auto t = io::trim(raw);
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc{} || ptr != t.data() + t.size()) throw bad("expected an integer, got '" + raw + "'");
      return v;
    }
    case Kind::Flag:
      return raw == "true" || raw == "1" || raw.empty();
    case Kind::Text:
      return raw;
  }
  return raw;
}

inline json from_config(const ParamSpec& spec, const json& v) {
  const auto bad = [&](const std::string& why) { return UsageError("config key '" + spec.name + "': " + why); };
  switch (spec.kind) {
    case Kind::Real:
      if (!v.is_number()) throw bad("expected a number");
      return v.get<double>();
    case Kind::Integer:
      if (!v.is_number_integer()) throw bad("expected an integer");
      return v.get<long long>();
    case Kind::Flag:
      if (!v.is_boolean()) throw bad("expected true/false");
      return v;
    case Kind::Text:
      if (v.is_string()) return v;
      if (spec.name == "params" && v.is_object()) return v.dump();
      if (v.is_number()) return v.dump();
      throw bad("expected a string");
  }
  return v;
}

inline void check_range(const ParamSpec& spec, const json& v) {
  if (v.is_null()) return;
  const auto fail = [&](const std::string& why) { throw UsageError("--" + spec.name + " " + why); };
  if (spec.kind == Kind::Real || spec.kind == Kind::Integer) {
    const double x = v.get<double>();
    const bool low_ok = spec.lo_open ? x > spec.lo : x >= spec.lo;
    if (!std::isfinite(x) || !low_ok || x > spec.hi) {
      std::ostringstream range;
      range << "must be in " << (spec.lo_open ? "(" : "[") << spec.lo << "," << spec.hi << "]";
      fail(range.str() + ", got " + v.dump());
    }
  }
  if (spec.kind == Kind::Text && !spec.choices.empty()) {
    const auto s = v.get<std::string>();
    if (std::find(spec.choices.begin(), spec.choices.end(), s) == spec.choices.end()) {
      std::string list;
      for (const auto& c : spec.choices) list += (list.empty() ? "" : "|") + c;
      fail("must be one of " + list + ", got '" + s + "'");
    }
  }
}

inline json load_json_file(const std::string& path) {
  if (!std::filesystem::exists(path)) throw IoError("config file not found: '" + path + "'");
  const std::string text = io::read_file(path);
  json parsed = json::parse(text, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) throw UsageError("--config: '" + path + "' is not a JSON object");
  return parsed;
}

}  // namespace detail

/// Parses argv into a validated RunConfig. Precedence, lowest first:
/// built-in defaults, preset (sir), --config file, --params (gossip),
/// explicit flags.
namespace detail {

inline std::string describe(const std::string& key) {
  static const std::map<std::string, std::string> text = {
      {"network", "contact networks: generate, diffusion centrality, leading eigenpair"},
      {"network gen", "write a random weighted network as CSV"},
      {"network centrality", "hearing matrix and diffusion centrality over T periods"},
      {"network eigen", "leading eigenvalue and Perron vector"},
      {"gossip", "pairwise exchange chain and population gossip"},
      {"gossip matrix", "4x4 pair transition matrix and loss scenarios"},
      {"gossip stationary", "stationary distribution of the pair chain"},
      {"gossip simulate", "informed-count trace on a network"},
      {"sir", "SIR information transmission (RK4)"},
      {"rd", "reaction-diffusion front on a 1-D grid"},
      {"fastslow", "singularly perturbed SIR against its reduced system"},
      {"funds", "fund sample reports"},
      {"funds summarize", "grouped mean/std/min/max"},
      {"funds provinces", "composition by province"},
      {"funds demographics", "composition by manager race and gender"},
  };
  const auto it = text.find(key);
  return it == text.end() ? key : it->second;
}

}  // namespace detail

inline RunConfig parse_args(int argc, const char* const* argv) {
  CLI::App app{"Information-diffusion simulations for fund-manager networks", "epifin"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string seed_raw, out, config_path;
  bool quiet = false;
  auto* seed_opt = app.add_option("--seed", seed_raw, "64-bit RNG seed (default 0)");
  auto* out_opt = app.add_option("--out", out, "output path (prefix for rd)");
  auto* config_opt = app.add_option("--config", config_path, "JSON file of parameters; flags win");
  auto* quiet_opt = app.add_flag("--quiet", quiet, "suppress informational output");

  struct Bound {
    CLI::App* sub = nullptr;
    std::string command, action;
    std::map<std::string, std::pair<CLI::Option*, std::string>> values;
    std::map<std::string, bool> flags;
  };
  std::vector<std::unique_ptr<Bound>> bound;
  const auto& table = command_table();

  for (const auto& [command, actions] : command_actions()) {
    CLI::App* sub = app.add_subcommand(command, detail::describe(command));
    sub->fallthrough();
    sub->set_help_flag("--help", "print help");
    std::vector<std::pair<CLI::App*, std::string>> leaves;
    if (actions.empty()) {
      leaves.emplace_back(sub, "");
    } else {
      sub->require_subcommand(1);
      for (const auto& a : actions) {
        CLI::App* leaf = sub->add_subcommand(a, detail::describe(command + " " + a));
        leaf->fallthrough();
        leaf->set_help_flag("--help", "print help");
        leaves.emplace_back(leaf, a);
      }
    }
    for (auto& [leaf, action] : leaves) {
      auto b = std::make_unique<Bound>();
      b->sub = leaf;
      b->command = command;
      b->action = action;
      const std::string key = action.empty() ? command : command + " " + action;
      for (const auto& spec : table.at(key)) {
        if (spec.kind == Kind::Flag) {
          b->flags[spec.name] = false;
          b->values[spec.name] = {leaf->add_flag("--" + spec.name, b->flags[spec.name], spec.help), ""};
        } else {
          auto& slot = b->values[spec.name];
          slot.first = leaf->add_option("--" + spec.name, slot.second, spec.help);
        }
      }
      bound.push_back(std::move(b));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) throw HelpRequested(app.help());
    throw UsageError(e.what());
  }

  const Bound* chosen = nullptr;
  for (const auto& b : bound)
    if (b->sub->parsed()) chosen = b.get();
  if (chosen == nullptr) throw UsageError("a subcommand is required");

  RunConfig cfg;
  cfg.command = chosen->command;
  cfg.action = chosen->action;
  const auto& specs = table.at(cfg.key());

  json file_cfg = json::object();
  if (config_opt->count() > 0) {
    cfg.config_path = config_path;
    json raw = detail::load_json_file(config_path);
    for (auto it = raw.begin(); it != raw.end(); ++it) {
      if (command_actions().count(it.key()) > 0) {
        if (it.key() == cfg.command && it.value().is_object())
          for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) file_cfg[jt.key()] = jt.value();
        continue;
      }
      file_cfg[it.key()] = it.value();
    }
  }

  // Globals.
  if (seed_opt->count() > 0) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(seed_raw.data(), seed_raw.data() + seed_raw.size(), v);
    if (ec != std::errc{} || p != seed_raw.data() + seed_raw.size())
      throw UsageError("--seed: expected an unsigned 64-bit integer, got '" + seed_raw + "'");
    cfg.seed = v;
  } else if (file_cfg.contains("seed")) {
    if (!file_cfg["seed"].is_number_unsigned() && !file_cfg["seed"].is_number_integer())
      throw UsageError("config key 'seed': expected an integer");
    cfg.seed = file_cfg["seed"].get<std::uint64_t>();
  }
  if (out_opt->count() > 0) cfg.out = out;
  else if (file_cfg.contains("out") && file_cfg["out"].is_string()) cfg.out = file_cfg["out"].get<std::string>();
  cfg.quiet = quiet_opt->count() > 0 ? quiet : file_cfg.value("quiet", false);
  for (const char* k : {"seed", "out", "quiet"}) file_cfg.erase(k);

  for (auto it = file_cfg.begin(); it != file_cfg.end(); ++it) {
    const bool known = std::any_of(specs.begin(), specs.end(), [&](const ParamSpec& s) { return s.name == it.key(); });
    if (!known) throw UsageError("config key '" + it.key() + "' is not a parameter of '" + cfg.key() + "'");
  }

  // Layered values.
  json layered = json::object();
  for (const auto& spec : specs) layered[spec.name] = spec.fallback;

  const auto flag_given = [&](const std::string& name) {
    return chosen->values.at(name).first->count() > 0;
  };

  if (cfg.command == "sir") {
    std::string preset_name;
    if (flag_given("preset")) preset_name = chosen->values.at("preset").second;
    else if (file_cfg.contains("preset") && file_cfg["preset"].is_string()) preset_name = file_cfg["preset"];
    if (!preset_name.empty()) {
      const auto p = sir::preset(preset_name);
      if (!p) throw UsageError("--preset must be one of fig6b|fig6c|fig6d, got '" + preset_name + "'");
      layered["beta"] = p->beta;
      layered["alpha"] = p->alpha;
      layered["mu"] = p->mu;
      layered["n"] = p->n_total;
    }
  }

  for (const auto& spec : specs)
    if (file_cfg.contains(spec.name)) layered[spec.name] = detail::from_config(spec, file_cfg[spec.name]);

  // --params: inline JSON (or @file) of exchange parameters.
  if (cfg.command == "gossip") {
    std::string raw;
    if (flag_given("params")) raw = chosen->values.at("params").second;
    else if (layered["params"].is_string()) raw = layered["params"].get<std::string>();
    if (!raw.empty()) {
      json pj;
      if (raw.front() == '@') {
        pj = detail::load_json_file(raw.substr(1));
      } else {
        pj = json::parse(raw, nullptr, false);
        if (pj.is_discarded() || !pj.is_object()) throw UsageError("--params: not a JSON object");
      }
      for (auto it = pj.begin(); it != pj.end(); ++it) {
        const auto spec = std::find_if(specs.begin(), specs.end(), [&](const ParamSpec& s) { return s.name == it.key(); });
        if (spec == specs.end() || spec->name == "params")
          throw UsageError("--params: unknown key '" + it.key() + "'");
        layered[it.key()] = detail::from_config(*spec, it.value());
      }
    }
  }

  for (const auto& spec : specs) {
    if (spec.kind == Kind::Flag) {
      if (flag_given(spec.name)) layered[spec.name] = chosen->flags.at(spec.name);
    } else if (flag_given(spec.name)) {
      layered[spec.name] = detail::convert(spec, chosen->values.at(spec.name).second, "flag");
    }
    detail::check_range(spec, layered[spec.name]);
  }

  for (const auto& spec : specs)
    if (spec.input_file && layered[spec.name].is_string()) {
      const auto path = layered[spec.name].get<std::string>();
      if (!std::filesystem::exists(path)) throw IoError("--" + spec.name + ": file not found: '" + path + "'");
    }
  if (cfg.command == "funds" && layered["input"].is_null()) throw UsageError("--input is required");
  if (cfg.command == "rd" && cfg.out.empty()) throw UsageError("--out (file prefix) is required for rd");

  layered.erase("params");
  cfg.params = std::move(layered);
  return cfg;
}

// ---------------------------------------------------------------------------
// Dispatch

namespace detail {

struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;  // path, contents
  json results = json::object();
  std::string stdout_text;  // informational, suppressed by --quiet
};

inline double num(const json& p, const char* k) { return p.at(k).get<double>(); }
inline long long integer_of(const json& p, const char* k) { return p.at(k).get<long long>(); }

inline netdiff::ManagerNetwork load_or_generate(const RunConfig& cfg) {
  const auto& p = cfg.params;
  if (p.contains("network") && p["network"].is_string())
    return netdiff::validate_network(io::parse_matrix_csv(io::read_file(p["network"].get<std::string>())));
  return netdiff::generate_random_network(static_cast<std::size_t>(integer_of(p, "n")), num(p, "density"), cfg.seed);
}

inline gossip::ExchangeParams exchange_from(json& p) {
  gossip::ExchangeParams ep;
  ep.p_select = num(p, "p_select");
  ep.p_drop = num(p, "p_drop");
  ep.p_loss = num(p, "p_loss");
  ep.p_gain = num(p, "p_gain");
  if (p["tie_gain_loss"].get<bool>()) {
    ep.p_gain = 1.0 - ep.p_loss;
    p["p_gain"] = ep.p_gain;
  }
  if (p["p_ext"].is_null()) p["p_ext"] = gossip::ExchangeParams::default_ext(ep.p_select, ep.p_gain);
  ep.p_ext = num(p, "p_ext");
  ep.validate();
  return ep;
}

inline std::string csv_rows(const std::string& header, const std::vector<std::vector<std::string>>& rows) {
  std::string out = header + "\n";
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k) out += ',';
      out += r[k];
    }
    out += '\n';
  }
  return out;
}

inline std::string f(double v) { return io::format_double(v); }

inline std::vector<std::size_t> parse_index_list(const std::string& raw) {
  std::vector<std::size_t> out;
  for (const auto& part : io::split_csv_line(raw)) {
    const auto t = io::trim(part);
    if (t.empty()) continue;
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size())
      throw UsageError("--informed: not a node index: '" + std::string(t) + "'");
    out.push_back(v);
  }
  return out;
}

inline Outputs run_network(RunConfig& cfg) {
  Outputs o;
  auto net = load_or_generate(cfg);
  const std::size_t n = net.size();
  if (cfg.action == "gen") {
    o.files.emplace_back(cfg.out, io::format_matrix_csv(net.weights()));
    o.results["strongly_connected"] = netdiff::strongly_connected(net);
  } else if (cfg.action == "centrality") {
    const int horizon = static_cast<int>(integer_of(cfg.params, "T"));
    const auto rep = netdiff::centrality_report(net, horizon);
    std::string header = "node,centrality";
    for (std::size_t j = 0; j < n; ++j) header += ",h" + std::to_string(j);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> r{std::to_string(i), f(rep.centrality[i])};
      for (std::size_t j = 0; j < n; ++j) r.push_back(f(rep.hearing(i, j)));
      rows.push_back(std::move(r));
    }
    o.files.emplace_back(cfg.out, csv_rows(header, rows));
  } else {
    const auto ep = netdiff::leading_eigenpair(net, num(cfg.params, "tol"),
                                               static_cast<std::size_t>(integer_of(cfg.params, "max_iter")));
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < n; ++i) rows.push_back({std::to_string(i), f(ep.eigenvector[i])});
    o.files.emplace_back(cfg.out, csv_rows("node,eigenvector", rows));
    o.results["eigenvalue"] = ep.eigenvalue;
    o.results["iterations"] = ep.iterations;
    o.results["residual"] = ep.residual;
    o.stdout_text = "eigenvalue " + f(ep.eigenvalue) + "\n";
  }
  return o;
}

inline Outputs run_gossip(RunConfig& cfg) {
  Outputs o;
  const auto ep = exchange_from(cfg.params);
  const char* labels[4] = {"00", "01", "10", "11"};
  if (cfg.action == "matrix") {
    const auto m = gossip::build_transition_matrix(ep);
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < 4; ++i) rows.push_back({labels[i], f(m[i][0]), f(m[i][1]), f(m[i][2]), f(m[i][3])});
    o.files.emplace_back(cfg.out, csv_rows("from,to_00,to_01,to_10,to_11", rows));
    const auto sc = gossip::classify_scenarios(ep);
    o.results["scenarios"] = {{"no_attempt", sc.no_attempt},
                              {"forward_loss", sc.forward_loss},
                              {"feedback_loss", sc.feedback_loss},
                              {"complete", sc.complete}};
  } else if (cfg.action == "stationary") {
    const auto pi = gossip::stationary_distribution(gossip::build_transition_matrix(ep));
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < 4; ++i) rows.push_back({labels[i], f(pi[i])});
    o.files.emplace_back(cfg.out, csv_rows("state,probability", rows));
  } else {
    auto net = load_or_generate(cfg);
    const auto informed = parse_index_list(cfg.params["informed"].get<std::string>());
    const int rounds = static_cast<int>(integer_of(cfg.params, "rounds"));
    const auto replicates = static_cast<std::size_t>(integer_of(cfg.params, "replicates"));
    std::vector<std::vector<std::string>> rows;
    std::size_t skips = 0;
    if (replicates == 1) {
      const auto tr = gossip::simulate_population(net, ep, informed, rounds, cfg.seed);
      for (std::size_t t = 0; t < tr.informed_count.size(); ++t)
        rows.push_back({std::to_string(t), std::to_string(tr.informed_count[t]), f(tr.informed_fraction[t])});
      skips = tr.isolated_skips;
      o.files.emplace_back(cfg.out, csv_rows("round,informed_count,informed_fraction", rows));
      o.results["final_informed"] = tr.informed_count.back();
    } else {
      const auto traces = gossip::simulate_replicates(net, ep, informed, rounds, cfg.seed, replicates);
      for (std::size_t r = 0; r < traces.size(); ++r) {
        for (std::size_t t = 0; t < traces[r].informed_count.size(); ++t)
          rows.push_back({std::to_string(r), std::to_string(t), std::to_string(traces[r].informed_count[t]),
                          f(traces[r].informed_fraction[t])});
        skips += traces[r].isolated_skips;
      }
      o.files.emplace_back(cfg.out, csv_rows("replicate,round,informed_count,informed_fraction", rows));
      o.results["replicate_seed_rule"] = "splitmix64(splitmix64(seed) ^ replicate)";
    }
    o.results["isolated_skips"] = skips;
  }
  return o;
}

inline sir::SirState initial_state(json& p) {
  const double n = num(p, "n");
  const double i0 = num(p, "i0");
  const double r0 = num(p, "r0");
  if (p["s0"].is_null()) p["s0"] = n - i0 - r0;
  return {num(p, "s0"), i0, r0, 0.0};
}

inline Outputs run_sir(RunConfig& cfg) {
  Outputs o;
  auto& p = cfg.params;
  const sir::SirParams sp{num(p, "beta"), num(p, "alpha"), num(p, "mu"), num(p, "n")};
  const auto init = initial_state(p);
  const auto traj = sir::integrate(sp, init, num(p, "h"), num(p, "horizon"));
  const auto every = static_cast<std::size_t>(integer_of(p, "every"));
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    if (k % every != 0 && k + 1 != traj.states.size()) continue;
    const auto& s = traj.states[k];
    rows.push_back({f(s.t), f(s.s), f(s.i), f(s.r)});
  }
  o.files.emplace_back(cfg.out, csv_rows("t,S,I,R", rows));
  if (sp.alpha + sp.mu > 0.0) o.results["r0"] = sir::basic_reproduction_number(sp);
  return o;
}

inline Outputs run_rd(RunConfig& cfg) {
  Outputs o;
  auto& p = cfg.params;
  rdwave::ReactionDiffusionConfig rc;
  rc.d_coeff = num(p, "D");
  rc.r_rate = num(p, "r");
  rc.k_cap = num(p, "K");
  rc.dx = num(p, "dx");
  rc.dt = num(p, "dt");
  rc.length = num(p, "length");
  rc.horizon = num(p, "horizon");
  rc.kind = p["rate"] == "allee" ? rdwave::RateKind::Allee : rdwave::RateKind::Logistic;
  rc.allee = num(p, "allee_a");
  rc.validate();

  const std::string init = p["init"].get<std::string>();
  rdwave::FieldState start;
  if (init == "step") {
    start = rdwave::step_field(rc, num(p, "front"));
  } else if (init.rfind("uniform:", 0) == 0) {
    double v = 0.0;
    if (!io::parse_double(init.substr(8), v)) throw UsageError("--init uniform:<v> needs a number");
    start = rdwave::uniform_field(rc, v);
  } else {
    throw UsageError("--init must be step or uniform:<v>, got '" + init + "'");
  }

  const auto series = rdwave::rd_integrate(rc, start, static_cast<std::size_t>(integer_of(p, "snapshot_every")));
  json times = json::array();
  json files = json::array();
  for (std::size_t k = 0; k < series.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "_%05zu.csv", k);
    const std::string path = cfg.out + name;
    std::vector<std::vector<std::string>> rows;
    for (std::size_t j = 0; j < series[k].u.size(); ++j) rows.push_back({f(rc.x(j)), f(series[k].u[j])});
    o.files.emplace_back(path, csv_rows("x,u", rows));
    times.push_back(series[k].t);
    files.push_back(path);
  }
  o.results["grid"] = {{"cells", rc.cells()}, {"dx", rc.dx}, {"first_x", rc.x(0)}, {"length", rc.length}};
  o.results["times"] = times;
  o.results["snapshots"] = files;
  const auto eq = rdwave::rd_equilibria(rc.rate());
  json eqs = json::array();
  for (const auto& e : eq) eqs.push_back({{"u", e.u}, {"slope", e.slope}, {"kind", rdwave::to_string(e.kind)}});
  o.results["equilibria"] = eqs;

  if (p["speed_window"].is_string()) {
    const auto parts = io::split_csv_line(p["speed_window"].get<std::string>());
    rdwave::FitWindow w;
    if (parts.size() != 2 || !io::parse_double(parts[0], w.t_start) || !io::parse_double(parts[1], w.t_end))
      throw UsageError("--speed_window expects t0,t1");
    if (p["level"].is_null()) p["level"] = rc.k_cap / 2.0;
    const auto est = rdwave::estimate_wave_speed(series, rc.dx, num(p, "level"), w);
    o.results["wave_speed"] = {{"speed", est.speed},
                               {"level", est.level},
                               {"fit_window", {w.t_start, w.t_end}},
                               {"residual", est.residual},
                               {"points", est.points}};
    o.stdout_text = "front speed " + f(est.speed) + "\n";
  }
  return o;
}

inline Outputs run_fastslow(RunConfig& cfg) {
  Outputs o;
  auto& p = cfg.params;
  rdwave::FastSlowConfig fc;
  fc.sir = {num(p, "beta"), num(p, "alpha"), num(p, "mu"), num(p, "n")};
  fc.init = initial_state(p);
  fc.epsilon = num(p, "epsilon");
  fc.h = num(p, "h");
  fc.horizon = num(p, "horizon");
  fc.layer_time = num(p, "layer_time");
  const auto res = rdwave::fast_slow_integrate(fc);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < res.trajectory.states.size(); ++k) {
    const auto& x = res.trajectory.states[k];
    rows.push_back({f(x.t), f(x.s), f(x.i), f(res.qss_trajectory.states[k].i)});
  }
  o.files.emplace_back(cfg.out, csv_rows("t,S,I_eps,I_qss", rows));
  o.results["sup_deviation"] = res.sup_deviation;
  o.stdout_text = "sup_deviation " + f(res.sup_deviation) + "\n";
  return o;
}

inline Outputs run_funds(RunConfig& cfg) {
  Outputs o;
  const auto records = fundstats::ingest_csv(cfg.params["input"].get<std::string>());
  json doc = json::object();
  std::vector<std::vector<std::string>> rows;
  std::string header;
  if (cfg.action == "summarize") {
    const auto group_by = cfg.params["group_by"].get<std::string>();
    const auto value = cfg.params["value"].get<std::string>();
    const auto summary = fundstats::summarize(records, group_by, value);
    header = "group,mean,std,min,max,count";
    json table = json::array();
    for (const auto& r : summary) {
      rows.push_back({io::csv_escape(r.group), f(r.mean), f(r.std), f(r.min), f(r.max), std::to_string(r.count)});
      table.push_back({{"group", r.group}, {"mean", r.mean}, {"std", r.std}, {"min", r.min}, {"max", r.max},
                       {"count", r.count}});
    }
    doc = {{"report", "summary"}, {"group_by", group_by}, {"value", value},
           {"std_estimator", "sample (n-1)"}, {"rows", table}};
    std::ostringstream ref;
    ref << "reference category summary (display only, not comparable to this input):\n";
    for (const auto& r : fundstats::reference::kCategorySummary)
      ref << "  " << r.sub_category << ": mean " << r.mean << ", std " << r.std << ", min " << r.min << ", max "
          << r.max << "\n";
    o.stdout_text = ref.str();
  } else if (cfg.action == "provinces") {
    header = "province,family_count,fund_count,pct_of_funds,pct_of_assets";
    json table = json::array();
    for (const auto& r : fundstats::province_report(records)) {
      const std::string name(fundstats::to_string(r.province));
      rows.push_back({io::csv_escape(name), std::to_string(r.family_count), std::to_string(r.fund_count),
                      f(r.pct_of_funds), f(r.pct_of_assets)});
      table.push_back({{"province", name}, {"family_count", r.family_count}, {"fund_count", r.fund_count},
                       {"pct_of_funds", r.pct_of_funds}, {"pct_of_assets", r.pct_of_assets}});
    }
    doc = {{"report", "provinces"}, {"rows", table}};
  } else {
    header = "manager_race,manager_gender,fund_count,pct_of_funds,pct_of_assets";
    json table = json::array();
    for (const auto& c : fundstats::demographics_report(records)) {
      const std::string race(fundstats::to_string(c.race)), gender(fundstats::to_string(c.gender));
      rows.push_back({io::csv_escape(race), gender, std::to_string(c.fund_count), f(c.pct_of_funds),
                      f(c.pct_of_assets)});
      table.push_back({{"manager_race", race}, {"manager_gender", gender}, {"fund_count", c.fund_count},
                       {"pct_of_funds", c.pct_of_funds}, {"pct_of_assets", c.pct_of_assets}});
    }
    doc = {{"report", "demographics"}, {"rows", table}};
  }
  o.files.emplace_back(cfg.out, csv_rows(header, rows));
  if (!cfg.out.empty()) o.files.emplace_back(cfg.out + ".json", doc.dump(2) + "\n");
  o.results["records"] = records.size();
  return o;
}

inline std::string one_line(std::string s) {
  for (auto& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace detail

/// Runs a parsed configuration. Output files are written atomically and,
/// when --out is given, paired with <out>.manifest.json holding the
/// effective parameters.
inline int run(RunConfig cfg, std::ostream& out, std::ostream& err) {
  try {
    detail::Outputs o;
    if (cfg.command == "network") o = detail::run_network(cfg);
    else if (cfg.command == "gossip") o = detail::run_gossip(cfg);
    else if (cfg.command == "sir") o = detail::run_sir(cfg);
    else if (cfg.command == "rd") o = detail::run_rd(cfg);
    else if (cfg.command == "fastslow") o = detail::run_fastslow(cfg);
    else if (cfg.command == "funds") o = detail::run_funds(cfg);
    else throw UsageError("unknown subcommand '" + cfg.command + "'");

    json outputs = json::array();
    for (const auto& [path, contents] : o.files) {
      if (path.empty()) {
        out << contents;
      } else {
        io::write_atomic(path, contents);
        outputs.push_back(path);
      }
    }
    if (!cfg.out.empty()) {
      json manifest = {{"command", cfg.command}, {"action", cfg.action}, {"seed", cfg.seed},
                       {"params", cfg.params}, {"outputs", outputs}, {"results", o.results}};
      if (!cfg.config_path.empty()) manifest["config"] = cfg.config_path;
      io::write_atomic(cfg.out + ".manifest.json", manifest.dump(2) + "\n");
    }
    if (!cfg.quiet) out << o.stdout_text;
    return static_cast<int>(ExitCode::Ok);
  } catch (const UsageError& e) {
    err << "error: " << e.kind() << ": " << detail::one_line(e.what()) << "\n";
    return static_cast<int>(ExitCode::Usage);
  } catch (const IoError& e) {
    err << "error: " << e.kind() << ": " << detail::one_line(e.what()) << "\n";
    return static_cast<int>(ExitCode::Io);
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << detail::one_line(e.what()) << "\n";
    return static_cast<int>(ExitCode::ModelError);
  }
}

inline int main_entry(int argc, const char* const* argv, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
  RunConfig cfg;
  try {
    cfg = parse_args(argc, argv);
  } catch (const HelpRequested& h) {
    out << h.what();
    return static_cast<int>(ExitCode::Ok);
  } catch (const IoError& e) {
    err << "error: " << e.kind() << ": " << detail::one_line(e.what()) << "\n";
    return static_cast<int>(ExitCode::Io);
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << detail::one_line(e.what()) << "\n";
    return static_cast<int>(ExitCode::Usage);
  }
  return run(std::move(cfg), out, err);
}

}  // namespace epifin::cli
