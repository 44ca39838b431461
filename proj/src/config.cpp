#include "config.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace ndcglab {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& where, const std::string& msg) {
  fail(Errc::config, where.empty() ? msg : where + ": " + msg);
}

std::string join(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

// Re-label construction failures with the config path that caused them.
template <class F>
auto guarded(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    bad(where, e.what());
  }
}

const json& member(const json& j, const std::string& where, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) bad(where, std::string("missing key '") + key + "'");
  return *it;
}

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    const bool known =
        std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) bad(where, "unknown key '" + key + "'");
  }
}

std::string str_at(const json& j, const std::string& where, const char* key) {
  const json& v = member(j, where, key);
  if (!v.is_string()) bad(join(where, key), "expected a string");
  return v.get<std::string>();
}

double num_at(const json& j, const std::string& where, const char* key) {
  const json& v = member(j, where, key);
  if (!v.is_number()) bad(join(where, key), "expected a number");
  return v.get<double>();
}

std::uint64_t u64_at(const json& j, const std::string& where, const char* key) {
  const json& v = member(j, where, key);
  if (!v.is_number_unsigned()) bad(join(where, key), "expected an unsigned integer");
  return v.get<std::uint64_t>();
}

std::uint32_t u32_at(const json& j, const std::string& where, const char* key) {
  const std::uint64_t v = u64_at(j, where, key);
  if (v > std::numeric_limits<std::uint32_t>::max()) bad(join(where, key), "value too large");
  return static_cast<std::uint32_t>(v);
}

std::vector<double> num_array_at(const json& j, const std::string& where, const char* key) {
  const json& v = member(j, where, key);
  if (!v.is_array()) bad(join(where, key), "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      bad(join(where, key) + "[" + std::to_string(i) + "]", "expected a number");
    }
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<std::uint64_t> grid_at(const json& j, const std::string& where, const char* key) {
  const json& v = member(j, where, key);
  if (!v.is_array()) bad(join(where, key), "expected an array of unsigned integers");
  std::vector<std::uint64_t> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_unsigned()) {
      bad(join(where, key) + "[" + std::to_string(i) + "]", "expected an unsigned integer");
    }
    out.push_back(v[i].get<std::uint64_t>());
  }
  return out;
}

Curve curve_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) bad(where, "expected a curve object");
  const std::string kind = str_at(j, where, "kind");
  if (kind == "constant") {
    check_keys(j, where, {"kind", "value"});
    return guarded(where, [&] { return Curve::constant(num_at(j, where, "value")); });
  }
  if (kind == "affine") {
    check_keys(j, where, {"kind", "a", "b"});
    return guarded(where,
                   [&] { return Curve::affine(num_at(j, where, "a"), num_at(j, where, "b")); });
  }
  if (kind == "polynomial") {
    check_keys(j, where, {"kind", "coeffs"});
    return guarded(where, [&] { return Curve::polynomial(num_array_at(j, where, "coeffs")); });
  }
  if (kind == "piecewise_linear") {
    check_keys(j, where, {"kind", "x", "y"});
    return guarded(where, [&] {
      return Curve::piecewise_linear(num_array_at(j, where, "x"), num_array_at(j, where, "y"));
    });
  }
  bad(join(where, "kind"), "unknown curve kind '" + kind + "'");
}

json curve_to_json(const Curve& c) {
  json j;
  switch (c.family()) {
    case Curve::Family::Affine:
      j["kind"] = "affine";
      j["a"] = c.coefficients()[0];
      j["b"] = c.coefficients()[1];
      break;
    case Curve::Family::Polynomial:
      j["kind"] = "polynomial";
      j["coeffs"] = c.coefficients();
      break;
    case Curve::Family::PiecewiseLinear:
      j["kind"] = "piecewise_linear";
      j["x"] = c.knots_x();
      j["y"] = c.knots_y();
      break;
  }
  return j;
}

ScorerSpec scorer_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) bad(where, "expected a scorer object");
  const std::string kind = str_at(j, where, "kind");
  ScorerSpec sc;
  if (kind == "canonical") {
    check_keys(j, where, {"kind", "name"});
    sc = ScorerSpec::canonical();
  } else if (kind == "monotone_affine") {
    check_keys(j, where, {"kind", "a", "b", "name"});
    sc = guarded(where, [&] {
      return ScorerSpec::monotone_affine(num_at(j, where, "a"), num_at(j, where, "b"));
    });
  } else if (kind == "monotone_exp") {
    check_keys(j, where, {"kind", "name"});
    sc = ScorerSpec::monotone_exp();
  } else if (kind == "monotone_cube") {
    check_keys(j, where, {"kind", "name"});
    sc = ScorerSpec::monotone_cube();
  } else if (kind == "partial_corrupt") {
    check_keys(j, where, {"kind", "segments", "name"});
    const json& segs = member(j, where, "segments");
    if (!segs.is_array()) bad(join(where, "segments"), "expected an array of [lo, hi] pairs");
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const std::string at = join(where, "segments") + "[" + std::to_string(i) + "]";
      if (!segs[i].is_array() || segs[i].size() != 2 || !segs[i][0].is_number() ||
          !segs[i][1].is_number()) {
        bad(at, "expected a [lo, hi] pair of numbers");
      }
      pairs.emplace_back(segs[i][0].get<double>(), segs[i][1].get<double>());
    }
    sc = guarded(where, [&] { return ScorerSpec::partial_corrupt(std::move(pairs)); });
  } else if (kind == "noise") {
    check_keys(j, where, {"kind", "w", "name"});
    sc = guarded(where, [&] { return ScorerSpec::independent_noise(num_at(j, where, "w")); });
  } else {
    bad(join(where, "kind"), "unknown scorer kind '" + kind + "'");
  }
  if (j.contains("name")) sc.name = str_at(j, where, "name");
  return sc;
}

json scorer_to_json(const ScorerSpec& sc) {
  json j;
  switch (sc.kind) {
    case ScorerSpec::Kind::Canonical:
      j["kind"] = "canonical";
      break;
    case ScorerSpec::Kind::MonotoneDistort:
      switch (sc.phi) {
        case ScorerSpec::Distort::Affine:
          j["kind"] = "monotone_affine";
          j["a"] = sc.a;
          j["b"] = sc.b;
          break;
        case ScorerSpec::Distort::Exp:
          j["kind"] = "monotone_exp";
          break;
        case ScorerSpec::Distort::Cube:
          j["kind"] = "monotone_cube";
          break;
      }
      break;
    case ScorerSpec::Kind::PartialCorrupt: {
      j["kind"] = "partial_corrupt";
      json segs = json::array();
      for (const auto& [lo, hi] : sc.segments) segs.push_back(json::array({lo, hi}));
      j["segments"] = std::move(segs);
      break;
    }
    case ScorerSpec::Kind::IndependentNoise:
      j["kind"] = "noise";
      j["w"] = sc.noise_weight;
      break;
  }
  if (!sc.name.empty()) j["name"] = sc.name;
  return j;
}

Discount discount_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) bad(where, "expected a discount object");
  const std::string family = str_at(j, where, "family");
  Discount d = Discount::log_inverse();
  if (family == "log") {
    check_keys(j, where, {"family", "cutoff"});
  } else if (family == "power") {
    check_keys(j, where, {"family", "beta", "cutoff"});
    d = guarded(where, [&] { return Discount::power(num_at(j, where, "beta")); });
  } else if (family == "zipfian") {
    check_keys(j, where, {"family", "cutoff"});
    d = Discount::zipfian();
  } else if (family == "exp") {
    check_keys(j, where, {"family", "base", "cutoff"});
    d = guarded(where, [&] { return Discount::exponential(num_at(j, where, "base")); });
  } else if (family == "custom") {
    check_keys(j, where, {"family", "table", "tail", "cutoff"});
    const std::string tail = str_at(j, where, "tail");
    if (tail != "zero" && tail != "extend") {
      bad(join(where, "tail"), "expected \"zero\" or \"extend\"");
    }
    d = guarded(where, [&] {
      return Discount::custom(num_array_at(j, where, "table"),
                              tail == "zero" ? CustomTail::Zero : CustomTail::Extend);
    });
  } else {
    bad(join(where, "family"), "unknown discount family '" + family + "'");
  }
  if (j.contains("cutoff")) {
    const json& c = member(j, where, "cutoff");
    const std::string cw = join(where, "cutoff");
    if (!c.is_object()) bad(cw, "expected a cutoff object");
    const std::string kind = str_at(c, cw, "kind");
    CutoffRule rule;
    if (kind == "fixed_k") {
      check_keys(c, cw, {"kind", "k"});
      rule = guarded(cw, [&] { return CutoffRule::fixed(u64_at(c, cw, "k")); });
    } else if (kind == "linear_fraction") {
      check_keys(c, cw, {"kind", "c"});
      rule = guarded(cw, [&] { return CutoffRule::linear_fraction(num_at(c, cw, "c")); });
    } else if (kind == "sublinear_power") {
      check_keys(c, cw, {"kind", "gamma"});
      rule = guarded(cw, [&] { return CutoffRule::sublinear_power(num_at(c, cw, "gamma")); });
    } else {
      bad(join(cw, "kind"), "unknown cutoff kind '" + kind + "'");
    }
    d = d.with_cutoff(rule);
  }
  return d;
}

json discount_to_json(const Discount& d) {
  json j;
  switch (d.family()) {
    case DiscountFamily::LogInverse:
      j["family"] = "log";
      break;
    case DiscountFamily::Power:
      j["family"] = "power";
      j["beta"] = d.beta();
      break;
    case DiscountFamily::Zipfian:
      j["family"] = "zipfian";
      break;
    case DiscountFamily::Exponential:
      j["family"] = "exp";
      j["base"] = d.base();
      break;
    case DiscountFamily::Custom:
      j["family"] = "custom";
      j["table"] = d.table();
      j["tail"] = d.tail() == CustomTail::Zero ? "zero" : "extend";
      break;
  }
  if (d.cutoff()) {
    json c;
    switch (d.cutoff()->kind) {
      case CutoffRule::Kind::FixedK:
        c["kind"] = "fixed_k";
        c["k"] = d.cutoff()->k;
        break;
      case CutoffRule::Kind::LinearFraction:
        c["kind"] = "linear_fraction";
        c["c"] = d.cutoff()->c;
        break;
      case CutoffRule::Kind::SublinearPower:
        c["kind"] = "sublinear_power";
        c["gamma"] = d.cutoff()->gamma;
        break;
    }
    j["cutoff"] = std::move(c);
  }
  return j;
}

struct ParsedWorld {
  DistributionSpec spec;
  bool binary;
};

ParsedWorld world_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) bad(where, "expected a world object");
  const std::string kind = str_at(j, where, "kind");
  std::optional<double> alpha, c, delta;
  if (j.contains("holder")) {
    const json& h = member(j, where, "holder");
    const std::string hw = join(where, "holder");
    if (!h.is_object()) bad(hw, "expected a holder object");
    check_keys(h, hw, {"alpha", "c"});
    alpha = num_at(h, hw, "alpha");
    c = num_at(h, hw, "c");
  }
  if (j.contains("delta")) delta = num_at(j, where, "delta");
  if (kind == "binary") {
    check_keys(j, where, {"kind", "ybar", "holder", "delta"});
    Curve ybar = curve_from_json(member(j, where, "ybar"), join(where, "ybar"));
    return {guarded(where,
                    [&] { return DistributionSpec::binary(std::move(ybar), alpha, c, delta); }),
            true};
  }
  if (kind == "general") {
    check_keys(j, where, {"kind", "grades", "gain", "curves", "holder", "delta"});
    const std::string gain = str_at(j, where, "gain");
    if (gain != "identity" && gain != "exp2") {
      bad(join(where, "gain"), "expected \"identity\" or \"exp2\"");
    }
    const json& curves = member(j, where, "curves");
    if (!curves.is_array()) bad(join(where, "curves"), "expected an array of curves");
    std::vector<Curve> parsed;
    parsed.reserve(curves.size());
    for (std::size_t i = 0; i < curves.size(); ++i) {
      parsed.push_back(
          curve_from_json(curves[i], join(where, "curves") + "[" + std::to_string(i) + "]"));
    }
    return {guarded(where,
                    [&] {
                      GradeSet gs(num_array_at(j, where, "grades"),
                                  gain == "identity" ? Gain::Identity : Gain::Exponential2);
                      return DistributionSpec(std::move(gs), std::move(parsed), alpha, c, delta);
                    }),
            false};
  }
  bad(join(where, "kind"), "unknown world kind '" + kind + "'");
}

json world_to_json(const DistributionSpec& w, bool binary) {
  json j;
  if (binary) {
    j["kind"] = "binary";
    j["ybar"] = curve_to_json(w.ybar());
  } else {
    j["kind"] = "general";
    j["grades"] = w.grade_set().grades();
    j["gain"] = w.grade_set().gain() == Gain::Identity ? "identity" : "exp2";
    json curves = json::array();
    for (const Curve& c : w.curves()) curves.push_back(curve_to_json(c));
    j["curves"] = std::move(curves);
  }
  if (w.holder_alpha()) {
    j["holder"] = json{{"alpha", *w.holder_alpha()}, {"c", *w.holder_c()}};
  }
  if (w.delta()) j["delta"] = *w.delta();
  return j;
}

bool known_command(const std::string& cmd) {
  return cmd == "curve" || cmd == "limit" || cmd == "distinguish" || cmd == "nonconverge" ||
         cmd == "ingest";
}

}  // namespace

RunConfig config_from_json(const json& j, const std::string& fallback_command) {
  if (!j.is_object()) bad("", "config root must be an object");
  RunConfig cfg;

  std::string cmd = fallback_command;
  if (j.contains("command")) cmd = str_at(j, "", "command");
  if (cmd.empty()) bad("", "missing key 'command'");
  if (!known_command(cmd)) bad("command", "unknown command '" + cmd + "'");
  if (!fallback_command.empty() && cmd != fallback_command) {
    bad("command", "config says '" + cmd + "' but the subcommand is '" + fallback_command + "'");
  }
  cfg.command = cmd;
  if (j.contains("seed")) cfg.seed = u64_at(j, "", "seed");

  if (cmd == "ingest") {
    check_keys(j, "", {"command", "seed", "input", "clicks_high", "clicks_low", "columns"});
    cfg.input = str_at(j, "", "input");
    if (j.contains("clicks_high")) cfg.clicks_high = u64_at(j, "", "clicks_high");
    if (j.contains("clicks_low")) cfg.clicks_low = u64_at(j, "", "clicks_low");
    if (j.contains("columns")) {
      const json& cols = member(j, "", "columns");
      if (!cols.is_array()) bad("columns", "expected an array of strings");
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (!cols[i].is_string()) {
          bad("columns[" + std::to_string(i) + "]", "expected a string");
        }
        cfg.columns.push_back(cols[i].get<std::string>());
      }
    }
    return cfg;
  }

  cfg.discount = discount_from_json(member(j, "", "discount"), "discount");
  auto world = world_from_json(member(j, "", "world"), "world");
  cfg.world = std::move(world.spec);
  cfg.world_binary = world.binary;

  if (cmd == "curve") {
    check_keys(j, "", {"command", "seed", "discount", "world", "scorers", "n_grid", "trials"});
    if (j.contains("scorers")) {
      const json& sc = member(j, "", "scorers");
      if (!sc.is_array()) bad("scorers", "expected an array of scorers");
      cfg.scorers.clear();
      for (std::size_t i = 0; i < sc.size(); ++i) {
        cfg.scorers.push_back(scorer_from_json(sc[i], "scorers[" + std::to_string(i) + "]"));
      }
    }
    cfg.n_grid = grid_at(j, "", "n_grid");
    if (j.contains("trials")) cfg.trials = u32_at(j, "", "trials");
  } else if (cmd == "limit") {
    check_keys(j, "", {"command", "seed", "discount", "world"});
  } else if (cmd == "distinguish") {
    check_keys(j, "", {"command", "seed", "discount", "world", "f0", "f1", "N_grid",
                       "n_per_decade", "trials"});
    cfg.f0 = scorer_from_json(member(j, "", "f0"), "f0");
    cfg.f1 = scorer_from_json(member(j, "", "f1"), "f1");
    cfg.N_grid = grid_at(j, "", "N_grid");
    if (j.contains("n_per_decade")) cfg.n_per_decade = u32_at(j, "", "n_per_decade");
    cfg.trials = 200;
    if (j.contains("trials")) cfg.trials = u32_at(j, "", "trials");
  } else {  // nonconverge
    check_keys(j, "", {"command", "seed", "discount", "world", "scorer", "n_grid", "trials",
                       "theta_hi", "theta_lo", "floor_high", "floor_low"});
    if (j.contains("scorer")) cfg.nc_scorer = scorer_from_json(member(j, "", "scorer"), "scorer");
    cfg.n_grid = grid_at(j, "", "n_grid");
    cfg.trials = 200;
    if (j.contains("trials")) cfg.trials = u32_at(j, "", "trials");
    if (j.contains("theta_hi")) cfg.theta_hi = num_at(j, "", "theta_hi");
    if (j.contains("theta_lo")) cfg.theta_lo = num_at(j, "", "theta_lo");
    if (j.contains("floor_high")) cfg.floor_high = num_at(j, "", "floor_high");
    if (j.contains("floor_low")) cfg.floor_low = num_at(j, "", "floor_low");
  }
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["command"] = cfg.command;
  j["seed"] = cfg.seed;
  if (cfg.command == "ingest") {
    j["input"] = cfg.input;
    j["clicks_high"] = cfg.clicks_high;
    j["clicks_low"] = cfg.clicks_low;
    j["columns"] = cfg.columns;
    return j;
  }
  j["discount"] = discount_to_json(cfg.discount);
  j["world"] = world_to_json(cfg.world, cfg.world_binary);
  if (cfg.command == "curve") {
    json scorers = json::array();
    for (const ScorerSpec& sc : cfg.scorers) scorers.push_back(scorer_to_json(sc));
    j["scorers"] = std::move(scorers);
    j["n_grid"] = cfg.n_grid;
    j["trials"] = cfg.trials;
  } else if (cfg.command == "distinguish") {
    j["f0"] = scorer_to_json(cfg.f0);
    j["f1"] = scorer_to_json(cfg.f1);
    j["N_grid"] = cfg.N_grid;
    j["n_per_decade"] = cfg.n_per_decade;
    j["trials"] = cfg.trials;
  } else if (cfg.command == "nonconverge") {
    j["scorer"] = scorer_to_json(cfg.nc_scorer);
    j["n_grid"] = cfg.n_grid;
    j["trials"] = cfg.trials;
    j["theta_hi"] = cfg.theta_hi;
    j["theta_lo"] = cfg.theta_lo;
    j["floor_high"] = cfg.floor_high;
    j["floor_low"] = cfg.floor_low;
  }
  return j;
}

RunConfig load_config(const std::string& path, const std::string& cli_command) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::io, "cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(Errc::config, path + ": " + e.what());
  }
  // A run manifest embeds its resolved config; accept it directly.
  if (j.is_object()) {
    const auto it = j.find("config");
    if (it != j.end() && it->is_object()) j = *it;
  }
  try {
    return config_from_json(j, cli_command);
  } catch (const Error& e) {
    if (e.code() != Errc::config) throw;
    fail(Errc::config, path + ": " + e.what());
  }
}

}  // namespace ndcglab
