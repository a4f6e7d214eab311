#pragma once

// JSON run configuration: strict schema (unknown keys rejected), defaults
// applied and echoed, validation errors name the offending key.

#include <fstream>
#include <set>

#include <json.hpp>

#include "erds/harness.hpp"

namespace erds {

using Json = nlohmann::json;

struct RunConfig {
  ExperimentConfig exp;
  std::string kind = "simulate"; // simulate|stability|uniqueness|equilibrium|check
  std::string out_dir = "out";
  std::set<std::string> formats = {"csv", "json"};
  Json echo; // effective configuration after defaults
};

namespace detail {

inline void reject_unknown(const Json& j, const std::string& where,
                           const std::set<std::string>& allowed) {
  if (!j.is_object())
    throw std::invalid_argument("config: " + where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k))
      throw std::invalid_argument("config: unknown key \"" + where + k + "\"");
}

inline double get_num(const Json& j, const std::string& key, double dflt,
                      const std::string& where) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number())
    throw std::invalid_argument("config: " + where + key + " must be a number");
  return j.at(key).get<double>();
}

// "auto" or a number; returns true if auto.
inline bool get_auto(const Json& j, const std::string& key, double& value,
                     const std::string& where) {
  if (!j.contains(key)) return true;
  const Json& v = j.at(key);
  if (v.is_string() && v.get<std::string>() == "auto") return true;
  if (!v.is_number())
    throw std::invalid_argument("config: " + where + key + " must be a number or \"auto\"");
  value = v.get<double>();
  return false;
}

inline std::vector<double> get_vec(const Json& j, const std::string& key, int n,
                                   double dflt, const std::string& where) {
  std::vector<double> out(n, dflt);
  if (!j.contains(key)) return out;
  const Json& v = j.at(key);
  if (!v.is_array() || static_cast<int>(v.size()) != n)
    throw std::invalid_argument("config: " + where + key + " must be an array of length " +
                                std::to_string(n));
  for (int i = 0; i < n; ++i) out[i] = v.at(i).get<double>();
  return out;
}

} // namespace detail

inline RunConfig parse_config(const Json& root) {
  using detail::get_auto;
  using detail::get_num;
  using detail::get_vec;
  using detail::reject_unknown;

  reject_unknown(root, "", {"model", "grid", "time", "truncation", "experiment",
                            "output", "seed"});
  RunConfig cfg;
  ExperimentConfig& e = cfg.exp;

  // ---- model ----
  const Json model = root.value("model", Json::object());
  reject_unknown(model, "model.", {"entropy", "mobility", "reactions"});

  const Json ent = model.value("entropy", Json::object());
  reject_unknown(ent, "model.entropy.", {"sigma", "species"});
  {
    const Json sg = ent.value("sigma", Json::object());
    reject_unknown(sg, "model.entropy.sigma.", {"kind", "a", "nu"});
    const std::string kind = sg.value("kind", std::string("log"));
    if (kind == "log") e.model.sigma.kind = SigmaKind::Log;
    else if (kind == "power") e.model.sigma.kind = SigmaKind::Power;
    else throw std::invalid_argument("config: model.entropy.sigma.kind must be log|power");
    e.model.sigma.a = get_num(sg, "a", 1.0, "model.entropy.sigma.");
    e.model.sigma.nu = get_num(sg, "nu", 0.5, "model.entropy.sigma.");
  }
  {
    Json species = ent.value("species", Json::array());
    if (species.empty()) // default: two sqrt(1+u) species
      species = Json::array({Json::object(), Json::object()});
    for (std::size_t i = 0; i < species.size(); ++i) {
      const std::string where = "model.entropy.species[" + std::to_string(i) + "].";
      reject_unknown(species.at(i), where, {"form", "b0", "b1", "beta"});
      SpeciesSpec sp;
      const std::string form = species.at(i).value("form", std::string("power_of_affine"));
      if (form == "power_of_affine") sp.form = SpeciesForm::PowerOfAffine;
      else if (form == "affine_of_power") sp.form = SpeciesForm::AffineOfPower;
      else throw std::invalid_argument("config: " + where + "form must be power_of_affine|affine_of_power");
      sp.b0 = get_num(species.at(i), "b0", 1.0, where);
      sp.b1 = get_num(species.at(i), "b1", 1.0, where);
      sp.beta = get_num(species.at(i), "beta", 0.5, where);
      e.model.species.push_back(sp);
    }
  }
  try {
    e.model.validate();
  } catch (const std::exception& ex) {
    throw std::invalid_argument("config: model.entropy invalid: " + std::string(ex.what()));
  }
  const int n = e.model.n();

  const Json mob = model.value("mobility", Json::object());
  reject_unknown(mob, "model.mobility.",
                 {"variant", "m_kind", "m_bar", "kappa0", "kappa1", "pi1_scale", "skt"});
  {
    const std::string v = mob.value("variant", std::string("M0"));
    if (v == "M0") e.mobility.variant = MobilityVariant::M0;
    else if (v == "M1") e.mobility.variant = MobilityVariant::M1;
    else if (v == "SKT") e.mobility.variant = MobilityVariant::SKT;
    else throw std::invalid_argument("config: model.mobility.variant must be M0|M1|SKT");
    const std::string mk = mob.value("m_kind", std::string("zero"));
    if (mk == "zero") e.mobility.m_kind = MCoeffKind::Zero;
    else if (mk == "constant") e.mobility.m_kind = MCoeffKind::Constant;
    else if (mk == "bounded") e.mobility.m_kind = MCoeffKind::Bounded;
    else throw std::invalid_argument("config: model.mobility.m_kind must be zero|constant|bounded");
    e.mobility.m_bar = get_num(mob, "m_bar", 0.0, "model.mobility.");
    e.mobility.pi1_scale = get_num(mob, "pi1_scale", 1.0, "model.mobility.");
    auto k0 = get_vec(mob, "kappa0", n, 1.0, "model.mobility.");
    auto k1 = get_vec(mob, "kappa1", n, 0.0, "model.mobility.");
    e.mobility.kappa0 = Eigen::Map<Vec>(k0.data(), n);
    e.mobility.kappa1 = Eigen::Map<Vec>(k1.data(), n);
    if (mob.contains("skt")) {
      const Json sk = mob.at("skt");
      reject_unknown(sk, "model.mobility.skt.", {"s", "a", "pi"});
      SktSpec spec;
      spec.s = get_num(sk, "s", 1.0, "model.mobility.skt.");
      auto pi = get_vec(sk, "pi", n, 1.0, "model.mobility.skt.");
      spec.pi = Eigen::Map<Vec>(pi.data(), n);
      spec.a = Mat::Zero(n, n + 1);
      if (sk.contains("a")) {
        const Json& a = sk.at("a");
        if (!a.is_array() || static_cast<int>(a.size()) != n)
          throw std::invalid_argument("config: model.mobility.skt.a must be n rows");
        for (int i = 0; i < n; ++i) {
          if (static_cast<int>(a.at(i).size()) != n + 1)
            throw std::invalid_argument("config: model.mobility.skt.a rows need n+1 entries");
          for (int j = 0; j <= n; ++j) spec.a(i, j) = a.at(i).at(j).get<double>();
        }
      }
      e.mobility.skt = spec;
    }
    try {
      e.mobility.validate(n);
    } catch (const std::exception& ex) {
      throw std::invalid_argument("config: model.mobility invalid: " + std::string(ex.what()));
    }
  }

  const Json rx = model.value("reactions", Json::object());
  reject_unknown(rx, "model.reactions.", {"pairs"});
  if (rx.contains("pairs")) {
    for (const auto& pr : rx.at("pairs")) {
      reject_unknown(pr, "model.reactions.pairs[].", {"i", "j", "kappa"});
      ExchangePair p;
      p.i = pr.value("i", 1);
      p.j = pr.value("j", 2);
      p.kappa = pr.value("kappa", 1.0);
      e.reactions.pairs.push_back(p);
    }
  }
  try {
    e.reactions.validate(n);
  } catch (const std::exception& ex) {
    throw std::invalid_argument("config: model.reactions invalid: " + std::string(ex.what()));
  }

  // ---- grid / time ----
  const Json grid = root.value("grid", Json::object());
  reject_unknown(grid, "grid.", {"cells", "length"});
  e.grid.cells = static_cast<int>(get_num(grid, "cells", 64, "grid."));
  e.grid.length = get_num(grid, "length", 1.0, "grid.");
  try {
    e.grid.validate();
  } catch (const std::exception& ex) {
    throw std::invalid_argument("config: grid invalid: " + std::string(ex.what()));
  }

  const Json time = root.value("time", Json::object());
  reject_unknown(time, "time.", {"T", "dt0", "snapshot_stride"});
  e.T = get_num(time, "T", 0.5, "time.");
  e.dt0 = get_num(time, "dt0", 5e-5, "time.");
  e.snapshot_stride = static_cast<int>(get_num(time, "snapshot_stride", 25, "time."));
  if (e.T < 0.0) throw std::invalid_argument("config: time.T must be >= 0");
  if (e.dt0 <= 0.0) throw std::invalid_argument("config: time.dt0 must be > 0");
  if (e.snapshot_stride < 1)
    throw std::invalid_argument("config: time.snapshot_stride must be >= 1");

  // ---- truncation ----
  const Json tr = root.value("truncation", Json::object());
  reject_unknown(tr, "truncation.", {"E", "N", "iota", "alpha"});
  e.auto_E = get_auto(tr, "E", e.trunc.E, "truncation.");
  e.auto_N = get_auto(tr, "N", e.trunc.N, "truncation.");
  e.auto_iota = get_auto(tr, "iota", e.trunc.iota, "truncation.");
  e.auto_alpha = get_auto(tr, "alpha", e.trunc.alpha, "truncation.");
  if (!e.auto_E || !e.auto_N || !e.auto_iota || !e.auto_alpha) {
    try {
      e.trunc.validate();
    } catch (const std::exception& ex) {
      throw std::invalid_argument("config: truncation invalid: " + std::string(ex.what()));
    }
  }

  // ---- experiment ----
  const Json ex = root.value("experiment", Json::object());
  reject_unknown(ex, "experiment.", {"kind", "perturbation", "initial"});
  cfg.kind = ex.value("kind", std::string("simulate"));
  if (cfg.kind != "simulate" && cfg.kind != "stability" && cfg.kind != "uniqueness" &&
      cfg.kind != "equilibrium" && cfg.kind != "check")
    throw std::invalid_argument(
        "config: experiment.kind must be simulate|stability|uniqueness|equilibrium|check");
  {
    const Json pe = ex.value("perturbation", Json::object());
    reject_unknown(pe, "experiment.perturbation.", {"eps", "j0", "j1"});
    e.pert.eps = get_num(pe, "eps", 0.05, "experiment.perturbation.");
    e.pert.j0 = static_cast<int>(get_num(pe, "j0", e.grid.cells / 4, "experiment.perturbation."));
    e.pert.j1 = static_cast<int>(
        get_num(pe, "j1", e.grid.cells / 2 - 1, "experiment.perturbation."));
    if (e.pert.eps < 0.0)
      throw std::invalid_argument("config: experiment.perturbation.eps must be >= 0");
  }
  {
    const Json in = ex.value("initial", Json::object());
    reject_unknown(in, "experiment.initial.", {"u_bar", "A_u", "c_bar", "A_c", "k_c"});
    e.init.u_bar = get_num(in, "u_bar", 1.0, "experiment.initial.");
    e.init.A_u = get_num(in, "A_u", 0.3, "experiment.initial.");
    e.init.c_bar = get_vec(in, "c_bar", n, 1.0, "experiment.initial.");
    e.init.A_c = get_vec(in, "A_c", n, 0.2, "experiment.initial.");
    std::vector<double> kc = get_vec(in, "k_c", n, 0.0, "experiment.initial.");
    e.init.k_c.resize(n);
    for (int i = 0; i < n; ++i)
      e.init.k_c[i] = kc[i] == 0.0 ? i + 1 : static_cast<int>(kc[i]);
  }

  // ---- output / seed ----
  const Json out = root.value("output", Json::object());
  reject_unknown(out, "output.", {"dir", "formats"});
  cfg.out_dir = out.value("dir", std::string("out"));
  if (out.contains("formats")) {
    cfg.formats.clear();
    for (const auto& f : out.at("formats")) {
      const std::string s = f.get<std::string>();
      if (s != "csv" && s != "json" && s != "svg")
        throw std::invalid_argument("config: output.formats entries must be csv|json|svg");
      cfg.formats.insert(s);
    }
  }
  if (root.contains("seed")) {
    if (!root.at("seed").is_number_unsigned())
      throw std::invalid_argument("config: seed must be a nonnegative integer");
    e.seed = root.at("seed").get<std::uint64_t>();
  }

  // effective configuration echo
  Json echo;
  echo["model"]["entropy"]["sigma"] = {
      {"kind", e.model.sigma.kind == SigmaKind::Log ? "log" : "power"},
      {"a", e.model.sigma.a},
      {"nu", e.model.sigma.nu}};
  for (const auto& sp : e.model.species)
    echo["model"]["entropy"]["species"].push_back(
        {{"form", sp.form == SpeciesForm::PowerOfAffine ? "power_of_affine"
                                                        : "affine_of_power"},
         {"b0", sp.b0},
         {"b1", sp.b1},
         {"beta", sp.beta}});
  echo["model"]["mobility"] = {
      {"variant", e.mobility.variant == MobilityVariant::M0   ? "M0"
                  : e.mobility.variant == MobilityVariant::M1 ? "M1"
                                                              : "SKT"},
      {"m_kind", e.mobility.m_kind == MCoeffKind::Zero       ? "zero"
                 : e.mobility.m_kind == MCoeffKind::Constant ? "constant"
                                                             : "bounded"},
      {"m_bar", e.mobility.m_bar},
      {"kappa0", std::vector<double>(e.mobility.kappa0.data(), e.mobility.kappa0.data() + n)},
      {"kappa1", std::vector<double>(e.mobility.kappa1.data(), e.mobility.kappa1.data() + n)},
      {"pi1_scale", e.mobility.pi1_scale}};
  echo["model"]["reactions"]["pairs"] = Json::array();
  for (const auto& p : e.reactions.pairs)
    echo["model"]["reactions"]["pairs"].push_back({{"i", p.i}, {"j", p.j}, {"kappa", p.kappa}});
  echo["grid"] = {{"cells", e.grid.cells}, {"length", e.grid.length}};
  echo["time"] = {{"T", e.T}, {"dt0", e.dt0}, {"snapshot_stride", e.snapshot_stride}};
  echo["truncation"] = {{"E", e.auto_E ? Json("auto") : Json(e.trunc.E)},
                        {"N", e.auto_N ? Json("auto") : Json(e.trunc.N)},
                        {"iota", e.auto_iota ? Json("auto") : Json(e.trunc.iota)},
                        {"alpha", e.auto_alpha ? Json("auto") : Json(e.trunc.alpha)}};
  echo["experiment"] = {{"kind", cfg.kind},
                        {"perturbation",
                         {{"eps", e.pert.eps}, {"j0", e.pert.j0}, {"j1", e.pert.j1}}},
                        {"initial",
                         {{"u_bar", e.init.u_bar},
                          {"A_u", e.init.A_u},
                          {"c_bar", e.init.c_bar},
                          {"A_c", e.init.A_c},
                          {"k_c", e.init.k_c}}}};
  echo["output"] = {{"dir", cfg.out_dir},
                    {"formats", std::vector<std::string>(cfg.formats.begin(), cfg.formats.end())}};
  echo["seed"] = e.seed;
  cfg.echo = std::move(echo);
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  Json root;
  try {
    root = Json::parse(in);
  } catch (const Json::parse_error& ex) {
    throw std::invalid_argument("config: parse error in " + path + ": " + ex.what());
  }
  return parse_config(root);
}

} // namespace erds
