#include "disent/cli.hpp"

#include <chrono>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "disent/factorization.hpp"
#include "disent/io.hpp"
#include "disent/optimizer.hpp"
#include "disent/saturation.hpp"

namespace disent::cli {

namespace {

using json = nlohmann::ordered_json;

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   t0)
      .count();
}

json extremizer_json(const Extremizer& ext) {
  json j;
  j["value"] = ext.value;
  j["g"] = ext.g;
  j["log_g"] = ext.log_g;
  j["transformed"] = ext.transformed;
  j["positivity_margin"] = ext.positivity_margin;
  json flags = json::array();
  for (const auto& [slot, atom] : ext.low_positivity)
    flags.push_back({{"slot", slot}, {"atom", atom}});
  j["low_positivity"] = std::move(flags);
  return j;
}

json report_json(const VerificationReport& rep) {
  json j;
  j["geometric_bound"] = rep.geometric_bound;
  j["componentwise"] = rep.componentwise;
  j["constant"] = rep.constant;
  j["tolerance"] = rep.tolerance;
  j["geometric_pass"] = rep.geometric_pass;
  j["componentwise_pass"] = rep.componentwise_pass;
  j["pass"] = rep.pass;
  return j;
}

std::pair<int, int> parse_schedule_range(const std::string& s) {
  const auto pos = s.find("..");
  if (pos == std::string::npos)
    fail("bad_arguments", "--schedule expects the form m1..m2");
  try {
    return {std::stoi(s.substr(0, pos)), std::stoi(s.substr(pos + 2))};
  } catch (const std::exception&) {
    fail("bad_arguments", "--schedule expects integer bounds m1..m2");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto t_start = std::chrono::steady_clock::now();

  CLI::App app{"Sharp-constant solver and factorisation toolkit for discrete "
               "multilinear geometric-mean inequalities"};
  app.require_subcommand(1);

  std::string input, output, schedule_str = "1..12";
  double q_override = -1.0, tol = 1e-8;
  int restarts = 16, grid_resolution = 200;
  std::uint64_t seed = 0;
  bool pretty = false;

  std::vector<CLI::App*> subs;
  for (const char* name : {"solve", "oracle", "factorize", "verify", "saturate",
                           "upgrade", "lift", "sweep"}) {
    CLI::App* sc = app.add_subcommand(name);
    sc->add_option("--input", input)->required();
    sc->add_option("--q", q_override);
    sc->add_option("--tol", tol);
    sc->add_option("--restarts", restarts);
    sc->add_option("--seed", seed);
    sc->add_option("--grid-resolution", grid_resolution);
    sc->add_option("--schedule", schedule_str);
    sc->add_option("--output", output);
    sc->add_flag("--pretty", pretty);
    subs.push_back(sc);
  }

  int exit_code = 0;
  json report;
  try {
    std::vector<const char*> argv;
    argv.push_back("disent");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
      out << app.help() << "\n";
      return 0;
    } catch (const CLI::ParseError& e) {
      fail("bad_arguments", e.what());
    }
    const std::string cmd = app.get_subcommands().front()->get_name();

    io::LoadedInstance loaded = io::load_instance_file(input);
    if (q_override > 0.0)
      loaded.instance = loaded.instance.with_exponent(q_override);
    const ProblemInstance& inst = loaded.instance;
    const double t_parse = ms_since(t_start);

    SolveConfig scfg;
    scfg.restarts = restarts;
    scfg.seed = seed;
    OracleConfig ocfg;
    ocfg.resolution = grid_resolution;

    report["command"] = cmd;
    report["seed"] = seed;
    report["instance"] = {{"digest", io::instance_digest(inst)},
                          {"atoms", inst.space.size()},
                          {"d", inst.slot_count()},
                          {"theta", inst.weights.theta},
                          {"q", inst.exponent.q}};

    json result;
    if (cmd == "solve") {
      result["extremizer"] = extremizer_json(maximize(inst, scfg));
    } else if (cmd == "oracle") {
      OracleResult orc = brute_force_constant(inst, ocfg);
      result["constant"] = orc.value;
      result["argmax"] = orc.argmax;
      result["resolution"] = orc.resolution;
      result["points"] = orc.points;
      result["grid_bound"] = orc.grid_bound;
    } else if (cmd == "factorize") {
      Extremizer ext = maximize(inst, scfg);
      Factorisation fact = build_factorisation(inst, ext);
      VerificationReport rep = verify_factorisation(inst, fact, tol);
      result["extremizer"] = extremizer_json(ext);
      result["phi"] = fact.phi;
      result["report"] = report_json(rep);
      if (!rep.pass) exit_code = 2;
    } else if (cmd == "verify") {
      if (!loaded.phi)
        fail("malformed_json", "verify requires a 'phi' block in the input file");
      VerificationReport rep = verify_factorisation(inst, *loaded.phi, tol);
      result["report"] = report_json(rep);
      if (!rep.pass) exit_code = 2;
    } else if (cmd == "saturate") {
      json fams = json::array();
      for (std::size_t j = 0; j < inst.slot_count(); ++j) {
        const WeightFamily& fam = inst.families[j];
        CoverResult cover = greedy_cover(inst.space, fam);
        auto strong = check_strong_saturation(inst.space, fam);
        fams.push_back({{"slot", j},
                        {"saturating", check_saturation(inst.space, fam)},
                        {"strong_key", strong ? json(*strong) : json(nullptr)},
                        {"cover",
                         {{"chosen", cover.chosen},
                          {"gains", cover.gains},
                          {"covers", cover.covers}}}});
      }
      result["families"] = std::move(fams);
    } else if (cmd == "upgrade") {
      UpgradeResult up = upgrade_to_probability(inst.space, inst.families);
      result["instance"] = io::instance_to_json(
          ProblemInstance(up.nu, up.augmented, inst.weights, inst.exponent));
      result["w"] = up.w;
      result["aggregate_keys"] = up.aggregate_keys;
    } else if (cmd == "lift") {
      result["instance"] = io::instance_to_json(dummy_lift(inst));
    } else if (cmd == "sweep") {
      const auto [m1, m2] = parse_schedule_range(schedule_str);
      SweepResult sw = q_sweep(inst, default_schedule(m1, m2), scfg, tol);
      result["schedule"] = sw.schedule;
      json pts = json::array();
      bool all_pass = true;
      for (const auto& pt : sw.points) {
        pts.push_back({{"q", pt.q},
                       {"value", pt.extremizer.value},
                       {"g", pt.extremizer.g},
                       {"phi", pt.factorisation.phi},
                       {"phi_normalized", pt.normalized},
                       {"pass", pt.report.pass}});
        all_pass = all_pass && pt.report.pass;
      }
      result["points"] = std::move(pts);
      json cross = json::array();
      for (const auto& row : sw.cross_pass) {
        cross.push_back(row);
        for (bool b : row) all_pass = all_pass && b;
      }
      result["cross_pass"] = std::move(cross);
      result["limit_estimate"] = sw.limit_estimate;
      if (!all_pass) exit_code = 2;
    }

    report["result"] = std::move(result);
    report["timings"] = {{"parse_ms", t_parse},
                         {"compute_ms", ms_since(t_start) - t_parse},
                         {"total_ms", ms_since(t_start)}};
  } catch (const Error& e) {
    json ej = {{"error", e.code()}, {"message", e.what()}};
    out << ej.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    json ej = {{"error", "internal"}, {"message", e.what()}};
    err << ej.dump() << "\n";
    return 1;
  }

  const std::string payload = report.dump(pretty ? 2 : -1) + "\n";
  out << payload;
  if (!output.empty()) {
    std::ofstream f(output, std::ios::binary);
    if (!f) {
      json ej = {{"error", "io_error"}, {"message", "cannot write " + output}};
      out << ej.dump() << "\n";
      return 1;
    }
    f << payload;
  }
  return exit_code;
}

}  // namespace disent::cli
