#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "construction.hpp"
#include "errors.hpp"
#include "formula.hpp"
#include "io.hpp"
#include "order.hpp"
#include "pmorphism.hpp"
#include "proofcheck.hpp"
#include "semantics.hpp"

// Exit codes: 0 success / semantically positive, 1 semantically negative
// (formula false, countermodel found, check violated, proof rejected),
// 2 input error, 3 cap exceeded, 4 precondition failure.

namespace milw::cli {

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw io_error("cannot write " + p.string());
  f << content;
}

// Formula argument: literal text, or @path to read it from a file.
inline Formula formula_arg(const std::string& s) {
  if (!s.empty() && s[0] == '@') return Formula::parse(read_file(s.substr(1)));
  return Formula::parse(s);
}

inline std::filesystem::path ensure_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw io_error("cannot create directory " + dir);
  return p;
}

inline void emit_json(std::ostream& out, const nlohmann::json& j) { out << j.dump() << '\n'; }

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"workbench for modal logics of minimal and least upper bounds"};
  app.require_subcommand(1);

  std::string mode_s = "mub", kind_s = "poset", format_s = "text", out_dir;
  int max_size = 5;
  bool emit_dot = false;
  app.add_option("--mode", mode_s, "diamond semantics: mub or sup")
      ->check(CLI::IsMember({"mub", "sup"}));
  app.add_option("--kind", kind_s, "order kind: poset or preorder")
      ->check(CLI::IsMember({"poset", "preorder"}));
  app.add_option("--max-size", max_size, "frame size bound for validity search");
  app.add_option("--format", format_s, "output format: text or structured")
      ->check(CLI::IsMember({"text", "structured"}));
  app.add_option("--out", out_dir, "directory to write result files into");
  app.add_flag("--emit-dot", emit_dot, "also write graphviz dot files (needs --out)");

  auto* sc_check = app.add_subcommand("check", "evaluate a formula in a model");
  std::string check_model, check_formula, check_point;
  sc_check->fallthrough();
  sc_check->add_option("model", check_model, "model file (text or json)")->required();
  sc_check->add_option("formula", check_formula, "formula, or @file")->required();
  sc_check->add_option("--point", check_point, "restrict to one point");

  auto* sc_validate = app.add_subcommand("validate", "search frames for a countermodel");
  std::string validate_formula;
  sc_validate->fallthrough();
  sc_validate->add_option("formula", validate_formula, "formula, or @file")->required();

  auto* sc_construct = app.add_subcommand("construct", "extend a poset at one gap triple");
  std::string cons_frame, cons_s, cons_t, cons_u;
  sc_construct->fallthrough();
  sc_construct->add_option("frame", cons_frame, "frame file")->required();
  sc_construct->add_option("s", cons_s, "minimal upper bound point")->required();
  sc_construct->add_option("t", cons_t, "first generator")->required();
  sc_construct->add_option("u", cons_u, "second generator")->required();

  auto* sc_iterate = app.add_subcommand("iterate", "run the extension to a fixed stage count");
  std::string iter_frame;
  int iter_stages = 1;
  sc_iterate->fallthrough();
  sc_iterate->add_option("frame", iter_frame, "frame file")->required();
  sc_iterate->add_option("stages", iter_stages, "number of stages to attempt")->required();

  auto* sc_pmorphism = app.add_subcommand("pmorphism", "check a map between posets");
  std::string pm_src, pm_tgt, pm_map;
  sc_pmorphism->fallthrough();
  sc_pmorphism->add_option("source", pm_src, "source frame file")->required();
  sc_pmorphism->add_option("target", pm_tgt, "target frame file")->required();
  sc_pmorphism->add_option("map", pm_map, "map file (src -> tgt lines)")->required();

  auto* sc_prove = app.add_subcommand("prove", "check a Hilbert proof");
  std::string prove_file, system_s = "mil-res";
  int spotcheck_n = 0;
  sc_prove->fallthrough();
  sc_prove->add_option("proof", prove_file, "proof json file")->required();
  sc_prove->add_option("--system", system_s, "axiom system: mil or mil-res")
      ->check(CLI::IsMember({"mil", "mil-res"}));
  sc_prove->add_option("--spotcheck", spotcheck_n,
                       "also test the goal on all posets up to this size");

  auto* sc_enumerate = app.add_subcommand("enumerate", "list finite orders");
  int enum_n = 1;
  bool enum_dedup = false;
  sc_enumerate->fallthrough();
  sc_enumerate->add_option("n", enum_n, "number of points")->required();
  sc_enumerate->add_flag("--dedup", enum_dedup, "one representative per isomorphism class");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("milw");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    // guard caps, overridable through the environment
    int size_cap = 7, stage_cap = 16;
    if (const char* env = std::getenv("MILW_CAP")) {
      char* end = nullptr;
      long v = std::strtol(env, &end, 10);
      if (end == env || *end != '\0' || v < 1)
        throw io_error("MILW_CAP must be a positive integer");
      size_cap = static_cast<int>(v);
      stage_cap = static_cast<int>(v);
    }

    Mode mode = mode_s == "mub" ? Mode::Mub : Mode::Sup;
    OrderKind kind = kind_s == "poset" ? OrderKind::Poset : OrderKind::Preorder;
    bool structured = format_s == "structured";

    if (app.got_subcommand(sc_check)) {
      ParsedModel pm = parse_order_auto(detail::read_file(check_model));
      Model model = to_model(pm);
      Formula f = detail::formula_arg(check_formula);
      std::uint64_t ext = extension(model, f, mode);
      std::vector<int> points;
      if (check_point.empty())
        for (int i = 0; i < model.frame.size(); ++i) points.push_back(i);
      else
        points.push_back(model.frame.index(check_point));
      bool all_true = true;
      for (int p : points) {
        bool v = (ext >> p) & 1u;
        all_true = all_true && v;
        if (structured)
          detail::emit_json(out, {{"point", model.frame.name(p)}, {"value", v}});
        else
          out << model.frame.name(p) << ": " << (v ? "true" : "false") << '\n';
      }
      return all_true ? 0 : 1;
    }

    if (app.got_subcommand(sc_validate)) {
      Formula f = detail::formula_arg(validate_formula);
      Verdict v = class_valid_upto(max_size, f, mode, kind, size_cap);
      if (v.valid) {
        if (structured)
          detail::emit_json(out, {{"valid", true},
                                  {"max_size", max_size},
                                  {"mode", mode_name(mode)},
                                  {"kind", kind_s}});
        else
          out << "valid: no countermodel on " << kind_s << "s up to " << max_size
              << " points (" << mode_name(mode) << ")\n";
        return 0;
      }
      const Countermodel& cm = *v.witness;
      auto val = valuation_sets(cm.model);
      if (structured) {
        detail::emit_json(out, {{"valid", false},
                                {"point", cm.model.frame.name(cm.point)},
                                {"model", order_json(cm.model.frame, val)}});
      } else {
        out << "invalid at point " << cm.model.frame.name(cm.point) << " of:\n"
            << print_order_text(cm.model.frame, val);
      }
      if (!out_dir.empty()) {
        auto dir = detail::ensure_dir(out_dir);
        detail::write_file(dir / "countermodel.model", print_order_text(cm.model.frame, val));
        if (emit_dot) detail::write_file(dir / "countermodel.dot", print_dot(cm.model.frame));
      }
      return 1;
    }

    if (app.got_subcommand(sc_construct)) {
      ParsedModel pm = parse_order_auto(detail::read_file(cons_frame));
      const FinOrder& F = pm.order;
      Triple tr{F.index(cons_s), F.index(cons_t), F.index(cons_u)};
      ExtensionStep st = build_extension(F, tr, 1);
      ExtensionReport rep = verify_extension(st);
      if (structured) {
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& c : rep.checks)
          checks.push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
        detail::emit_json(out, {{"ok", rep.ok()},
                                {"checks", checks},
                                {"extended", order_json(st.extended)}});
      } else {
        out << "extension of " << cons_frame << " at (" << cons_s << ", " << cons_t << ", "
            << cons_u << "): " << st.extended.size() << " points\n";
        for (const auto& c : rep.checks)
          out << "  " << c.name << ": " << (c.ok ? "pass" : "FAIL " + c.detail) << '\n';
      }
      if (!out_dir.empty()) {
        auto dir = detail::ensure_dir(out_dir);
        detail::write_file(dir / "extended.frame", print_order_text(st.extended));
        detail::write_file(dir / "step.map", print_map_text(st.projection));
        std::ostringstream report;
        for (const auto& c : rep.checks)
          report << c.name << ": " << (c.ok ? "pass" : "FAIL " + c.detail) << '\n';
        detail::write_file(dir / "report.txt", report.str());
        if (emit_dot) detail::write_file(dir / "extended.dot", print_dot(st.extended));
      }
      return rep.ok() ? 0 : 1;
    }

    if (app.got_subcommand(sc_iterate)) {
      ParsedModel pm = parse_order_auto(detail::read_file(iter_frame));
      StageTrace trace = iterate(pm.order, iter_stages, stage_cap);
      bool resolved = processed_triples_resolved(trace);
      bool maps_ok = true;
      std::vector<std::string> map_notes;
      for (std::size_t i = 0; i < trace.composed.size(); ++i) {
        const OrderMap& g = trace.composed[i];
        bool ok = check_forth(g).empty() && check_back(g).empty() &&
                  check_back_residual(g).empty() && check_order_preserving(g).empty() &&
                  check_onto(g).empty();
        maps_ok = maps_ok && ok;
        map_notes.push_back(ok ? "pass" : "FAIL");
      }
      bool all_ok = resolved && maps_ok;
      if (structured) {
        nlohmann::json steps = nlohmann::json::array();
        for (std::size_t i = 0; i < trace.processed.size(); ++i) {
          const FinOrder& at = trace.stages[i];
          const Triple& tr = trace.processed[i];
          steps.push_back({{"stage", i + 1},
                           {"triple", {at.name(tr.s), at.name(tr.t), at.name(tr.u)}},
                           {"size", trace.stages[i + 1].size()},
                           {"composed_map", map_notes[i]}});
        }
        detail::emit_json(out, {{"ok", all_ok},
                                {"stages", trace.stages.size()},
                                {"triples_resolved", resolved},
                                {"final_stage_gap_free", trace.final_stage_gap_free},
                                {"steps", steps}});
      } else {
        out << "stage 0: " << trace.stages[0].size() << " points\n";
        for (std::size_t i = 0; i < trace.processed.size(); ++i) {
          const FinOrder& at = trace.stages[i];
          const Triple& tr = trace.processed[i];
          out << "stage " << (i + 1) << ": " << trace.stages[i + 1].size() << " points, triple ("
              << at.name(tr.s) << ", " << at.name(tr.t) << ", " << at.name(tr.u)
              << "), composed map " << map_notes[i] << '\n';
        }
        out << "processed triples resolved: " << (resolved ? "yes" : "NO") << '\n';
        out << "final stage gap-free: " << (trace.final_stage_gap_free ? "yes" : "no") << '\n';
      }
      if (!out_dir.empty()) {
        auto dir = detail::ensure_dir(out_dir);
        nlohmann::json manifest;
        manifest["stages"] = nlohmann::json::array();
        for (std::size_t i = 0; i < trace.stages.size(); ++i) {
          std::string fname = "stage_" + std::to_string(i) + ".frame";
          detail::write_file(dir / fname, print_order_text(trace.stages[i]));
          if (emit_dot)
            detail::write_file(dir / ("stage_" + std::to_string(i) + ".dot"),
                               print_dot(trace.stages[i]));
          manifest["stages"].push_back({{"file", fname}, {"points", trace.stages[i].size()}});
        }
        manifest["steps"] = nlohmann::json::array();
        for (std::size_t i = 0; i < trace.processed.size(); ++i) {
          const FinOrder& at = trace.stages[i];
          const Triple& tr = trace.processed[i];
          std::string sname = "step_" + std::to_string(i + 1) + ".map";
          std::string cname = "composed_" + std::to_string(i + 1) + ".map";
          detail::write_file(dir / sname, print_map_text(trace.step_maps[i]));
          detail::write_file(dir / cname, print_map_text(trace.composed[i]));
          manifest["steps"].push_back({{"triple", {at.name(tr.s), at.name(tr.t), at.name(tr.u)}},
                                       {"map", sname},
                                       {"composed", cname},
                                       {"checks", map_notes[i]}});
        }
        manifest["triples_resolved"] = resolved;
        manifest["final_stage_gap_free"] = trace.final_stage_gap_free;
        detail::write_file(dir / "trace.json", manifest.dump(2) + "\n");
      }
      return all_ok ? 0 : 1;
    }

    if (app.got_subcommand(sc_pmorphism)) {
      FinOrder src = parse_order_auto(detail::read_file(pm_src)).order;
      FinOrder tgt = parse_order_auto(detail::read_file(pm_tgt)).order;
      OrderMap m = parse_map_text(detail::read_file(pm_map), src, tgt);
      auto forth = check_forth(m);
      auto back = check_back(m);
      auto resid = check_back_residual(m);
      auto ord = check_order_preserving(m);
      auto onto = check_onto(m);
      bool ok = forth.empty() && back.empty() && resid.empty() && ord.empty() && onto.empty();
      if (structured) {
        nlohmann::json j = {{"ok", ok},
                            {"forth", forth.size()},
                            {"back", back.size()},
                            {"residual_back", resid.size()},
                            {"order_preserving", ord.size()},
                            {"onto", onto.size()}};
        detail::emit_json(out, j);
      } else {
        auto line = [&](const char* name, std::size_t n, const std::string& witness) {
          out << name << ": "
              << (n == 0 ? "ok" : std::to_string(n) + " violations (first: " + witness + ")")
              << '\n';
        };
        line("forth", forth.size(),
             forth.empty() ? ""
                           : "sup{" + src.name(forth[0].yp) + ", " + src.name(forth[0].zp) +
                                 "} = " + src.name(forth[0].xp));
        line("back", back.size(),
             back.empty() ? ""
                          : "sup{" + tgt.name(back[0].y) + ", " + tgt.name(back[0].z) +
                                "} at " + src.name(back[0].xp));
        line("residual-back", resid.size(),
             resid.empty() ? ""
                           : "y' = " + src.name(resid[0].yp) + ", sup{f(y'), " +
                                 tgt.name(resid[0].z) + "} = " + tgt.name(resid[0].x));
        line("order-preserving", ord.size(),
             ord.empty() ? "" : src.name(ord[0].yp) + " <= " + src.name(ord[0].xp));
        line("onto", onto.size(), onto.empty() ? "" : tgt.name(onto[0]) + " uncovered");
      }
      return ok ? 0 : 1;
    }

    if (app.got_subcommand(sc_prove)) {
      Proof proof = parse_proof_json(detail::read_file(prove_file));
      System sys = system_s == "mil" ? System::Mil : System::MilRes;
      ProofCheckResult res = check(proof, sys);
      bool spot_ok = true;
      nlohmann::json spot_json;
      if (res.accepted && spotcheck_n > 0) {
        SpotcheckResult spot = soundness_spotcheck(proof, sys, spotcheck_n, size_cap);
        spot_ok = spot.ok();
        spot_json = {{"mub", spot.mub.valid}, {"sup", spot.sup.valid}};
      }
      if (structured) {
        nlohmann::json j = {{"accepted", res.accepted},
                            {"bad_line", res.bad_line},
                            {"reason", res.reason}};
        if (!spot_json.is_null()) j["spotcheck"] = spot_json;
        detail::emit_json(out, j);
      } else {
        if (res.accepted)
          out << "accepted: " << proof.goal.to_string() << " (" << system_name(sys) << ")\n";
        else
          out << "rejected at line " << res.bad_line << ": " << res.reason << '\n';
        if (res.accepted && spotcheck_n > 0)
          out << "spotcheck up to " << spotcheck_n << " points: mub "
              << (spot_json["mub"].get<bool>() ? "valid" : "INVALID") << ", sup "
              << (spot_json["sup"].get<bool>() ? "valid" : "INVALID") << '\n';
      }
      return res.accepted && spot_ok ? 0 : 1;
    }

    if (app.got_subcommand(sc_enumerate)) {
      std::filesystem::path dir;
      if (!out_dir.empty()) dir = detail::ensure_dir(out_dir);
      std::uint64_t count = 0;
      enumerate_orders(enum_n, kind, enum_dedup, [&](const FinOrder& F) {
        ++count;
        if (structured) {
          detail::emit_json(out, order_json(F));
        } else {
          out << "# frame " << count << '\n' << print_order_text(F) << '\n';
        }
        if (!out_dir.empty()) {
          char name[32];
          std::snprintf(name, sizeof name, "frame_%06llu.frame",
                        static_cast<unsigned long long>(count));
          detail::write_file(dir / name, print_order_text(F));
          if (emit_dot) {
            std::snprintf(name, sizeof name, "frame_%06llu.dot",
                          static_cast<unsigned long long>(count));
            detail::write_file(dir / name, print_dot(F));
          }
        }
        return true;
      }, size_cap);
      if (structured)
        detail::emit_json(out, {{"count", count}});
      else
        out << "# count: " << count << '\n';
      return 0;
    }

    err << "error: no subcommand\n";
    return 2;
  } catch (const cap_exceeded& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const not_gap_triple& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  } catch (const not_a_poset& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  } catch (const error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace milw::cli
