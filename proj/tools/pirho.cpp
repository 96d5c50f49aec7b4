// pirho: command-line front end for the workbench.
//
// Subcommands: parse, steps, otrace, dtrace, ltrace, compare, refine,
// rules, fuzz.  All set-valued output is printed sorted, so identical
// inputs and flags give byte-identical output.  Exit status: 0 on
// success or equality, 1 on a semantic difference or a failed/undecided
// refinement, 2 on usage or parse errors.
//
// Process files are UTF-8 and hold one process; "--" starts a comment
// running to the end of the line.  The default universe comes from the
// PIRHO_UNIVERSE environment variable, falling back to "#c,#d".

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pirho/generate.hpp"
#include "pirho/liveness.hpp"
#include "pirho/logic.hpp"
#include "pirho/opsem.hpp"
#include "pirho/resources.hpp"
#include "pirho/safety.hpp"
#include "pirho/syntax.hpp"

namespace {

using namespace pirho;

struct CommonOpts {
  std::string config;
  std::string universe;
  std::string sigma = "{}";
  int depth = 2;
  int silent_budget = -1;
  int state_budget = 2000;
};

std::string default_universe() {
  const char* env = std::getenv("PIRHO_UNIVERSE");
  return env && *env ? env : "#c,#d";
}

/// Attaches the options every semantic subcommand shares.
void add_common(CLI::App* cmd, CommonOpts& o, bool with_sigma = true) {
  cmd->add_option("--config", o.config,
                  "Read defaults from a key=value file (flags win)");
  cmd->add_option("--universe", o.universe,
                  "Channel universe, e.g. '#c,#d'")
      ->default_val(default_universe());
  if (with_sigma)
    cmd->add_option("--sigma", o.sigma,
                    "Resource literal, e.g. '{#c: pub, #d: pri}'");
  cmd->add_option("--depth", o.depth, "Trace depth bound k")
      ->default_val(2);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Fills options the command line left unset from a `key=value` file.
/// Lines starting with '#' or ';' are comments; values may be wrapped
/// in single or double quotes.
void apply_config(CLI::App* cmd, CommonOpts& o) {
  if (o.config.empty()) return;
  std::ifstream in(o.config);
  if (!in) throw ParseError("cannot open config '" + o.config + "'");
  const auto unset = [&](const char* name) {
    const CLI::Option* opt = cmd->get_option_no_throw(name);
    return opt != nullptr && opt->count() == 0;
  };
  const auto to_int = [&](const std::string& key, const std::string& val) {
    std::size_t used = 0;
    int parsed = 0;
    try {
      parsed = std::stoi(val, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != val.size() || val.empty())
      throw ParseError("config '" + o.config + "': key '" + key +
                       "' needs an integer, got '" + val + "'");
    return parsed;
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ParseError("config '" + o.config + "' line " +
                       std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (val.size() >= 2 && (val.front() == '"' || val.front() == '\'') &&
        val.back() == val.front())
      val = val.substr(1, val.size() - 2);
    if (key == "universe") {
      if (unset("--universe")) o.universe = val;
    } else if (key == "sigma") {
      if (unset("--sigma")) o.sigma = val;
    } else if (key == "depth") {
      if (unset("--depth")) o.depth = to_int(key, val);
    } else if (key == "silent-budget") {
      if (unset("--silent-budget")) o.silent_budget = to_int(key, val);
    } else if (key == "state-budget") {
      if (unset("--state-budget")) o.state_budget = to_int(key, val);
    } else {
      throw ParseError("config '" + o.config + "': unknown key '" + key +
                       "'");
    }
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ProcPtr load_process(const std::string& path, const Universe& u) {
  return parse(slurp(path), u);
}

std::string show_trace(const Trace& t, const Universe& u) {
  return render_trace(t, u);  // the empty trace renders as an empty line
}

void print_traces(const TraceSet& ts, const Universe& u) {
  for (const auto& t : ts) std::cout << show_trace(t, u) << "\n";
}

void print_ltraces(const LTraceSet& ts, const Universe& u) {
  std::vector<std::string> lines;
  lines.reserve(ts.size());
  for (const auto& t : ts) lines.push_back(render_ltrace(t, u));
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) std::cout << l << "\n";
}

/// Prints the symmetric difference of two trace sets; returns whether
/// the sets were equal.
template <typename Set, typename Render>
bool print_diff(const Set& explored, const Set& table, Render render) {
  std::vector<std::string> only_op, only_den;
  for (const auto& t : explored)
    if (!table.count(t)) only_op.push_back(render(t));
  for (const auto& t : table)
    if (!explored.count(t)) only_den.push_back(render(t));
  std::sort(only_op.begin(), only_op.end());
  std::sort(only_den.begin(), only_den.end());
  for (const auto& l : only_op)
    std::cout << "only in exploration: " << l << "\n";
  for (const auto& l : only_den) std::cout << "only in table: " << l << "\n";
  return only_op.empty() && only_den.empty();
}

int run(int argc, char** argv) {
  CLI::App app{"pirho: resource-sensitive process semantics workbench"};
  app.require_subcommand(1);

  // ---- parse ------------------------------------------------------------
  std::string parse_file;
  CommonOpts parse_o;
  CLI::App* cmd_parse =
      app.add_subcommand("parse", "Parse a process file and print it back");
  cmd_parse->add_option("file", parse_file, "Process file")->required();
  add_common(cmd_parse, parse_o, false);

  // ---- steps ------------------------------------------------------------
  std::string steps_file;
  CommonOpts steps_o;
  CLI::App* cmd_steps = app.add_subcommand(
      "steps", "Print the permitted steps of a process at a resource");
  cmd_steps->add_option("file", steps_file, "Process file")->required();
  add_common(cmd_steps, steps_o);

  // ---- otrace / dtrace --------------------------------------------------
  std::string otrace_file;
  CommonOpts otrace_o;
  bool otrace_diff = false;
  CLI::App* cmd_otrace = app.add_subcommand(
      "otrace", "Explore the bounded traces of a process at a resource");
  cmd_otrace->add_option("file", otrace_file, "Process file")->required();
  add_common(cmd_otrace, otrace_o);
  cmd_otrace->add_option("--silent-budget", otrace_o.silent_budget,
                         "Silent steps allowed per path (-1 = default)");
  cmd_otrace->add_flag("--diff", otrace_diff,
                       "Print the exploration/table symmetric difference");

  std::string dtrace_file;
  CommonOpts dtrace_o;
  bool dtrace_diff = false;
  CLI::App* cmd_dtrace = app.add_subcommand(
      "dtrace", "Print the trace table entry of a process at a resource");
  cmd_dtrace->add_option("file", dtrace_file, "Process file")->required();
  add_common(cmd_dtrace, dtrace_o);
  cmd_dtrace->add_flag("--diff", dtrace_diff,
                       "Print the exploration/table symmetric difference");

  // ---- ltrace -----------------------------------------------------------
  std::string ltrace_file;
  CommonOpts ltrace_o;
  bool ltrace_diff = false, ltrace_table = false;
  CLI::App* cmd_ltrace = app.add_subcommand(
      "ltrace", "Print the complete runs of a process at a resource");
  cmd_ltrace->add_option("file", ltrace_file, "Process file")->required();
  add_common(cmd_ltrace, ltrace_o);
  cmd_ltrace->add_option("--state-budget", ltrace_o.state_budget,
                         "States explored before reporting '?'");
  cmd_ltrace->add_flag("--table", ltrace_table,
                       "Print the table entry instead of the exploration");
  cmd_ltrace->add_flag("--diff", ltrace_diff,
                       "Print the exploration/table symmetric difference");

  // ---- compare ----------------------------------------------------------
  std::string compare_file, compare_mode = "safety";
  CommonOpts compare_o;
  CLI::App* cmd_compare = app.add_subcommand(
      "compare", "Check the exploration against the table at one resource");
  cmd_compare->add_option("file", compare_file, "Process file")->required();
  add_common(cmd_compare, compare_o);
  cmd_compare->add_option("--mode", compare_mode, "safety or liveness")
      ->check(CLI::IsMember({"safety", "liveness"}));

  // ---- refine -----------------------------------------------------------
  std::string refine_assert = "true", refine_lhs, refine_rhs;
  CommonOpts refine_o;
  std::size_t refine_cap = 4096;
  CLI::App* cmd_refine = app.add_subcommand(
      "refine", "Check assertion-qualified trace refinement of two files");
  cmd_refine->add_option("lhs", refine_lhs, "Candidate process file")
      ->required();
  cmd_refine->add_option("rhs", refine_rhs, "Specification process file")
      ->required();
  add_common(cmd_refine, refine_o, false);
  cmd_refine->add_option("--assert", refine_assert,
                         "Resource assertion, e.g. 'x@pri /\\ y@known'");
  cmd_refine->add_option("--max-assignments", refine_cap,
                         "Cap on enumerated variable assignments");

  // ---- rules ------------------------------------------------------------
  CommonOpts rules_o;
  int rules_samples = 100;
  std::uint64_t rules_seed = 1;
  CLI::App* cmd_rules = app.add_subcommand(
      "rules", "Sample every proof rule for soundness violations");
  add_common(cmd_rules, rules_o, false);
  cmd_rules->add_option("--samples", rules_samples, "Samples per rule")
      ->default_val(100);
  cmd_rules->add_option("--seed", rules_seed, "Base seed")->default_val(1);

  // ---- fuzz -------------------------------------------------------------
  CommonOpts fuzz_o;
  int fuzz_count = 100;
  std::uint64_t fuzz_seed = 0;
  std::string fuzz_mode = "safety";
  bool fuzz_fail_fast = false;
  CLI::App* cmd_fuzz = app.add_subcommand(
      "fuzz", "Generate instances and cross-check the two semantics");
  add_common(cmd_fuzz, fuzz_o, false);
  cmd_fuzz->add_option("--count", fuzz_count, "Instances")->default_val(100);
  cmd_fuzz->add_option("--seed", fuzz_seed, "Corpus seed")->default_val(0);
  cmd_fuzz->add_option("--mode", fuzz_mode, "safety or liveness")
      ->check(CLI::IsMember({"safety", "liveness"}));
  cmd_fuzz->add_flag("--fail-fast", fuzz_fail_fast,
                     "Stop at the first differing instance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message or requested help
    return code == 0 ? 0 : 2;
  }

  if (*cmd_parse) {
    apply_config(cmd_parse, parse_o);
    const Universe u = Universe::parse_csv(parse_o.universe);
    std::cout << print(load_process(parse_file, u), u) << "\n";
    return 0;
  }

  if (*cmd_steps) {
    apply_config(cmd_steps, steps_o);
    const Universe u = Universe::parse_csv(steps_o.universe);
    const Resource sigma = parse_resource(steps_o.sigma, u);
    const ProcPtr p = load_process(steps_file, u);
    require_executable(p);
    std::vector<std::string> lines;
    for (const auto& s : res_steps(p, sigma, u))
      lines.push_back("--" + render_action(s.act, u) + "--> " +
                      print(s.next, u) + " ; " + render_resource(s.sigma, u));
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines) std::cout << l << "\n";
    return 0;
  }

  if (*cmd_otrace || *cmd_dtrace) {
    const bool op_side = static_cast<bool>(*cmd_otrace);
    const CommonOpts& o = op_side ? otrace_o : dtrace_o;
    const bool diff = op_side ? otrace_diff : dtrace_diff;
    const Universe u = Universe::parse_csv(o.universe);
    const Resource sigma = parse_resource(o.sigma, u);
    const ProcPtr p =
        load_process(op_side ? otrace_file : dtrace_file, u);
    if (diff) {
      const ObserveResult op = observe_traces(p, sigma, u, o.depth,
                                              o.silent_budget);
      if (op.exhausted) {
        std::cout << "UNDECIDED: exploration budget exhausted\n";
        return 1;
      }
      SafetyCtx ctx(u, o.depth);
      const TraceSet den = ctx.denote(p).at(sigma);
      const bool equal = print_diff(op.traces, den, [&](const Trace& t) {
        return show_trace(t, u);
      });
      return equal ? 0 : 1;
    }
    if (op_side) {
      const ObserveResult op =
          observe_traces(p, sigma, u, o.depth, o.silent_budget);
      print_traces(op.traces, u);
      if (op.exhausted) {
        std::cerr << "warning: exploration budget exhausted; the set is a "
                     "lower bound\n";
      }
    } else {
      SafetyCtx ctx(u, o.depth);
      print_traces(ctx.denote(p).at(sigma), u);
    }
    return 0;
  }

  if (*cmd_ltrace) {
    const Universe u = Universe::parse_csv(ltrace_o.universe);
    const Resource sigma = parse_resource(ltrace_o.sigma, u);
    const ProcPtr p = load_process(ltrace_file, u);
    LivenessCtx ctx(u, ltrace_o.depth, ltrace_o.state_budget);
    if (ltrace_diff) {
      const LTraceSet op = ctx.lobserve(p, sigma, ltrace_o.depth);
      const LTraceSet den = ctx.ldenote(p).at(sigma);
      if (has_unknown(op) || has_unknown(den)) {
        std::cout << "UNDECIDED: state budget exhausted\n";
        return 1;
      }
      const bool equal = print_diff(op, den, [&](const LTrace& t) {
        return render_ltrace(t, u);
      });
      return equal ? 0 : 1;
    }
    if (ltrace_table) {
      print_ltraces(ctx.ldenote(p).at(sigma), u);
    } else {
      print_ltraces(ctx.lobserve(p, sigma, ltrace_o.depth), u);
    }
    return 0;
  }

  if (*cmd_compare) {
    const Universe u = Universe::parse_csv(compare_o.universe);
    const Resource sigma = parse_resource(compare_o.sigma, u);
    const ProcPtr p = load_process(compare_file, u);
    const CongMode mode = compare_mode == "safety" ? CongMode::Safety
                                                   : CongMode::Liveness;
    const CongruenceReport rep =
        congruence_check(p, sigma, u, compare_o.depth, mode);
    if (rep.skipped) {
      std::cout << "UNDECIDED: " << rep.skip_reason << "\n";
      return 1;
    }
    if (rep.equal) {
      std::size_t count;
      if (mode == CongMode::Safety) {
        count = observe_traces(p, sigma, u, compare_o.depth).traces.size();
      } else {
        LivenessCtx ctx(u, compare_o.depth);
        count = ctx.lobserve(p, sigma, compare_o.depth).size();
      }
      std::cout << "EQUAL (" << count << " traces)\n";
      return 0;
    }
    std::cout << "DIFFER (" << rep.only_op.size() << " only in exploration, "
              << rep.only_den.size() << " only in table)\n";
    std::vector<std::string> lines;
    for (const auto& t : rep.only_op)
      lines.push_back("only in exploration: " + t);
    for (const auto& t : rep.only_den) lines.push_back("only in table: " + t);
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines) std::cout << l << "\n";
    return 1;
  }

  if (*cmd_refine) {
    const Universe u = Universe::parse_csv(refine_o.universe);
    const AssertPtr guard = parse_assertion(refine_assert);
    const ProcPtr lhs = load_process(refine_lhs, u);
    const ProcPtr rhs = load_process(refine_rhs, u);
    const RefinementVerdict v = check_refinement(
        {}, guard, lhs, rhs, u, refine_o.depth, refine_cap);
    if (!v.holds) {
      std::cout << "FAILS\n";
      if (v.cex) {
        std::cout << "assignment: " << render_rho(v.cex->rho, u) << "\n"
                  << "resource:   " << render_resource(v.cex->sigma, u)
                  << "\n"
                  << "trace:      " << show_trace(v.cex->witness, u) << "\n";
      }
      return 1;
    }
    if (!v.complete) {
      std::cout << "UNDECIDED: assignment cap reached\n";
      return 1;
    }
    std::cout << "HOLDS\n";
    return 0;
  }

  if (*cmd_rules) {
    const Universe u = Universe::parse_csv(rules_o.universe);
    long violations = 0;
    int idx = 0;
    for (const auto& [rule, name] : all_rules()) {
      const RuleReport rep = check_rule_soundness(
          rule, rules_samples, u, rules_o.depth, rules_seed + idx++);
      std::cout << name << ": samples=" << rep.samples
                << " premises-held=" << rep.premise_held
                << " violations=" << rep.violations << "\n";
      for (const auto& d : rep.details) std::cout << "  " << d << "\n";
      violations += rep.violations;
    }
    return violations == 0 ? 0 : 1;
  }

  if (*cmd_fuzz) {
    const Universe u = Universe::parse_csv(fuzz_o.universe);
    GenConfig cfg;
    cfg.universe = u;
    cfg.max_depth = fuzz_o.depth;
    cfg.seed = fuzz_seed;
    const auto corpus = make_corpus(fuzz_count, cfg);
    const CongMode mode =
        fuzz_mode == "safety" ? CongMode::Safety : CongMode::Liveness;
    SafetyCtx sctx(u, fuzz_o.depth);
    LivenessCtx lctx(u, fuzz_o.depth);
    int equal = 0, differ = 0, skipped = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto& [p, sigma] = corpus[i];
      const CongruenceReport rep = congruence_check(
          p, sigma, u, fuzz_o.depth, mode, &sctx, &lctx);
      if (rep.skipped) {
        ++skipped;
        std::cout << i << " SKIPPED 0 " << rep.skip_reason << "\n";
      } else if (rep.equal) {
        ++equal;
        std::cout << i << " EQUAL 0\n";
      } else {
        ++differ;
        std::cout << i << " DIFFER "
                  << rep.only_op.size() + rep.only_den.size() << "\n";
        if (fuzz_fail_fast) break;
      }
    }
    std::cout << "summary: " << corpus.size() << " instances, " << equal
              << " equal, " << differ << " differ, " << skipped
              << " skipped\n";
    return differ == 0 ? 0 : 1;
  }

  return 2;  // unreachable: a subcommand is required
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const pirho::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const pirho::SemanticError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
