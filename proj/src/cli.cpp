#include "roundsim/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "roundsim/engine.hpp"
#include "roundsim/lower_bound.hpp"
#include "roundsim/property_io.hpp"
#include "roundsim/reductions.hpp"
#include "roundsim/registry.hpp"
#include "roundsim/trace_io.hpp"

namespace roundsim {

using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(out);
  if (!f) throw UsageError("cannot write " + out);
  f << text << "\n";
}

std::vector<std::int64_t> parse_proposals(const std::string& spec, int n) {
  if (spec == "all0") return uniform_proposals(n, 0);
  if (spec == "all1") return uniform_proposals(n, 1);
  if (static_cast<int>(spec.size()) != n) throw UsageError("--propose needs all0, all1 or exactly n bits");
  std::vector<std::int64_t> out;
  for (char c : spec) {
    if (c != '0' && c != '1') throw UsageError("--propose bit string may only contain 0 and 1");
    out.push_back(c - '0');
  }
  return out;
}

void check_system(int n, int t) {
  if (n < 2 || t < 0 || t >= n) throw UsageError("need n >= 2 and 0 <= t < n");
}

struct RunArgs {
  std::string algo, propose, schedule, out;
  int n = 0, t = 0, horizon = 0;
  bool dump_internal = false;
};

int cmd_run(const RunArgs& a) {
  check_system(a.n, a.t);
  int cap = horizon_cap_from_env();
  if (a.horizon > cap) throw UsageError("horizon exceeds SIM_HORIZON_CAP = " + std::to_string(cap));
  auto alg = make_algorithm(a.algo, a.n, a.t);
  auto props = parse_proposals(a.propose, a.n);
  AdversarySchedule schedule;
  if (!a.schedule.empty()) {
    json j;
    try {
      j = json::parse(read_file(a.schedule));
    } catch (const json::exception& ex) {
      throw UsageError(std::string("schedule is not JSON: ") + ex.what());
    }
    schedule = schedule_from_json(j);
    if (!j.contains("id")) schedule.id = a.schedule;
  }
  RunOptions opts = options_for(schedule);
  int horizon = a.horizon;
  if (horizon <= 0) {
    opts.stop_after_decided = 2;
    horizon = cap;
  }
  auto e = run(*alg, a.t, props, schedule, horizon, opts);
  emit(serialize_trace(e, TraceOptions{a.dump_internal}), a.out);
  auto d = decisions(e);
  std::size_t decided = 0;
  for (auto p : e.correct()) decided += d.of(p).has_value();
  std::cerr << alg->id() << ": " << e.horizon << " rounds, " << message_complexity(e) << " messages by correct processes, "
            << decided << "/" << e.correct().size() << " correct processes decided\n";
  return 0;
}

struct AttackArgs {
  std::string algo, out;
  int n = 0, t = 0, jobs = 1;
  bool no_witness = false;
};

int cmd_attack(const AttackArgs& a) {
  check_system(a.n, a.t);
  if (a.t < 8 || a.t % 8 != 0) throw UsageError("attack needs t >= 8 divisible by 8");
  if (a.jobs < 1) throw UsageError("--jobs must be positive");
  auto alg = make_algorithm(a.algo, a.n, a.t);
  FalsifyOptions opts;
  opts.jobs = a.jobs;
  auto v = falsify(*alg, a.n, a.t, opts);
  emit(verdict_to_json(v, !a.no_witness).dump(), a.out);
  std::cerr << alg->id() << ": " << to_string(v.kind) << " at " << v.stage;
  if (v.property) std::cerr << " (" << to_string(*v.property) << ")";
  if (v.kind == Verdict::Kind::budget_exceeded) std::cerr << " with " << v.max_messages << " >= " << v.budget << " messages";
  if (!v.reason.empty()) std::cerr << ": " << v.reason;
  std::cerr << "\n";
  switch (v.kind) {
    case Verdict::Kind::budget_exceeded: return 0;
    case Verdict::Kind::violation: return 1;
    default: return 3;
  }
}

int cmd_check(const std::string& path, bool as_json) {
  Execution e;
  try {
    e = parse_trace(read_file(path));
  } catch (const TraceParseError& ex) {
    throw UsageError(ex.what());
  }
  AlgorithmRef alg;
  try {
    alg = make_algorithm(e.algorithm_id, e.n, e.t);
  } catch (const std::exception& ex) {
    std::cerr << "warning: " << ex.what() << "; checking structure only\n";
  }
  auto violations = validate_execution(e, alg.get());
  if (as_json) {
    json j{{"valid", violations.empty()}, {"violations", json::array()}};
    for (const auto& v : violations)
      j["violations"].push_back(json{{"condition", v.condition},
                                     {"process", v.process.index},
                                     {"round", v.round},
                                     {"detail", v.detail},
                                     {"message", v.message ? message_to_json(*v.message) : json(nullptr)}});
    std::cout << j.dump() << "\n";
  }
  for (const auto& v : violations) std::cerr << to_string(v) << "\n";
  std::cerr << (violations.empty() ? "trace is a valid execution\n" : "trace violates the execution model\n");
  return violations.empty() ? 0 : 1;
}

json classification_json(const Classification& c, bool authenticated) {
  json j;
  j["verdict"] = to_string(c.verdict);
  j["authenticated"] = authenticated;
  j["trivial"] = c.triviality.trivial;
  if (c.triviality.witness) j["trivial_value"] = value_to_json(*c.triviality.witness);
  j["containment_condition"] = c.cc.holds;
  if (c.cc.witness) {
    json conflicting = json::array();
    for (const auto& x : c.cc.witness->conflicting) conflicting.push_back(configuration_to_json(x));
    j["witness"] = json{{"config", configuration_to_json(c.cc.witness->config)}, {"conflicting", conflicting}};
  }
  return j;
}

int cmd_cc(const std::string& property, int n, int t, bool unauth, bool as_json) {
  check_system(n, t);
  auto prop = load_property(property, n, t);
  auto c = classify_solvability(prop, !unauth);
  if (as_json) std::cout << classification_json(c, !unauth).dump() << "\n";
  std::cerr << prop->name() << " at n = " << n << ", t = " << t << (unauth ? " (unauthenticated)" : " (authenticated)")
            << ": " << to_string(c.verdict) << "\n";
  if (c.cc.witness) {
    std::cerr << "  containment condition fails at " << to_string(c.cc.witness->config) << "; conflicting:";
    for (const auto& x : c.cc.witness->conflicting) std::cerr << " " << to_string(x);
    std::cerr << "\n";
  }
  return 0;
}

json anchors_json(const AnchorSet& a) {
  return json{{"c0", configuration_to_json(a.c0)},
              {"v0", value_to_json(a.v0)},
              {"c1_star", configuration_to_json(a.c1_star)},
              {"c1", configuration_to_json(a.c1)},
              {"v1", value_to_json(a.v1)}};
}

std::vector<Message> all_messages(const Execution& e) {
  std::vector<Message> out;
  for (const auto& b : e.behaviors)
    for (const auto& f : b.fragments) out.insert(out.end(), f.sent.begin(), f.sent.end());
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_reduce_weak(const std::string& via, const std::string& property, int n, int t, const std::string& out) {
  check_system(n, t);
  auto prop = load_property(property, n, t);
  auto agreement = make_algorithm(via, n, t);
  int cap = horizon_cap_from_env();
  auto anchors = derive_anchors(*agreement, *prop, cap);
  auto weak = weak_from_agreement(agreement, anchors);
  json report{{"anchors", anchors_json(anchors)}, {"algorithm", weak->id()}};
  bool ok = true;
  RunOptions opts;
  opts.stop_after_decided = 2;
  for (int bit : {0, 1}) {
    auto props = uniform_proposals(n, bit);
    auto e = run(*weak, t, props, AdversarySchedule{}, cap, opts);
    auto inner_props = (bit == 0 ? anchors.c0 : anchors.c1).as_value();
    auto inner = run(*agreement, t, inner_props, AdversarySchedule{}, e.horizon);
    auto d = decisions(e);
    bool decided = true;
    for (const auto& v : d.value) decided = decided && v == scalar(bit);
    bool same_messages = all_messages(e) == all_messages(inner);
    ok = ok && decided && same_messages;
    report["all" + std::to_string(bit)] =
        json{{"decides_proposal", decided}, {"messages", message_complexity(e)}, {"same_messages_as_inner", same_messages}};
  }
  report["ok"] = ok;
  emit(report.dump(), out);
  std::cerr << weak->id() << ": anchors c0 = " << to_string(anchors.c0) << ", c1* = " << to_string(anchors.c1_star)
            << (ok ? "; conformance ok\n" : "; conformance FAILED\n");
  return ok ? 0 : 1;
}

int cmd_reduce_agreement(const std::string& property, int n, int t, const std::string& out) {
  check_system(n, t);
  auto prop = load_property(property, n, t);
  auto agreement = val_agreement_from_ic(prop);
  int cap = horizon_cap_from_env();
  std::vector<InputConfiguration> samples;
  ValueContext fulls{n, 0, prop->context().inputs};
  if (configuration_count(fulls) <= 64) {
    samples = enumerate_configurations(fulls);
  } else {
    for (auto v : prop->context().inputs)
      samples.push_back(InputConfiguration::full(std::vector<std::int64_t>(static_cast<std::size_t>(n), v)));
  }
  json report{{"algorithm", agreement->id()}, {"runs", json::array()}};
  bool ok = true;
  RunOptions opts;
  opts.stop_after_decided = 2;
  for (const auto& c : samples) {
    auto props = c.as_value();
    auto e = run(*agreement, t, props, AdversarySchedule{}, cap, opts);
    auto d = decisions(e);
    auto allowed = common_admissible(*prop, c);
    bool good = d.value.front().has_value() && allowed.contains(*d.value.front());
    for (const auto& v : d.value) good = good && v == d.value.front();
    ok = ok && good;
    report["runs"].push_back(json{{"config", configuration_to_json(c)},
                                  {"decision", d.value.front() ? value_to_json(*d.value.front()) : json(nullptr)},
                                  {"ok", good}});
  }
  report["ok"] = ok;
  emit(report.dump(), out);
  std::cerr << agreement->id() << ": " << samples.size() << " fault-free runs, " << (ok ? "all conform\n" : "conformance FAILED\n");
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Round-based consensus simulator: executions, lower-bound falsification, validity analysis"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run_cmd = app.add_subcommand("run", "Simulate one execution and write its trace");
  run_cmd->add_option("--algo", ra.algo, "Algorithm id")->required();
  run_cmd->add_option("--n", ra.n, "Number of processes")->required();
  run_cmd->add_option("--t", ra.t, "Resilience bound")->required();
  run_cmd->add_option("--propose", ra.propose, "Bit string of length n, all0 or all1")->required();
  run_cmd->add_option("--schedule", ra.schedule, "Adversary schedule file");
  run_cmd->add_option("--horizon", ra.horizon, "Rounds to simulate (default: until decided + 2)");
  run_cmd->add_option("--out", ra.out, "Trace output file (default stdout)");
  run_cmd->add_flag("--dump-internal", ra.dump_internal, "Include full internal state bytes");

  AttackArgs aa;
  auto* attack_cmd = app.add_subcommand("attack", "Search for a weak-consensus violation under the message budget");
  attack_cmd->add_option("--algo", aa.algo, "Algorithm id")->required();
  attack_cmd->add_option("--n", aa.n, "Number of processes")->required();
  attack_cmd->add_option("--t", aa.t, "Resilience bound")->required();
  attack_cmd->add_option("--out", aa.out, "Verdict output file (default stdout)");
  attack_cmd->add_option("--jobs", aa.jobs, "Parallel probe runs");
  attack_cmd->add_flag("--no-witness", aa.no_witness, "Omit the witness trace from the verdict");

  std::string trace_path;
  bool check_json = false;
  auto* check_cmd = app.add_subcommand("check", "Validate a trace against the execution model");
  check_cmd->add_option("trace", trace_path, "Trace file")->required();
  check_cmd->add_flag("--json", check_json, "Print a JSON report on stdout");

  std::string cc_property;
  int cc_n = 0, cc_t = 0;
  bool cc_auth = false, cc_unauth = false, cc_json = false;
  auto* cc_cmd = app.add_subcommand("cc", "Classify a validity property");
  cc_cmd->add_option("--property", cc_property, "Property file or builtin:<weak|strong|ic|any>")->required();
  cc_cmd->add_option("--n", cc_n, "Number of processes")->required();
  cc_cmd->add_option("--t", cc_t, "Resilience bound")->required();
  auto* auth_flag = cc_cmd->add_flag("--auth", cc_auth, "Authenticated setting (default)");
  cc_cmd->add_flag("--unauth", cc_unauth, "Unauthenticated setting")->excludes(auth_flag);
  cc_cmd->add_flag("--json", cc_json, "Print a JSON report on stdout");

  auto* reduce_cmd = app.add_subcommand("reduce", "Build and exercise a reduction");
  reduce_cmd->require_subcommand(1);
  std::string rw_via, rw_property, rw_out;
  int rw_n = 0, rw_t = 0;
  auto* weak_cmd = reduce_cmd->add_subcommand("weak", "Weak consensus from an agreement algorithm");
  weak_cmd->add_option("--via", rw_via, "Agreement algorithm id")->required();
  weak_cmd->add_option("--property", rw_property, "Validity property of the agreement algorithm")->required();
  weak_cmd->add_option("--n", rw_n, "Number of processes")->required();
  weak_cmd->add_option("--t", rw_t, "Resilience bound")->required();
  weak_cmd->add_option("--out", rw_out, "Report output file (default stdout)");
  std::string ra_property, ra_out;
  int ra_n = 0, ra_t = 0;
  auto* agr_cmd = reduce_cmd->add_subcommand("agreement", "Agreement for a property from interactive consistency");
  agr_cmd->add_option("--property", ra_property, "Validity property")->required();
  agr_cmd->add_option("--n", ra_n, "Number of processes")->required();
  agr_cmd->add_option("--t", ra_t, "Resilience bound")->required();
  agr_cmd->add_option("--out", ra_out, "Report output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(ra);
    if (attack_cmd->parsed()) return cmd_attack(aa);
    if (check_cmd->parsed()) return cmd_check(trace_path, check_json);
    if (cc_cmd->parsed()) return cmd_cc(cc_property, cc_n, cc_t, cc_unauth, cc_json);
    if (weak_cmd->parsed()) return cmd_reduce_weak(rw_via, rw_property, rw_n, rw_t, rw_out);
    if (agr_cmd->parsed()) return cmd_reduce_agreement(ra_property, ra_n, ra_t, ra_out);
  } catch (const ReductionError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  } catch (const MalformedAlgorithmOutput& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace roundsim
