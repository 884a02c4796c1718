#include "roundsim/trace_io.hpp"

namespace roundsim {

using nlohmann::json;

namespace {

const char* group_name(IsolatedGroup g) {
  switch (g) {
    case IsolatedGroup::b: return "B";
    case IsolatedGroup::c: return "C";
    default: return "none";
  }
}

IsolatedGroup group_from_name(const std::string& s) {
  if (s == "B") return IsolatedGroup::b;
  if (s == "C") return IsolatedGroup::c;
  if (s == "none") return IsolatedGroup::none;
  throw TraceParseError("unknown isolated group '" + s + "'");
}

json process_list(const ProcessSet& set) {
  json out = json::array();
  for (auto p : set) out.push_back(p.index);
  return out;
}

ProcessSet process_set(const json& arr) {
  ProcessSet out;
  for (const auto& v : arr) out.insert(ProcessId(v.get<int>()));
  return out;
}

json messages_to_json(const MessageSet& set) {
  json out = json::array();
  for (const auto& m : set) out.push_back(message_to_json(m));
  return out;
}

MessageSet messages_from_json(const json& arr) {
  if (!arr.is_array()) throw TraceParseError("message set is not an array");
  MessageSet out;
  out.reserve(arr.size());
  for (const auto& j : arr) out.push_back(message_from_json(j));
  normalize(out);
  return out;
}

}  // namespace

json message_to_json(const Message& m) {
  return json{{"from", m.sender.index},
              {"to", m.receiver.index},
              {"round", m.round},
              {"payload", to_hex(m.payload.bytes())}};
}

Message message_from_json(const json& j) {
  return Message{ProcessId(j.at("from").get<int>()), ProcessId(j.at("to").get<int>()), j.at("round").get<int>(),
                 Payload(from_hex(j.at("payload").get<std::string>()))};
}

json value_to_json(const Value& v) { return json(v); }

Value value_from_json(const json& j) {
  if (j.is_number_integer()) return scalar(j.get<std::int64_t>());
  return j.get<Value>();
}

json execution_to_json(const Execution& e, const TraceOptions& options) {
  json doc;
  doc["n"] = e.n;
  doc["t"] = e.t;
  doc["faulty"] = process_list(e.faulty);
  doc["byzantine"] = process_list(e.byzantine);
  doc["horizon"] = e.horizon;
  doc["algorithm"] = e.algorithm_id;
  doc["schedule"] = e.schedule_id;
  if (e.tag)
    doc["scenario"] = {{"group", group_name(e.tag->group)}, {"from_round", e.tag->from_round}, {"bit", e.tag->bit}};
  else
    doc["scenario"] = nullptr;
  json procs = json::array();
  for (std::size_t i = 0; i < e.behaviors.size(); ++i) {
    json frags = json::array();
    for (const auto& f : e.behaviors[i].fragments) {
      json state{{"proposal", f.state.proposal},
                 {"decision", f.state.decision ? value_to_json(*f.state.decision) : json(nullptr)},
                 {"internal_hash", u64_to_hex(f.state.internal.digest())}};
      if (options.include_internal && f.state.internal.has_bytes())
        state["internal"] = to_hex(f.state.internal.bytes());
      frags.push_back(json{{"round", f.state.round},
                           {"state", std::move(state)},
                           {"sent", messages_to_json(f.sent)},
                           {"send_omitted", messages_to_json(f.send_omitted)},
                           {"received", messages_to_json(f.received)},
                           {"receive_omitted", messages_to_json(f.receive_omitted)}});
    }
    procs.push_back(json{{"process", static_cast<int>(i + 1)}, {"fragments", std::move(frags)}});
  }
  doc["processes"] = std::move(procs);
  return doc;
}

Execution execution_from_json(const json& doc) {
  try {
    Execution e;
    e.n = doc.at("n").get<int>();
    e.t = doc.at("t").get<int>();
    if (e.n < 1 || e.t < 0) throw TraceParseError("invalid n or t");
    e.faulty = process_set(doc.at("faulty"));
    e.byzantine = doc.contains("byzantine") ? process_set(doc.at("byzantine")) : ProcessSet{};
    e.horizon = doc.at("horizon").get<int>();
    e.algorithm_id = doc.at("algorithm").get<std::string>();
    e.schedule_id = doc.at("schedule").get<std::string>();
    if (doc.contains("scenario") && !doc.at("scenario").is_null()) {
      const auto& s = doc.at("scenario");
      e.tag = ScenarioTag{group_from_name(s.at("group").get<std::string>()), s.at("from_round").get<int>(),
                          s.at("bit").get<int>()};
    }
    const auto& procs = doc.at("processes");
    if (!procs.is_array() || static_cast<int>(procs.size()) != e.n)
      throw TraceParseError("expected one behavior per process");
    for (std::size_t i = 0; i < procs.size(); ++i) {
      const auto& pj = procs[i];
      ProcessId p(pj.at("process").get<int>());
      if (p.index != static_cast<int>(i + 1)) throw TraceParseError("behaviors out of order");
      Behavior b;
      for (const auto& fj : pj.at("fragments")) {
        Fragment f;
        const auto& sj = fj.at("state");
        f.state.process = p;
        f.state.round = fj.at("round").get<int>();
        f.state.proposal = sj.at("proposal").get<std::int64_t>();
        if (!sj.at("decision").is_null()) f.state.decision = value_from_json(sj.at("decision"));
        auto digest = u64_from_hex(sj.at("internal_hash").get<std::string>());
        if (sj.contains("internal")) {
          f.state.internal = StateBlob(from_hex(sj.at("internal").get<std::string>()));
          if (f.state.internal.digest() != digest) throw TraceParseError("internal state does not match its hash");
        } else {
          f.state.internal = StateBlob::digest_only(digest);
        }
        f.sent = messages_from_json(fj.at("sent"));
        f.send_omitted = messages_from_json(fj.at("send_omitted"));
        f.received = messages_from_json(fj.at("received"));
        f.receive_omitted = messages_from_json(fj.at("receive_omitted"));
        b.fragments.push_back(std::move(f));
      }
      e.behaviors.push_back(std::move(b));
    }
    return e;
  } catch (const json::exception& ex) {
    throw TraceParseError(std::string("malformed trace: ") + ex.what());
  } catch (const DecodeError& ex) {
    throw TraceParseError(std::string("malformed trace: ") + ex.what());
  }
}

std::string serialize_trace(const Execution& e, const TraceOptions& options) {
  return execution_to_json(e, options).dump();
}

Execution parse_trace(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& ex) {
    throw TraceParseError(std::string("trace is not JSON: ") + ex.what());
  }
  return execution_from_json(doc);
}

}  // namespace roundsim
