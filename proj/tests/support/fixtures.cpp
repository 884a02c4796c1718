#include "fixtures.hpp"

#include <algorithm>

namespace fixtures {

using namespace roundsim;

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::vector<std::int64_t> random_bits(std::mt19937_64& rng, int n) {
  std::vector<std::int64_t> out;
  for (int i = 0; i < n; ++i) out.push_back(uniform(rng, 0, 1));
  return out;
}

namespace {

AdversarySchedule build(std::mt19937_64& rng, int n, int t, int horizon, bool allow_isolation,
                        std::optional<ProcessId> keep_clean) {
  AdversarySchedule s;
  s.id = "random";
  auto procs = all_processes(n);
  std::shuffle(procs.begin(), procs.end(), rng);
  int f = uniform(rng, 0, t);
  s.faulty.insert(procs.begin(), procs.begin() + f);
  if (keep_clean && uniform(rng, 0, 1) && static_cast<int>(s.faulty.size()) < t) s.faulty.insert(*keep_clean);
  if (s.faulty.empty()) return s;
  std::vector<ProcessId> faulty(s.faulty.begin(), s.faulty.end());
  if (allow_isolation && uniform(rng, 0, 2) == 0 && static_cast<int>(faulty.size()) < n) {
    int size = uniform(rng, 1, static_cast<int>(faulty.size()));
    ProcessSet group(faulty.begin(), faulty.begin() + size);
    s.isolate.push_back(IsolationDirective{group, uniform(rng, 1, horizon)});
  }
  int count = uniform(rng, 0, 3 * n);
  for (int k = 0; k < count; ++k) {
    auto actor = faulty[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(faulty.size()) - 1))];
    ProcessId other(uniform(rng, 1, n));
    if (other == actor) continue;
    bool send = uniform(rng, 0, 1) == 0;
    if (keep_clean && actor == *keep_clean) send = false;
    int round = uniform(rng, 1, horizon);
    if (send)
      s.omissions.push_back(OmissionDirective{actor, other, round, OmissionKind::send});
    else
      s.omissions.push_back(OmissionDirective{other, actor, round, OmissionKind::receive});
  }
  return s;
}

}  // namespace

AdversarySchedule random_omission_schedule(std::mt19937_64& rng, int n, int t, int horizon, bool allow_isolation) {
  return build(rng, n, t, horizon, allow_isolation, std::nullopt);
}

AdversarySchedule random_receive_heavy_schedule(std::mt19937_64& rng, int n, int t, int horizon, ProcessId keep_clean) {
  return build(rng, n, t, horizon, true, keep_clean);
}

}  // namespace fixtures
