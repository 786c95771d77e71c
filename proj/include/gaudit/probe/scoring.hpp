#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "gaudit/probe/backend.hpp"
#include "gaudit/probe/templates.hpp"
#include "gaudit/util/parallel.hpp"
#include "gaudit/wordset.hpp"

namespace gaudit::probe {

struct CaseScore {
  std::string case_id;
  std::string predicted;  // empty when no candidate got any probability
  double probability = 0.0;  // probability of the correct nominative
  bool unscorable = false;   // correct nominative could not be scored

  friend bool operator==(const CaseScore&, const CaseScore&) = default;
};

struct ProbeResult {
  PronounPair pair;
  double accuracy = 0.0;
  double mean_probability = 0.0;
  std::size_t case_count = 0;
  std::size_t unscorable_count = 0;
  std::vector<CaseScore> per_case;
};

struct ScoreOptions {
  // Take the prediction from the backend's full-vocabulary top-1 instead of
  // the argmax over the candidate pronouns.
  bool full_vocabulary = false;
  std::size_t concurrency = 8;
};

namespace detail {

inline CaseScore score_one(const ProbeCase& c, const ScoringBackend& backend, const ScoreOptions& opts) {
  service::ScoreRequest req{c.prompt, c.candidates, std::nullopt};
  if (opts.full_vocabulary) req.top_k = 1;
  const auto res = backend.score(req);

  CaseScore s{c.case_id, {}, 0.0, true};
  if (auto it = res.candidate_probs.find(c.pair.nominative); it != res.candidate_probs.end()) {
    s.probability = it->second;
    s.unscorable = false;
  }
  if (opts.full_vocabulary) {
    if (res.top_k.empty()) throw BackendError("backend returned no top-k prediction for: " + c.prompt);
    s.predicted = res.top_k.front().first;
    return s;
  }
  double best = 0.0;
  for (const auto& cand : c.candidates) {
    auto it = res.candidate_probs.find(cand);
    if (it != res.candidate_probs.end() && it->second > best) {
      best = it->second;
      s.predicted = cand;
    }
  }
  return s;
}

}  // namespace detail

// Scores every case and aggregates per pronoun pair (pairs in first-seen
// order). Requests run concurrently; aggregation follows case order, so the
// result does not depend on scheduling.
//
//   accuracy         = #(predicted == nominative) / #cases
//   mean_probability = mean over all cases of P(nominative)
inline std::vector<ProbeResult> score_cases(const std::vector<ProbeCase>& cases, const ScoringBackend& backend,
                                            const ScoreOptions& opts = {}) {
  std::vector<CaseScore> scores(cases.size());
  util::parallel_for(cases.size(), opts.concurrency,
                     [&](std::size_t i) { scores[i] = detail::score_one(cases[i], backend, opts); });

  std::vector<ProbeResult> results;
  std::map<PronounPair, std::size_t> slot;
  std::vector<std::size_t> correct;
  std::vector<double> prob_sum;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& pair = cases[i].pair;
    auto [it, fresh] = slot.emplace(pair, results.size());
    if (fresh) {
      results.push_back(ProbeResult{pair, 0.0, 0.0, 0, 0, {}});
      correct.push_back(0);
      prob_sum.push_back(0.0);
    }
    auto& r = results[it->second];
    const auto& s = scores[i];
    if (s.predicted == pair.nominative) ++correct[it->second];
    prob_sum[it->second] += s.probability;
    if (s.unscorable) ++r.unscorable_count;
    r.per_case.push_back(s);
  }
  for (std::size_t k = 0; k < results.size(); ++k) {
    auto& r = results[k];
    r.case_count = r.per_case.size();
    r.accuracy = static_cast<double>(correct[k]) / static_cast<double>(r.case_count);
    r.mean_probability = prob_sum[k] / static_cast<double>(r.case_count);
  }
  return results;
}

struct OccupationProbeRow {
  std::string pronoun;
  std::map<std::string, double> group_scores;  // group -> mean P(pronoun)
  std::size_t unscorable_count = 0;
};

struct OccupationProbeOptions {
  std::vector<std::string> groups{"male", "female", "all"};
  std::size_t concurrency = 8;
};

// "[MASK] is a <occupation>." ("are" for they) scored for each pronoun and
// averaged over each occupation group.
inline std::string occupation_prompt(const std::string& pronoun, const std::string& occupation) {
  return std::string(kMaskSlot) + (pronoun == "they" ? " are a " : " is a ") + occupation + ".";
}

inline std::vector<OccupationProbeRow> occupation_probe(const WordSet& occupations,
                                                        const std::vector<std::string>& pronouns,
                                                        const ScoringBackend& backend,
                                                        const OccupationProbeOptions& opts = {}) {
  if (pronouns.empty()) throw InputError("occupation probe needs at least one pronoun");
  for (const auto& g : opts.groups)
    if (occupations.group(g).empty()) throw InputError("occupation group '" + g + "' is empty");

  // One request per (occupation, verb form), holding every pronoun that
  // takes that verb.
  std::vector<std::string> singular, plural;
  for (const auto& p : pronouns) (p == "they" ? plural : singular).push_back(p);
  struct Job {
    std::string occupation;
    std::vector<std::string> candidates;
  };
  std::vector<Job> jobs;
  for (const auto& occ : occupations.words())
    for (const auto* group : {&singular, &plural})
      if (!group->empty()) jobs.push_back({occ, *group});

  std::vector<service::ScoreResponse> responses(jobs.size());
  util::parallel_for(jobs.size(), opts.concurrency, [&](std::size_t i) {
    responses[i] = backend.score({occupation_prompt(jobs[i].candidates.front(), jobs[i].occupation),
                                  jobs[i].candidates, std::nullopt});
  });

  // prob[pronoun][occupation]
  std::map<std::string, std::map<std::string, double>> prob;
  std::map<std::string, std::size_t> unscorable;
  for (std::size_t i = 0; i < jobs.size(); ++i)
    for (const auto& p : jobs[i].candidates) {
      auto it = responses[i].candidate_probs.find(p);
      if (it == responses[i].candidate_probs.end()) {
        ++unscorable[p];
        prob[p][jobs[i].occupation] = 0.0;
      } else {
        prob[p][jobs[i].occupation] = it->second;
      }
    }

  std::vector<OccupationProbeRow> rows;
  for (const auto& p : pronouns) {
    OccupationProbeRow row{p, {}, unscorable[p]};
    for (const auto& g : opts.groups) {
      const auto& members = occupations.group(g);
      double sum = 0.0;
      for (const auto& occ : members) sum += prob[p].at(occ);
      row.group_scores[g] = sum / static_cast<double>(members.size());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace gaudit::probe
