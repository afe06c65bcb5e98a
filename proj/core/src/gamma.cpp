#include "propspan/gamma.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "propspan/errors.hpp"
#include "propspan/parallel.hpp"
#include "propspan/rng.hpp"

namespace propspan::gamma {

std::string_view to_string(Aggregate a) {
  switch (a) {
    case Aggregate::unit_weighted: return "unit_weighted";
    case Aggregate::unweighted: return "unweighted";
    case Aggregate::pooled_disorder: return "pooled_disorder";
  }
  return "";
}

std::optional<Aggregate> aggregate_from_string(std::string_view s) {
  for (auto a : {Aggregate::unit_weighted, Aggregate::unweighted,
                 Aggregate::pooled_disorder}) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

namespace {

void check_config(const GammaConfig& cfg) {
  if (cfg.alpha < 0 || cfg.beta < 0 || cfg.alpha + cfg.beta <= 0)
    throw DataError("gamma config: alpha and beta must be >= 0 with alpha+beta > 0");
  if (cfg.delta_empty <= 0)
    throw DataError("gamma config: delta_empty must be positive");
  if (cfg.n_samples < 1)
    throw DataError("gamma config: n_samples must be positive");
}

double pos_dissim(std::int64_t su, std::int64_t eu, std::int64_t sv,
                  std::int64_t ev, double delta_empty) {
  const double num = static_cast<double>(std::llabs(su - sv)) +
                     static_cast<double>(std::llabs(eu - ev));
  const double den = static_cast<double>((eu - su) + (ev - sv));
  const double ratio = num / den;
  return delta_empty * ratio * ratio;
}

// Compact internal unit: annotator slot, boundaries, technique index.
struct IUnit {
  int annotator;
  std::int64_t start;
  std::int64_t end;
  int tech;
};

double pair_cost(const IUnit& u, const IUnit& v, const GammaConfig& cfg) {
  const double dp = pos_dissim(u.start, u.end, v.start, v.end, cfg.delta_empty);
  const double dc = u.tech != v.tech ? cfg.delta_empty : 0.0;
  return cfg.alpha * dp + cfg.beta * dc;
}

constexpr int kMaxUnits = 256;

struct Mask {
  std::array<std::uint64_t, 4> w{};

  void set(int i) { w[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool intersects(const Mask& o) const {
    return (w[0] & o.w[0]) || (w[1] & o.w[1]) || (w[2] & o.w[2]) ||
           (w[3] & o.w[3]);
  }
  void merge(const Mask& o) {
    for (int k = 0; k < 4; ++k) w[k] |= o.w[k];
  }
  void remove(const Mask& o) {
    for (int k = 0; k < 4; ++k) w[k] &= ~o.w[k];
  }
  bool test(int i) const {
    return (w[i >> 6] >> (i & 63)) & 1;
  }
};

struct Candidate {
  Mask mask;
  std::vector<std::int32_t> slots;  // unit index per annotator, -1 empty
  std::vector<int> members;         // covered unit indices
  double cost = 0;
};

struct Problem {
  std::vector<IUnit> units;
  int n_annotators = 0;
  std::vector<Candidate> candidates;
  std::vector<std::vector<int>> unit_candidates;  // per unit, candidate ids
  std::vector<double> min_share;                  // per unit
};

// Enumerates all tuples (at most one unit per annotator, not all empty)
// whose mean pairwise cost stays within n_annotators * delta_empty.
void generate_candidates(Problem& prob, const GammaConfig& cfg) {
  const int c = prob.n_annotators;
  const double n_pairs = static_cast<double>(c) * (c - 1) / 2.0;
  const double cost_cap = c * cfg.delta_empty * n_pairs;  // un-normalized cap

  std::vector<std::vector<int>> by_annotator(c);
  for (int i = 0; i < static_cast<int>(prob.units.size()); ++i)
    by_annotator[prob.units[i].annotator].push_back(i);

  std::vector<std::int32_t> slots(c, -1);
  std::vector<int> members;

  // sum_filled = pairwise cost among chosen units so far; empty-involved
  // pairs are added in closed form at the end.
  auto emit = [&](double sum_filled) {
    const int filled = static_cast<int>(members.size());
    const double empty_pairs = n_pairs - static_cast<double>(filled) *
                                             (filled - 1) / 2.0;
    const double total = sum_filled + empty_pairs * cfg.delta_empty;
    if (total > cost_cap + 1e-12) return;
    Candidate cand;
    cand.slots = slots;
    cand.members = members;
    cand.cost = total / n_pairs;
    for (int m : members) cand.mask.set(m);
    prob.candidates.push_back(std::move(cand));
  };

  // Depth-first product over annotators: each contributes one unit or none.
  auto rec = [&](auto&& self, int annotator, double sum_filled) -> void {
    if (annotator == c) {
      if (!members.empty()) emit(sum_filled);
      return;
    }
    self(self, annotator + 1, sum_filled);  // empty slot
    for (int ui : by_annotator[annotator]) {
      double add = 0;
      for (int mj : members) add += pair_cost(prob.units[ui], prob.units[mj], cfg);
      if (sum_filled + add > cost_cap + 1e-12) continue;  // cost only grows
      slots[annotator] = ui;
      members.push_back(ui);
      self(self, annotator + 1, sum_filled + add);
      members.pop_back();
      slots[annotator] = -1;
    }
  };
  rec(rec, 0, 0.0);

  prob.unit_candidates.assign(prob.units.size(), {});
  prob.min_share.assign(prob.units.size(),
                        std::numeric_limits<double>::infinity());
  for (int ci = 0; ci < static_cast<int>(prob.candidates.size()); ++ci) {
    const Candidate& cand = prob.candidates[ci];
    const double share = cand.cost / static_cast<double>(cand.members.size());
    for (int u : cand.members) {
      prob.unit_candidates[u].push_back(ci);
      prob.min_share[u] = std::min(prob.min_share[u], share);
    }
  }
  // Cheapest-first exploration finds tight upper bounds early.
  for (auto& list : prob.unit_candidates) {
    std::sort(list.begin(), list.end(), [&](int a, int b) {
      if (prob.candidates[a].cost != prob.candidates[b].cost)
        return prob.candidates[a].cost < prob.candidates[b].cost;
      return a < b;
    });
  }
}

struct SearchState {
  const Problem* prob;
  Mask covered;
  std::vector<int> chosen;
  std::vector<int> best_chosen;
  double best_cost = std::numeric_limits<double>::infinity();
  int n_units = 0;

  void run(int first_uncovered, double cost_so_far, double lb_rest) {
    if (cost_so_far + lb_rest >= best_cost) return;
    int u = first_uncovered;
    while (u < n_units && covered.test(u)) ++u;
    if (u == n_units) {
      best_cost = cost_so_far;
      best_chosen = chosen;
      return;
    }
    for (int ci : prob->unit_candidates[u]) {
      const Candidate& cand = prob->candidates[ci];
      if (cand.mask.intersects(covered)) continue;
      double lb_delta = 0;
      for (int m : cand.members) lb_delta += prob->min_share[m];
      covered.merge(cand.mask);
      chosen.push_back(ci);
      run(u + 1, cost_so_far + cand.cost, lb_rest - lb_delta);
      chosen.pop_back();
      covered.remove(cand.mask);
    }
  }
};

Problem build_problem(const Continuum& c, const GammaConfig& cfg) {
  if (c.annotators.size() < 2)
    throw DataError("gamma requires at least 2 annotators, continuum \"" +
                    c.paragraph_id + "\" has " +
                    std::to_string(c.annotators.size()));
  if (c.units.size() > kMaxUnits)
    throw DataError("continuum \"" + c.paragraph_id + "\" has " +
                    std::to_string(c.units.size()) + " units; limit is " +
                    std::to_string(kMaxUnits));
  std::map<std::string, int, std::less<>> slot;
  for (std::size_t i = 0; i < c.annotators.size(); ++i) {
    if (!slot.emplace(c.annotators[i], static_cast<int>(i)).second)
      throw DataError("duplicate annotator id on continuum: " + c.annotators[i]);
  }
  Problem prob;
  prob.n_annotators = static_cast<int>(c.annotators.size());
  prob.units.reserve(c.units.size());
  for (const auto& unit : c.units) {
    auto it = slot.find(unit.annotator_id);
    if (it == slot.end())
      throw DataError("unit annotator \"" + unit.annotator_id +
                      "\" not in continuum annotator list");
    prob.units.push_back({it->second, unit.span.start, unit.span.end,
                          unit.span.technique.index()});
  }
  generate_candidates(prob, cfg);
  return prob;
}

Alignment solve(const Continuum& c, const GammaConfig& cfg) {
  Alignment result;
  if (c.units.empty()) return result;

  Problem prob = build_problem(c, cfg);
  SearchState search;
  search.prob = &prob;
  search.n_units = static_cast<int>(prob.units.size());
  double lb_total = 0;
  for (double s : prob.min_share) lb_total += s;
  // All units in singleton tuples is always feasible.
  search.best_cost =
      static_cast<double>(prob.units.size()) * cfg.delta_empty + 1e-9;
  search.run(0, 0.0, lb_total);

  double total = 0;
  for (int ci : search.best_chosen) {
    const Candidate& cand = prob.candidates[ci];
    result.tuples.push_back({cand.slots, cand.cost});
    total += cand.cost;
  }
  const double avg_units = static_cast<double>(c.units.size()) /
                           static_cast<double>(c.annotators.size());
  result.disorder = total / avg_units;
  return result;
}

Continuum resample(const Continuum& c, const GammaConfig& cfg,
                   std::uint64_t sample_index) {
  std::mt19937_64 gen(
      rng::derive_seed(cfg.seed, c.paragraph_id, sample_index));
  const std::uint64_t n_ann = c.annotators.size();
  const std::int64_t length = c.text_length;

  std::vector<std::vector<const Unit*>> by_annotator(n_ann);
  for (const auto& unit : c.units) {
    for (std::size_t a = 0; a < n_ann; ++a) {
      if (c.annotators[a] == unit.annotator_id) {
        by_annotator[a].push_back(&unit);
        break;
      }
    }
  }

  Continuum out;
  out.paragraph_id = c.paragraph_id;
  out.text_length = length;
  out.annotators = c.annotators;
  for (std::size_t a = 0; a < n_ann; ++a) {
    const auto& source = by_annotator[rng::uniform_below(gen, n_ann)];
    for (const Unit* unit : source) {
      const std::int64_t len = unit->span.length();
      std::int64_t shifted_start = -1;
      for (int attempt = 0; attempt < 100; ++attempt) {
        const std::int64_t shift = static_cast<std::int64_t>(
            rng::uniform_below(gen, static_cast<std::uint64_t>(length)));
        const std::int64_t s = (unit->span.start + shift) % length;
        if (s + len <= length) {
          shifted_start = s;
          break;
        }
      }
      if (shifted_start < 0) shifted_start = length - len;  // clamp at the end
      LabeledSpan span;
      span.technique = unit->span.technique;
      span.start = shifted_start;
      span.end = shifted_start + len;
      out.units.push_back({c.annotators[a], std::move(span)});
    }
  }
  return out;
}

}  // namespace

double positional_dissimilarity(const Unit& u, const Unit& v,
                                const GammaConfig& cfg) {
  return pos_dissim(u.span.start, u.span.end, v.span.start, v.span.end,
                    cfg.delta_empty);
}

double unit_dissimilarity(const Unit& u, const Unit& v, const GammaConfig& cfg) {
  const double dc =
      u.span.technique != v.span.technique ? cfg.delta_empty : 0.0;
  return cfg.alpha * positional_dissimilarity(u, v, cfg) + cfg.beta * dc;
}

Alignment best_alignment(const Continuum& c, const GammaConfig& cfg) {
  check_config(cfg);
  if (c.annotators.size() < 2)
    throw DataError("gamma requires at least 2 annotators");
  return solve(c, cfg);
}

double expected_disorder(const Continuum& c, const GammaConfig& cfg,
                         unsigned threads) {
  check_config(cfg);
  if (c.units.empty()) return 0.0;
  std::vector<double> disorders(static_cast<std::size_t>(cfg.n_samples), 0.0);
  parallel_for(disorders.size(), threads, [&](std::size_t i) {
    disorders[i] = solve(resample(c, cfg, i), cfg).disorder;
  });
  double sum = 0;
  for (double d : disorders) sum += d;  // fixed order, schedule-independent
  return sum / static_cast<double>(cfg.n_samples);
}

GammaResult compute_gamma(const Continuum& c, const GammaConfig& cfg,
                          unsigned threads) {
  check_config(cfg);
  GammaResult result;
  result.observed_disorder = best_alignment(c, cfg).disorder;
  result.expected_disorder = expected_disorder(c, cfg, threads);
  result.n_samples_used = cfg.n_samples;
  if (result.expected_disorder > 0) {
    result.gamma = 1.0 - result.observed_disorder / result.expected_disorder;
  } else if (result.observed_disorder == 0) {
    result.gamma = 1.0;
  } else {
    throw DataError("degenerate continuum \"" + c.paragraph_id +
                    "\": expected disorder 0 with observed disorder > 0");
  }
  return result;
}

Continuum make_continuum(const std::vector<AnnotationSet>& sets,
                         const Corpus& corpus, std::string_view paragraph_id,
                         std::size_t* skipped_invalid) {
  const Paragraph& p = corpus.at(paragraph_id);
  Continuum c;
  c.paragraph_id = p.id;
  c.text_length = p.scalar_length();
  for (const auto& set : sets) {
    c.annotators.push_back(set.annotator_id);
    if (const auto* spans = set.spans_for(paragraph_id)) {
      for (const auto& span : *spans) {
        if (span.start < 0 || span.end <= span.start ||
            span.end > c.text_length) {
          if (skipped_invalid) ++*skipped_invalid;
          continue;
        }
        c.units.push_back({set.annotator_id, span});
      }
    }
  }
  return c;
}

CorpusGammaResult corpus_gamma(const std::vector<AnnotationSet>& sets,
                               const Corpus& corpus, const GammaConfig& cfg,
                               unsigned threads) {
  check_config(cfg);
  CorpusGammaResult result;

  std::vector<Continuum> continua;
  for (const auto& pid : corpus.sorted_ids()) {
    Continuum c =
        make_continuum(sets, corpus, pid, &result.skipped_invalid_spans);
    if (c.units.empty()) {
      ++result.skipped_empty_paragraphs;
      continue;
    }
    continua.push_back(std::move(c));
  }

  result.per_paragraph.resize(continua.size());
  parallel_for(continua.size(), threads, [&](std::size_t i) {
    const Continuum& c = continua[i];
    GammaResult g = compute_gamma(c, cfg, 1);
    result.per_paragraph[i] = {c.paragraph_id, g.gamma, g.observed_disorder,
                               g.expected_disorder, c.units.size()};
  });

  double weighted_gamma = 0, weight_sum = 0, gamma_sum = 0;
  double weighted_obs = 0, weighted_exp = 0;
  double pooled_obs = 0, pooled_exp = 0;
  for (const auto& pg : result.per_paragraph) {
    const double w = static_cast<double>(pg.unit_count);
    weighted_gamma += w * pg.gamma;
    weighted_obs += w * pg.observed_disorder;
    weighted_exp += w * pg.expected_disorder;
    weight_sum += w;
    gamma_sum += pg.gamma;
    pooled_obs += pg.observed_disorder;
    pooled_exp += pg.expected_disorder;
  }

  GammaResult& corpus_result = result.corpus;
  corpus_result.n_samples_used = cfg.n_samples;
  if (result.per_paragraph.empty()) {
    corpus_result.gamma = 1.0;  // nothing annotated anywhere
    return result;
  }
  switch (cfg.aggregate) {
    case Aggregate::unit_weighted:
      corpus_result.gamma = weighted_gamma / weight_sum;
      corpus_result.observed_disorder = weighted_obs / weight_sum;
      corpus_result.expected_disorder = weighted_exp / weight_sum;
      break;
    case Aggregate::unweighted:
      corpus_result.gamma =
          gamma_sum / static_cast<double>(result.per_paragraph.size());
      corpus_result.observed_disorder =
          pooled_obs / static_cast<double>(result.per_paragraph.size());
      corpus_result.expected_disorder =
          pooled_exp / static_cast<double>(result.per_paragraph.size());
      break;
    case Aggregate::pooled_disorder:
      corpus_result.observed_disorder = pooled_obs;
      corpus_result.expected_disorder = pooled_exp;
      if (pooled_exp > 0) {
        corpus_result.gamma = 1.0 - pooled_obs / pooled_exp;
      } else if (pooled_obs == 0) {
        corpus_result.gamma = 1.0;
      } else {
        throw DataError("pooled expected disorder is 0 with observed > 0");
      }
      break;
  }
  return result;
}

std::map<Technique, GammaResult> per_technique_gamma(
    const std::vector<AnnotationSet>& sets, const Corpus& corpus,
    const GammaConfig& cfg, unsigned threads) {
  check_config(cfg);
  std::map<Technique, GammaResult> out;
  for (Technique tech : Technique::all()) {
    std::vector<AnnotationSet> restricted;
    restricted.reserve(sets.size());
    std::size_t n_units = 0;
    for (const auto& set : sets) {
      AnnotationSet r;
      r.annotator_id = set.annotator_id;
      r.kind = set.kind;
      for (const auto& [pid, spans] : set.spans) {
        std::vector<LabeledSpan> kept;
        for (const auto& s : spans) {
          if (s.technique == tech) kept.push_back(s);
        }
        if (!kept.empty()) {
          n_units += kept.size();
          r.spans.emplace(pid, std::move(kept));
        }
      }
      restricted.push_back(std::move(r));
    }
    if (n_units == 0) continue;
    out.emplace(tech, corpus_gamma(restricted, corpus, cfg, threads).corpus);
  }
  return out;
}

}  // namespace propspan::gamma
