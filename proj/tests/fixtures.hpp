#pragma once

#include "cfx/corpus.hpp"
#include "cfx/generation.hpp"
#include "cfx/metrics.hpp"
#include "cfx/pipeline.hpp"

namespace cfx::testing {

/// Explains `docs` against `model` with a mock generator over the corpus
/// lexicon; the n-gram scorer is fitted on the train split.
inline EvaluationReport explain_with_mock(const SyntheticCorpus& corpus, const LinearModel& model,
                                          const std::vector<Document>& docs, Method method, double flip_probability,
                                          std::uint64_t seed, std::size_t n = 5, std::size_t parallel = 1) {
  const MockGenerator gen(corpus.lexicon, flip_probability);
  const NGramScorer scorer(corpus.train);
  ExplainSettings s;
  s.method = method;
  s.n = n;
  s.seed = seed;
  s.max_parallel = parallel;
  ExplainContext ctx;
  ctx.classifier = &model;
  ctx.attribution_model = &model;
  ctx.background = &corpus.train;
  ctx.generator = &gen;
  ctx.shots = builtin_shots(Task::kSentiment);
  ctx.scorer = &scorer;
  return explain_corpus(s, ctx, docs);
}

}  // namespace cfx::testing
