#include <benchmark/benchmark.h>

#include <string>

#include "denguecast/ingest/lac.hpp"
#include "denguecast/ingest/text.hpp"
#include "denguecast/stats.hpp"

using namespace denguecast;
using namespace denguecast::ingest;

static void BM_Normalize(benchmark::State& state) {
  const TokenSet stop{"com", "de", "a", "o", "estou"};
  const std::string text = "Estou com DENGUE de novo, febre alta e dor no corpo http://t.co/abc São Paulo";
  for (auto _ : state) benchmark::DoNotOptimize(normalize_text(text, stop));
}
BENCHMARK(BM_Normalize);

static void BM_LacClassify(benchmark::State& state) {
  stats::Rng rng(7);
  std::vector<LabeledDoc> docs;
  for (int d = 0; d < state.range(0); ++d) {
    LabeledDoc doc;
    for (int i = 0; i < 12; ++i) doc.tokens.insert("w" + std::to_string(static_cast<int>(rng.uniform() * 400)));
    doc.label = kCategories[static_cast<std::size_t>(rng.uniform() * 5)];
    docs.push_back(std::move(doc));
  }
  LacClassifier clf(std::move(docs));
  TokenSet query;
  for (int i = 0; i < 15; ++i) query.insert("w" + std::to_string(static_cast<int>(rng.uniform() * 400)));
  for (auto _ : state) benchmark::DoNotOptimize(clf.classify(query));
}
BENCHMARK(BM_LacClassify)->Arg(200)->Arg(2142);
