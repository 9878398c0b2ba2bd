// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "cacaobpmn/bpmn/codec.hpp"
#include "cacaobpmn/cacao/codec.hpp"
#include "cacaobpmn/layout/layout.hpp"
#include "cacaobpmn/mapping/forward.hpp"
#include "cacaobpmn/mapping/reverse.hpp"
#include "playbook_generator.hpp"

namespace {

using namespace cacaobpmn;

std::vector<cacao::Playbook> corpus(std::size_t count) {
  testing::PlaybookGenerator generator(8421);
  std::vector<cacao::Playbook> playbooks;
  playbooks.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    playbooks.push_back(generator.generate());
  return playbooks;
}

void BM_ParsePlaybook(benchmark::State& state) {
  std::vector<std::string> documents;
  for (const cacao::Playbook& pb : corpus(16))
    documents.push_back(cacao::serialize_playbook(pb));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cacao::parse_playbook(documents[i++ % documents.size()]));
  }
}
BENCHMARK(BM_ParsePlaybook);

void BM_ForwardMap(benchmark::State& state) {
  std::vector<cacao::Playbook> playbooks = corpus(16);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        mapping::map_to_bpmn(playbooks[i++ % playbooks.size()]));
  }
}
BENCHMARK(BM_ForwardMap);

void BM_SerializeBpmn(benchmark::State& state) {
  std::vector<bpmn::Definitions> models;
  for (const cacao::Playbook& pb : corpus(16)) {
    bpmn::Definitions defs = mapping::map_to_bpmn(pb);
    layout::attach_diagram(defs);
    models.push_back(std::move(defs));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        bpmn::serialize_definitions(models[i++ % models.size()]));
  }
}
BENCHMARK(BM_SerializeBpmn);

void BM_AttachDiagram(benchmark::State& state) {
  std::vector<bpmn::Definitions> models;
  for (const cacao::Playbook& pb : corpus(16))
    models.push_back(mapping::map_to_bpmn(pb));
  std::size_t i = 0;
  for (auto _ : state) {
    bpmn::Definitions defs = models[i++ % models.size()];
    layout::attach_diagram(defs);
    benchmark::DoNotOptimize(defs);
  }
}
BENCHMARK(BM_AttachDiagram);

void BM_RoundTrip(benchmark::State& state) {
  std::vector<cacao::Playbook> playbooks = corpus(16);
  std::size_t i = 0;
  for (auto _ : state) {
    const cacao::Playbook& pb = playbooks[i++ % playbooks.size()];
    bpmn::Definitions defs = mapping::map_to_bpmn(pb);
    benchmark::DoNotOptimize(mapping::map_to_cacao(defs));
  }
}
BENCHMARK(BM_RoundTrip);

}  // namespace

BENCHMARK_MAIN();
