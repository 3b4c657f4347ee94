#pragma once

#include <string>
#include <vector>

#include "pmtop/report.hpp"
#include "pmtop/sampling.hpp"

namespace pmtop::detail {

/// Split `total` samples into kChunks, give each chunk its own RNG stream
/// derived from (budget seed, tag, chunk) and merge the chunk reports in
/// chunk order. fn(report, rng, begin, end) handles global indices
/// [begin, end).
template <class Fn>
CheckReport run_chunked(const std::string& name, const SampleBudget& budget, const char* tag,
                        std::size_t total, Fn&& fn) {
  std::vector<CheckReport> chunks(kChunks);
  parallel_chunks(kChunks, [&](std::size_t c) {
    Rng rng = make_rng(budget.rng_seed, stream_id(tag, c));
    chunks[c] = CheckReport(name, budget.rng_seed);
    fn(chunks[c], rng, chunk_begin(total, c), chunk_begin(total, c + 1));
  });
  CheckReport out(name, budget.rng_seed);
  for (const auto& ch : chunks) out.merge(ch);
  return out;
}

}  // namespace pmtop::detail
