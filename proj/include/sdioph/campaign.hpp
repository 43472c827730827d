#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdioph/search.hpp"

namespace sdioph {

enum class Variant { MAIN, RESIDUAL, CUSTOM };

// Which prime pairs a scan visits, in canonical (p, q) order. The presets
// encode the two published campaigns:
//   MAIN:     p = 3 mod 4, q = 1 mod 4, p < q < 52038*log p
//   RESIDUAL: p = 3 mod 4, q = 1 mod 4, p < q, 52038*log p <= q <= 700393,
//             searching only pairs with p^2 | q^(p-1)-1
// Both pin q to 1 mod 4: pairs with both primes 3 mod 4 are settled in
// earlier literature, and the known pair counts match only with q excluded
// from that class.
struct CampaignCriteria {
  Variant variant = Variant::CUSTOM;
  unsigned long p_min = 2, p_max = 700393;
  int p_mod4 = -1;  // -1 = any, else require p % 4 == value
  int q_mod4 = -1;
  bool q_below_threshold = false;  // q < 52038*log p
  bool q_above_threshold = false;  // q >= 52038*log p
  unsigned long q_min = 0, q_max = 700393;
  bool wieferich_filter = false;  // search only pairs with p^2 | q^(p-1)-1

  static CampaignCriteria main_scan();
  static CampaignCriteria residual_scan();
  std::string canonical_string() const;
  std::string hash_hex() const;  // FNV-1a 64 of canonical_string
};

// All primes <= limit, ascending (segmented sieve).
std::vector<uint32_t> sieve_primes(uint32_t limit);

// pi(x) on an ascending prime list.
uint64_t prime_count_upto(const std::vector<uint32_t>& primes, uint64_t x);

// floor(52038 * log p), certified. q < threshold <=> q <= floor, and
// q >= threshold <=> q > floor: the threshold is irrational, so an integer
// never sits on it.
uint64_t admission_threshold_floor(unsigned long p);

// Canonical pair enumeration: one row per admissible p holding the index
// range of its q's plus the running global pair index. q indices refer to
// qprimes, the prime list pre-filtered by the q_mod4 criterion.
struct PairTable {
  std::vector<uint32_t> primes;   // all primes up to the sieve limit
  std::vector<uint32_t> qprimes;  // q candidates (primes, q_mod4 applied)
  struct Row {
    uint32_t p;
    uint64_t start;       // global index of this p's first pair
    uint32_t q_lo, q_hi;  // half-open index range into qprimes
  };
  std::vector<Row> rows;
  uint64_t total = 0;
};

PairTable build_pair_table(const CampaignCriteria& criteria);

// Exact size of the enumeration (a scan's `seen`): per-p prefix-count
// differences, no inner loop over q. Ignores wieferich_filter, which acts
// at search time.
uint64_t count_pairs(const CampaignCriteria& criteria);

// Pairs an unsampled scan would actually search (`searched` at
// sample_every=1): count_pairs minus those the wieferich filter drops.
// One p^2-divisibility test per pair when the filter is set.
uint64_t count_searchable_pairs(const CampaignCriteria& criteria);

struct CampaignCounts {
  uint64_t seen = 0;        // size of the full enumeration
  uint64_t sampled = 0;     // of those, how many sample_every keeps
  uint64_t searched = 0;    // merged output records; 0 until a run completes
  uint64_t quadruples = 0;  // across all records
};

struct CampaignOptions {
  unsigned workers = 1;
  std::string checkpoint_path;  // empty: no checkpointing, no resume
  std::string output_path;      // merged JSONL results
  uint64_t sample_every = 1;    // search every k-th pair of the enumeration
  uint64_t block_size = 4096;   // pairs per work unit
  uint64_t max_blocks = 0;      // stop after this many fresh blocks (0 = all);
                                // lets tests simulate an interrupted run
  bool count_only = false;
  bool progress = false;        // occasional stderr progress lines
};

struct CampaignState {
  CampaignCriteria criteria;
  uint64_t cursor = 0;  // pairs fully processed, contiguous from index 0
  CampaignCounts counts;
  std::string output_path;
  bool complete = false;
};

// Streams the enumeration in blocks across a worker pool; each worker
// appends JSONL records to its own shard file; a resumable checkpoint
// tracks completed blocks; a final merge sorts, deduplicates, and writes
// output_path atomically.
CampaignState run_campaign(const CampaignCriteria& criteria,
                           const CampaignOptions& options);

}  // namespace sdioph
