#include "sdioph/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "sdioph/wieferich.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace sdioph {

CampaignCriteria CampaignCriteria::main_scan() {
  CampaignCriteria c;
  c.variant = Variant::MAIN;
  c.p_mod4 = 3;
  c.q_mod4 = 1;
  c.q_below_threshold = true;
  return c;
}

CampaignCriteria CampaignCriteria::residual_scan() {
  CampaignCriteria c;
  c.variant = Variant::RESIDUAL;
  c.p_mod4 = 3;
  c.q_mod4 = 1;
  c.q_above_threshold = true;
  c.wieferich_filter = true;
  return c;
}

std::string CampaignCriteria::canonical_string() const {
  const char* v = variant == Variant::MAIN       ? "main"
                  : variant == Variant::RESIDUAL ? "residual"
                                                 : "custom";
  std::ostringstream os;
  os << "v=" << v << ";p=[" << p_min << "," << p_max << "];pmod4=" << p_mod4
     << ";qmod4=" << q_mod4 << ";qbelow=" << q_below_threshold
     << ";qabove=" << q_above_threshold << ";q=[" << q_min << "," << q_max
     << "];wf=" << wieferich_filter;
  return os.str();
}

static std::string fnv1a_hex(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

std::string CampaignCriteria::hash_hex() const {
  return fnv1a_hex(canonical_string());
}

std::vector<uint32_t> sieve_primes(uint32_t limit) {
  std::vector<uint32_t> primes;
  if (limit < 2) return primes;
  uint32_t root = (uint32_t)std::sqrt((double)limit);
  while ((uint64_t)(root + 1) * (root + 1) <= limit) ++root;
  while ((uint64_t)root * root > limit) --root;

  std::vector<uint8_t> base(root + 1, 1);
  std::vector<uint32_t> base_primes;
  for (uint32_t i = 2; i <= root; ++i) {
    if (!base[i]) continue;
    base_primes.push_back(i);
    for (uint64_t m = (uint64_t)i * i; m <= root; m += i) base[m] = 0;
  }

  const uint32_t seg = 1u << 20;
  std::vector<uint8_t> mark;
  for (uint64_t lo = 2; lo <= limit; lo += seg) {
    uint64_t hi = std::min<uint64_t>(lo + seg, (uint64_t)limit + 1);
    mark.assign(hi - lo, 1);
    for (uint32_t bp : base_primes) {
      uint64_t start = std::max<uint64_t>((uint64_t)bp * bp,
                                          (lo + bp - 1) / bp * bp);
      for (uint64_t m = start; m < hi; m += bp) mark[m - lo] = 0;
    }
    for (uint64_t i = lo; i < hi; ++i)
      if (mark[i - lo]) primes.push_back((uint32_t)i);
  }
  return primes;
}

uint64_t prime_count_upto(const std::vector<uint32_t>& primes, uint64_t x) {
  if (x > 0xffffffffull) return primes.size();
  return std::upper_bound(primes.begin(), primes.end(), (uint32_t)x) -
         primes.begin();
}

uint64_t admission_threshold_floor(unsigned long p) {
  if (p < 2) throw std::invalid_argument("threshold needs p >= 2");
  mpz_class f = certified_floor([&](mpfr_prec_t prec) {
    return HPReal::log_of(mpz_class(p), prec).mul_ui(52038);
  });
  return f.get_ui();
}

PairTable build_pair_table(const CampaignCriteria& c) {
  if (c.p_min < 2) throw std::invalid_argument("p_min must be >= 2");
  if (c.p_max < c.p_min) throw std::invalid_argument("empty p range");
  if (c.q_max > 0x7fffffffull)
    throw std::invalid_argument("q_max exceeds the sieve range");
  if (c.q_below_threshold && c.q_above_threshold)
    throw std::invalid_argument("q cannot be on both sides of the threshold");

  PairTable t;
  uint32_t limit = (uint32_t)std::max<unsigned long>(c.p_max, c.q_max);
  t.primes = sieve_primes(limit);
  if (c.q_mod4 >= 0) {
    for (uint32_t pr : t.primes)
      if ((int)(pr % 4) == c.q_mod4) t.qprimes.push_back(pr);
  } else {
    t.qprimes = t.primes;
  }

  const uint64_t cap = prime_count_upto(t.qprimes, c.q_max);
  for (uint32_t p : t.primes) {
    if (p < c.p_min) continue;
    if (p > c.p_max) break;
    if (c.p_mod4 >= 0 && (int)(p % 4) != c.p_mod4) continue;
    uint64_t lo = prime_count_upto(t.qprimes, p);  // first q > p
    uint64_t hi = cap;
    if (c.q_min > 0)
      lo = std::max<uint64_t>(
          lo, std::lower_bound(t.qprimes.begin(), t.qprimes.end(), c.q_min) -
                  t.qprimes.begin());
    if (c.q_below_threshold || c.q_above_threshold) {
      uint64_t f = admission_threshold_floor(p);
      if (c.q_below_threshold)
        hi = std::min(hi, prime_count_upto(t.qprimes, f));  // q <= floor
      else
        lo = std::max(lo, prime_count_upto(t.qprimes, f));  // q > floor
    }
    if (lo < hi) {
      t.rows.push_back({p, t.total, (uint32_t)lo, (uint32_t)hi});
      t.total += hi - lo;
    }
  }
  return t;
}

uint64_t count_pairs(const CampaignCriteria& criteria) {
  return build_pair_table(criteria).total;
}

uint64_t count_searchable_pairs(const CampaignCriteria& criteria) {
  PairTable t = build_pair_table(criteria);
  if (!criteria.wieferich_filter) return t.total;
  // The filter is not arithmetic; count by testing each pair directly.
  uint64_t n = 0;
  for (const PairTable::Row& row : t.rows)
    for (uint32_t i = row.q_lo; i < row.q_hi; ++i)
      if (p_square_divides(row.p, t.qprimes[i])) ++n;
  return n;
}

namespace {

// Appends records to one worker's shard file. Opened lazily so idle workers
// leave no file behind; every record is written with a leading newline so a
// torn tail from a killed run cannot swallow the next record appended to it.
class ShardWriter {
 public:
  explicit ShardWriter(std::string path) : path_(std::move(path)) {}
  void write_line(const std::string& line) {
    if (!out_.is_open()) {
      out_.open(path_, std::ios::app);
      if (!out_) throw std::runtime_error("cannot open shard file: " + path_);
    }
    out_ << '\n' << line;
    if (!out_) throw std::runtime_error("write failed: " + path_);
  }
  void flush() {
    if (out_.is_open() && !out_.flush())
      throw std::runtime_error("flush failed: " + path_);
  }

 private:
  std::string path_;
  std::ofstream out_;
};

void atomic_write(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream o(tmp, std::ios::trunc);
    if (!o) throw std::runtime_error("cannot write: " + tmp);
    o << content;
    if (!o.flush()) throw std::runtime_error("write failed: " + tmp);
  }
  fs::rename(tmp, path);
}

void write_checkpoint(const std::string& path, const std::string& hash,
                      uint64_t cursor_block, const std::set<uint64_t>& done) {
  ordered_json j;
  j["version"] = 1;
  j["criteria_hash"] = hash;
  j["cursor_block"] = cursor_block;
  j["blocks_done"] = std::vector<uint64_t>(done.begin(), done.end());
  atomic_write(path, j.dump() + "\n");
}

std::vector<fs::path> shard_files(const std::string& output_path) {
  fs::path out(output_path);
  fs::path dir = out.parent_path().empty() ? fs::path(".") : out.parent_path();
  std::string prefix = out.filename().string() + ".shard";
  std::vector<fs::path> v;
  if (!fs::is_directory(dir)) return v;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string name = e.path().filename().string();
    if (name.rfind(prefix, 0) == 0 &&
        name.substr(name.size() - 4) != ".tmp")
      v.push_back(e.path());
  }
  std::sort(v.begin(), v.end());
  return v;
}

struct MergedCounts {
  uint64_t records = 0;
  uint64_t quadruples = 0;
};

struct Rec {
  uint64_t p, q, nquads;
  std::string line;
};

void scan_jsonl(const fs::path& f, std::vector<Rec>& recs) {
  std::ifstream in(f);
  if (!in) throw std::runtime_error("cannot read: " + f.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object() || !j.contains("p") ||
        !j.contains("q"))
      continue;  // torn tail from an interrupted run
    recs.push_back({j["p"].get<uint64_t>(), j["q"].get<uint64_t>(),
                    j.contains("quadruples") ? j["quadruples"].size() : 0,
                    line});
  }
}

// Sort all shard records by (p, q), drop duplicates from re-run blocks,
// publish atomically, then remove the shards.
MergedCounts merge_shards(const std::string& output_path,
                          const std::vector<fs::path>& files) {
  std::vector<Rec> recs;
  for (const fs::path& f : files) scan_jsonl(f, recs);
  std::sort(recs.begin(), recs.end(), [](const Rec& a, const Rec& b) {
    return std::tie(a.p, a.q, a.line) < std::tie(b.p, b.q, b.line);
  });
  recs.erase(std::unique(recs.begin(), recs.end(),
                         [](const Rec& a, const Rec& b) {
                           return a.p == b.p && a.q == b.q;
                         }),
             recs.end());
  std::string body;
  MergedCounts m;
  for (const Rec& r : recs) {
    body += r.line;
    body += '\n';
    ++m.records;
    m.quadruples += r.nquads;
  }
  atomic_write(output_path, body);
  for (const fs::path& f : files) fs::remove(f);
  return m;
}

MergedCounts counts_from_output(const std::string& output_path) {
  std::vector<Rec> recs;
  scan_jsonl(output_path, recs);
  MergedCounts m{recs.size(), 0};
  for (const Rec& r : recs) m.quadruples += r.nquads;
  return m;
}

std::string record_line(unsigned long p, unsigned long q,
                        const SearchReport& rep) {
  ordered_json j;
  j["p"] = p;
  j["q"] = q;
  j["u_p"] = rep.wieferich.u_p;
  j["u_q"] = rep.wieferich.u_q;
  j["triples_count"] = rep.triples_count;
  auto quads = ordered_json::array();
  for (const STuple& t : rep.quadruples) {
    auto arr = ordered_json::array();
    for (const mpz_class& e : t.entries) arr.push_back(e.get_str());
    quads.push_back(arr);
  }
  j["quadruples"] = quads;
  j["c0"] = rep.bounds.C0;
  j["c_final"] = rep.bounds.C;
  j["c1"] = rep.bounds.C1;
  j["delta"] = rep.bounds.delta;
  j["millis"] = rep.millis;
  return j.dump();
}

size_t row_for(const PairTable& t, uint64_t idx) {
  auto it = std::upper_bound(
      t.rows.begin(), t.rows.end(), idx,
      [](uint64_t v, const PairTable::Row& r) { return v < r.start; });
  return (it - t.rows.begin()) - 1;
}

}  // namespace

CampaignState run_campaign(const CampaignCriteria& criteria,
                           const CampaignOptions& opt) {
  if (opt.sample_every == 0)
    throw std::invalid_argument("sample_every must be >= 1");
  if (opt.block_size == 0) throw std::invalid_argument("block_size must be >= 1");
  if (!opt.count_only && opt.output_path.empty())
    throw std::invalid_argument("output path required unless count-only");

  const PairTable table = build_pair_table(criteria);
  CampaignState st{criteria};
  st.output_path = opt.output_path;
  st.counts.seen = table.total;

  if (opt.count_only) {
    st.cursor = table.total;
    st.complete = true;
    return st;
  }

  const uint64_t bs = opt.block_size;
  const uint64_t k = opt.sample_every;
  const uint64_t nblocks = (table.total + bs - 1) / bs;
  st.counts.sampled = table.total ? (table.total - 1) / k + 1 : 0;

  // Work identity: resuming with a different block size or sampling stride
  // would remap indices, so they are part of the checkpoint hash.
  std::ostringstream rh;
  rh << criteria.canonical_string() << ";bs=" << bs << ";k=" << k;
  const std::string run_hash = fnv1a_hex(rh.str());

  uint64_t cursor_block = 0;
  std::set<uint64_t> done;  // completed blocks >= cursor_block
  if (!opt.checkpoint_path.empty() && fs::exists(opt.checkpoint_path)) {
    std::ifstream in(opt.checkpoint_path);
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object() || j.value("version", 0) != 1)
      throw std::runtime_error("unreadable checkpoint: " + opt.checkpoint_path);
    if (j.value("criteria_hash", "") != run_hash)
      throw std::runtime_error(
          "checkpoint belongs to a different campaign; refusing to resume");
    cursor_block = j["cursor_block"].get<uint64_t>();
    for (uint64_t b : j["blocks_done"]) done.insert(b);
  }

  std::atomic<uint64_t> next{cursor_block};
  std::atomic<uint64_t> fresh{0};
  std::atomic<uint64_t> g_searched{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::exception_ptr err;
  uint64_t completed = 0;

  auto process_block = [&](uint64_t b, ShardWriter& shard) {
    uint64_t lo = b * bs;
    uint64_t hi = std::min(table.total, lo + bs);
    uint64_t idx = (lo + k - 1) / k * k;  // first sampled index in the block
    if (idx >= hi) return;
    size_t r = row_for(table, idx);
    for (; idx < hi; idx += k) {
      while (idx >=
             table.rows[r].start + (table.rows[r].q_hi - table.rows[r].q_lo))
        ++r;
      const PairTable::Row& row = table.rows[r];
      unsigned long p = row.p;
      unsigned long q = table.qprimes[row.q_lo + (uint32_t)(idx - row.start)];
      if (criteria.wieferich_filter && !p_square_divides(p, q)) continue;
      SearchReport rep = search_pair(PrimePair(p, q));
      g_searched.fetch_add(1, std::memory_order_relaxed);
      shard.write_line(record_line(p, q, rep));
    }
  };

  auto worker = [&](unsigned wid) {
    ShardWriter shard(opt.output_path + ".shard" + std::to_string(wid));
    try {
      for (;;) {
        if (stop.load(std::memory_order_relaxed)) break;
        uint64_t b = next.fetch_add(1);
        if (b >= nblocks) break;
        {
          std::lock_guard<std::mutex> g(mu);
          if (done.count(b)) continue;  // finished in a previous run
        }
        if (opt.max_blocks && fresh.fetch_add(1) >= opt.max_blocks) break;
        process_block(b, shard);
        shard.flush();  // durable before the checkpoint can cover this block
        std::lock_guard<std::mutex> g(mu);
        done.insert(b);
        while (done.erase(cursor_block)) ++cursor_block;
        ++completed;
        if (!opt.checkpoint_path.empty())
          write_checkpoint(opt.checkpoint_path, run_hash, cursor_block, done);
        if (opt.progress && (completed % 64 == 0 || cursor_block == nblocks))
          std::fprintf(stderr, "campaign: %llu/%llu blocks, %llu searched\n",
                       (unsigned long long)cursor_block,
                       (unsigned long long)nblocks,
                       (unsigned long long)g_searched.load());
      }
    } catch (...) {
      std::lock_guard<std::mutex> g(mu);
      if (!err) err = std::current_exception();
      stop.store(true);
    }
  };

  unsigned nw = std::max(1u, opt.workers);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (unsigned w = 0; w < nw; ++w) pool.emplace_back(worker, w);
  for (std::thread& th : pool) th.join();
  if (err) std::rethrow_exception(err);

  st.complete = cursor_block >= nblocks;
  st.cursor = std::min(cursor_block * bs, table.total);

  if (st.complete) {
    MergedCounts m;
    std::vector<fs::path> files = shard_files(opt.output_path);
    if (!files.empty())
      m = merge_shards(opt.output_path, files);
    else if (fs::exists(opt.output_path))
      m = counts_from_output(opt.output_path);
    else
      atomic_write(opt.output_path, "");  // complete with nothing searched
    st.counts.searched = m.records;
    st.counts.quadruples = m.quadruples;
  }
  return st;
}

}  // namespace sdioph
