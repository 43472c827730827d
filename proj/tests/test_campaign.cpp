#include <doctest.h>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sdioph/campaign.hpp"
#include "sdioph/wieferich.hpp"

using namespace sdioph;
namespace fs = std::filesystem;

namespace {

fs::path test_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "sdioph_campaign_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<nlohmann::ordered_json> parse_records(const fs::path& p) {
  std::vector<nlohmann::ordered_json> recs;
  std::ifstream in(p);
  REQUIRE(in.good());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    recs.push_back(nlohmann::ordered_json::parse(line));
  }
  return recs;
}

// record fields minus the timing, for run-to-run comparison
std::vector<std::string> stable_records(const fs::path& p) {
  std::vector<std::string> out;
  for (auto& j : parse_records(p)) {
    j.erase("millis");
    out.push_back(j.dump());
  }
  return out;
}

// small but non-trivial scan: 8 admissible p, 428 pairs, every pair valid
// for the default starting bound since p = 3 mod 4
CampaignCriteria small_criteria() {
  CampaignCriteria c;
  c.p_min = 3;
  c.p_max = 50;
  c.p_mod4 = 3;
  c.q_max = 300;
  return c;
}

}  // namespace

TEST_CASE("prime sieve fixtures") {
  CHECK(sieve_primes(10) == std::vector<uint32_t>{2, 3, 5, 7});
  CHECK(sieve_primes(100).size() == 25);
  CHECK(sieve_primes(1).empty());
  CHECK(sieve_primes(2) == std::vector<uint32_t>{2});

  auto ps = sieve_primes(10000);
  CHECK(ps.size() == 1229);
  for (uint32_t p : ps) CHECK(is_prime_u64(p));
}

TEST_CASE("prefix prime counting") {
  auto ps = sieve_primes(100);
  CHECK(prime_count_upto(ps, 100) == 25);
  CHECK(prime_count_upto(ps, 97) == 25);
  CHECK(prime_count_upto(ps, 96) == 24);
  CHECK(prime_count_upto(ps, 2) == 1);
  CHECK(prime_count_upto(ps, 1) == 0);
  CHECK(prime_count_upto(ps, 1ull << 40) == 25);
}

TEST_CASE("admission threshold floors") {
  CHECK(admission_threshold_floor(2) == 36069);  // 52038 log 2 = 36069.99...
  CHECK(admission_threshold_floor(3) == 57169);
  CHECK(admission_threshold_floor(700393) == 700400);
  CHECK_THROWS(admission_threshold_floor(1));
}

TEST_CASE("criteria canonical strings and hashes") {
  auto main_c = CampaignCriteria::main_scan();
  auto res_c = CampaignCriteria::residual_scan();
  CHECK(main_c.canonical_string() ==
        "v=main;p=[2,700393];pmod4=3;qmod4=1;qbelow=1;qabove=0;"
        "q=[0,700393];wf=0");
  CHECK(res_c.canonical_string() ==
        "v=residual;p=[2,700393];pmod4=3;qmod4=1;qbelow=0;qabove=1;"
        "q=[0,700393];wf=1");
  CHECK(main_c.hash_hex().size() == 16);
  CHECK(main_c.hash_hex() == CampaignCriteria::main_scan().hash_hex());
  CHECK(main_c.hash_hex() != res_c.hash_hex());
}

TEST_CASE("pair table and counting on small ranges") {
  CampaignCriteria c;
  c.p_min = 2;
  c.p_max = 10;
  c.q_max = 10;
  CHECK(count_pairs(c) == 6);  // (2,3)(2,5)(2,7)(3,5)(3,7)(5,7)

  c.p_mod4 = 3;
  CHECK(count_pairs(c) == 2);  // (3,5)(3,7)

  c.q_mod4 = 1;
  CHECK(count_pairs(c) == 1);  // (3,5)

  c = CampaignCriteria{};
  c.p_min = 2;
  c.p_max = 10;
  c.q_min = 5;
  c.q_max = 10;
  CHECK(count_pairs(c) == 5);

  PairTable t = build_pair_table(c);
  CHECK(t.total == 5);
  uint64_t running = 0;
  for (const auto& row : t.rows) {
    CHECK(row.start == running);
    CHECK(row.q_lo < row.q_hi);
    running += row.q_hi - row.q_lo;
    for (uint32_t i = row.q_lo; i < row.q_hi; ++i) {
      CHECK(t.qprimes[i] > row.p);
      CHECK(t.qprimes[i] >= 5);
      CHECK(t.qprimes[i] <= 10);
    }
  }
  CHECK(running == 5);
}

TEST_CASE("pair table input validation") {
  CampaignCriteria c;
  c.p_min = 1;
  CHECK_THROWS(build_pair_table(c));
  c = CampaignCriteria{};
  c.p_min = 10;
  c.p_max = 5;
  CHECK_THROWS(build_pair_table(c));
  c = CampaignCriteria{};
  c.q_max = (1ull << 31) + 1;
  CHECK_THROWS(build_pair_table(c));
  c = CampaignCriteria{};
  c.q_below_threshold = true;
  c.q_above_threshold = true;
  CHECK_THROWS(build_pair_table(c));
}

TEST_CASE("threshold splits the q range exactly") {
  for (unsigned long p : {3ul, 7ul, 101ul, 9973ul}) {
    uint64_t f = admission_threshold_floor(p);
    CampaignCriteria below, above, all;
    below.p_min = below.p_max = p;
    below.q_below_threshold = true;
    above.p_min = above.p_max = p;
    above.q_above_threshold = true;
    all.p_min = all.p_max = p;
    CHECK(count_pairs(below) + count_pairs(above) == count_pairs(all));

    PairTable tb = build_pair_table(below);
    if (!tb.rows.empty())
      CHECK(tb.qprimes[tb.rows[0].q_hi - 1] <= f);  // largest admitted q
    PairTable ta = build_pair_table(above);
    if (!ta.rows.empty())
      CHECK(ta.qprimes[ta.rows[0].q_lo] > f);  // smallest admitted q
  }
}

TEST_CASE("prefix counting agrees with a direct scan") {
  auto primes = sieve_primes(700393);
  CampaignCriteria c;
  c.p_min = 2;
  c.p_max = 100;
  c.p_mod4 = 3;
  c.q_mod4 = 1;
  c.q_below_threshold = true;
  uint64_t direct = 0;
  for (uint32_t p : primes) {
    if (p > 100) break;
    if (p % 4 != 3) continue;
    uint64_t f = admission_threshold_floor(p);
    for (uint32_t q : primes)
      if (q > p && q % 4 == 1 && q <= f) ++direct;
  }
  CHECK(count_pairs(c) == direct);
  CHECK(direct > 0);
}

TEST_CASE("campaign: full run, stream and counts agree") {
  CampaignCriteria crit = small_criteria();
  const uint64_t total = count_pairs(crit);
  CHECK(total == 428);

  CampaignOptions opt;
  opt.output_path = (test_dir() / "full.jsonl").string();
  CampaignState st = run_campaign(crit, opt);
  CHECK(st.complete);
  CHECK(st.cursor == total);
  CHECK(st.counts.seen == total);
  CHECK(st.counts.sampled == total);
  CHECK(st.counts.searched == total);
  CHECK(st.counts.quadruples == 0);

  auto recs = parse_records(opt.output_path);
  REQUIRE(recs.size() == total);
  const std::vector<std::string> keys = {
      "p", "q", "u_p", "u_q", "triples_count", "quadruples",
      "c0", "c_final", "c1", "delta", "millis"};
  uint64_t last_p = 0, last_q = 0;
  for (const auto& j : recs) {
    std::vector<std::string> got;
    for (auto it = j.begin(); it != j.end(); ++it) got.push_back(it.key());
    CHECK(got == keys);
    uint64_t p = j["p"].get<uint64_t>(), q = j["q"].get<uint64_t>();
    CHECK(is_prime_u64(p));
    CHECK(is_prime_u64(q));
    CHECK(p % 4 == 3);
    CHECK(p >= 3);
    CHECK(p <= 50);
    CHECK(q > p);
    CHECK(q <= 300);
    CHECK(std::tie(last_p, last_q) < std::tie(p, q));
    last_p = p;
    last_q = q;
    CHECK(j["quadruples"].is_array());
    CHECK(j["quadruples"].empty());
    CHECK(j["c_final"].get<double>() > 0);
    CHECK(j["c_final"].get<double>() <= j["c0"].get<double>());
  }

  // rerunning over the finished output just recounts it
  CampaignState again = run_campaign(crit, opt);
  CHECK(again.complete);
  CHECK(again.counts.searched == total);
}

TEST_CASE("campaign: sampling strides the enumeration") {
  CampaignCriteria crit = small_criteria();
  CampaignOptions opt;
  opt.output_path = (test_dir() / "sampled.jsonl").string();
  opt.sample_every = 5;
  CampaignState st = run_campaign(crit, opt);
  CHECK(st.complete);
  CHECK(st.counts.seen == 428);
  CHECK(st.counts.sampled == 86);  // ceil(428/5)
  CHECK(st.counts.searched == 86);
  CHECK(parse_records(opt.output_path).size() == 86);
}

TEST_CASE("campaign: wieferich filter keeps exactly the divisible pairs") {
  CampaignCriteria crit = small_criteria();
  crit.wieferich_filter = true;

  // expected set by direct modular exponentiation over the same table
  PairTable t = build_pair_table(crit);
  std::vector<std::pair<uint32_t, uint32_t>> expect;
  for (const auto& row : t.rows)
    for (uint32_t i = row.q_lo; i < row.q_hi; ++i)
      if (p_square_divides((unsigned long)row.p,
                           (unsigned long)t.qprimes[i]))
        expect.emplace_back(row.p, t.qprimes[i]);

  // count_pairs sizes the enumeration regardless of the filter;
  // count_searchable_pairs is what an unsampled scan would search
  CHECK(count_pairs(crit) == 428);
  CHECK(count_searchable_pairs(crit) == expect.size());

  CampaignOptions opt;
  opt.output_path = (test_dir() / "filtered.jsonl").string();
  CampaignState st = run_campaign(crit, opt);
  CHECK(st.complete);
  CHECK(st.counts.seen == 428);
  CHECK(st.counts.searched == expect.size());
  auto recs = parse_records(opt.output_path);
  REQUIRE(recs.size() == expect.size());
  for (size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i]["p"].get<uint32_t>() == expect[i].first);
    CHECK(recs[i]["q"].get<uint32_t>() == expect[i].second);
    CHECK(recs[i]["u_p"].get<uint64_t>() >= 2);
  }
}

TEST_CASE("campaign: interrupt, resume, and match the uninterrupted run") {
  CampaignCriteria crit = small_criteria();

  CampaignOptions ref;
  ref.output_path = (test_dir() / "ref.jsonl").string();
  run_campaign(crit, ref);
  auto reference = stable_records(ref.output_path);
  REQUIRE(reference.size() == 428);

  CampaignOptions opt;
  opt.output_path = (test_dir() / "resumed.jsonl").string();
  opt.checkpoint_path = (test_dir() / "resumed.ckpt").string();
  opt.block_size = 32;  // 14 blocks
  opt.max_blocks = 4;
  CampaignState st = run_campaign(crit, opt);
  CHECK_FALSE(st.complete);
  CHECK(st.cursor == 4 * 32);
  CHECK(fs::exists(opt.checkpoint_path));
  auto ck = nlohmann::json::parse(slurp(opt.checkpoint_path));
  CHECK(ck["version"] == 1);
  CHECK(ck["cursor_block"] == 4);

  opt.max_blocks = 0;
  CampaignState st2 = run_campaign(crit, opt);
  CHECK(st2.complete);
  CHECK(st2.cursor == 428);
  CHECK(st2.counts.searched == 428);
  CHECK(stable_records(opt.output_path) == reference);
  // shards are consumed by the merge
  CHECK_FALSE(fs::exists(opt.output_path + ".shard0"));
}

TEST_CASE("campaign: the merge survives torn tails and duplicate records") {
  CampaignCriteria crit = small_criteria();
  CampaignOptions opt;
  opt.output_path = (test_dir() / "torn.jsonl").string();
  opt.checkpoint_path = (test_dir() / "torn.ckpt").string();
  opt.block_size = 32;
  opt.max_blocks = 2;
  run_campaign(crit, opt);

  fs::path shard = opt.output_path + ".shard0";
  REQUIRE(fs::exists(shard));
  std::string content = slurp(shard);
  std::string first_record;
  for (size_t pos = 0; pos < content.size();) {
    size_t nl = content.find('\n', pos + 1);
    std::string tok = content.substr(pos, nl - pos);
    while (!tok.empty() && tok.front() == '\n') tok.erase(tok.begin());
    if (!tok.empty()) {
      first_record = tok;
      break;
    }
    pos = nl;
  }
  REQUIRE(!first_record.empty());
  {
    std::ofstream app(shard, std::ios::app);
    app << '\n' << first_record << '\n' << "{\"p\": 3, \"q\"";  // torn tail
  }

  opt.max_blocks = 0;
  CampaignState st = run_campaign(crit, opt);
  CHECK(st.complete);
  CHECK(st.counts.searched == 428);  // duplicate collapsed, tail dropped
  CHECK(parse_records(opt.output_path).size() == 428);
}

TEST_CASE("campaign: checkpoints refuse to cross runs") {
  CampaignCriteria crit = small_criteria();
  CampaignOptions opt;
  opt.output_path = (test_dir() / "guard.jsonl").string();
  opt.checkpoint_path = (test_dir() / "guard.ckpt").string();
  opt.block_size = 32;
  opt.max_blocks = 1;
  run_campaign(crit, opt);

  CampaignCriteria other = crit;
  other.q_max = 400;
  CHECK_THROWS_WITH_AS(run_campaign(other, opt),
                       "checkpoint belongs to a different campaign; "
                       "refusing to resume",
                       std::runtime_error);

  CampaignOptions resized = opt;
  resized.block_size = 64;
  CHECK_THROWS(run_campaign(crit, resized));

  CampaignOptions restrided = opt;
  restrided.sample_every = 2;
  CHECK_THROWS(run_campaign(crit, restrided));

  std::ofstream(opt.checkpoint_path, std::ios::trunc) << "not json\n";
  CHECK_THROWS(run_campaign(crit, opt));
}

TEST_CASE("campaign: a worker pool produces the single-worker stream") {
  CampaignCriteria crit = small_criteria();
  CampaignOptions one;
  one.output_path = (test_dir() / "w1.jsonl").string();
  run_campaign(crit, one);

  CampaignOptions three;
  three.output_path = (test_dir() / "w3.jsonl").string();
  three.workers = 3;
  three.block_size = 16;
  CampaignState st = run_campaign(crit, three);
  CHECK(st.complete);
  CHECK(stable_records(three.output_path) == stable_records(one.output_path));
}

TEST_CASE("campaign: count-only, empty ranges, option validation") {
  CampaignCriteria crit = small_criteria();
  CampaignOptions opt;
  opt.count_only = true;
  CampaignState st = run_campaign(crit, opt);
  CHECK(st.complete);
  CHECK(st.counts.seen == 428);
  CHECK(st.cursor == 428);

  CampaignCriteria empty;
  empty.p_min = empty.p_max = 3;
  empty.q_min = 7;
  empty.q_max = 5;
  CampaignOptions eo;
  eo.output_path = (test_dir() / "empty.jsonl").string();
  CampaignState es = run_campaign(empty, eo);
  CHECK(es.complete);
  CHECK(es.counts.seen == 0);
  CHECK(es.counts.searched == 0);
  CHECK(fs::exists(eo.output_path));
  CHECK(slurp(eo.output_path).empty());

  CampaignOptions bad;
  bad.output_path = (test_dir() / "bad.jsonl").string();
  bad.sample_every = 0;
  CHECK_THROWS(run_campaign(crit, bad));
  bad.sample_every = 1;
  bad.block_size = 0;
  CHECK_THROWS(run_campaign(crit, bad));
  CampaignOptions noout;
  CHECK_THROWS(run_campaign(crit, noout));
}
