#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdioph/campaign.hpp"
#include "sdioph/search.hpp"
#include "sdioph/tuples.hpp"
#include "sdioph/wieferich.hpp"

using ordered_json = nlohmann::ordered_json;
using namespace sdioph;

namespace {

std::vector<mpz_class> parse_mpz_list(const std::string& csv) {
  std::vector<mpz_class> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw std::invalid_argument("empty entry in list");
    out.emplace_back(item);
  }
  return out;
}

ordered_json tuple_json(const STuple& t) {
  ordered_json j;
  auto entries = ordered_json::array();
  for (const mpz_class& e : t.entries) entries.push_back(e.get_str());
  j["entries"] = entries;
  auto products = ordered_json::array();
  for (const SUnit& s : t.products)
    products.push_back({{"value", s.value.get_str()},
                        {"alpha", s.alpha},
                        {"beta", s.beta}});
  j["products"] = products;
  return j;
}

ordered_json profile_json(const WieferichProfile& w) {
  return {{"p", w.pair.p.get_str()},     {"q", w.pair.q.get_str()},
          {"u_p", w.u_p},                {"u_q", w.u_q},
          {"ord_p_of_q", w.ord_p_of_q.get_str()},
          {"ord_q_of_p", w.ord_q_of_p.get_str()},
          {"ordinary", w.ordinary},      {"extreme", w.extreme}};
}

ordered_json report_json(const SearchReport& rep) {
  ordered_json j;
  j["p"] = rep.pair.p.get_str();
  j["q"] = rep.pair.q.get_str();
  j["wieferich"] = profile_json(rep.wieferich);
  j["bounds"] = {{"c0", rep.bounds.C0},
                 {"c_final", rep.bounds.C},
                 {"c1", rep.bounds.C1},
                 {"delta", rep.bounds.delta},
                 {"iterations", rep.bounds.iterations}};
  auto steps = ordered_json::array();
  for (const ReductionStep& s : rep.trace)
    steps.push_back({{"iteration", s.iteration},
                     {"c", s.C},
                     {"c1", s.C1},
                     {"delta", s.delta}});
  j["trace"] = steps;
  j["exponent_caps"] = {{"alpha_triples", rep.alpha_cap_triples},
                        {"beta_triples", rep.beta_cap_triples},
                        {"alpha_quads", rep.alpha_cap_quads},
                        {"beta_quads", rep.beta_cap_quads}};
  j["triples_count"] = rep.triples_count;
  auto triples = ordered_json::array();
  for (const STuple& t : rep.triples) triples.push_back(tuple_json(t));
  j["triples"] = triples;
  auto quads = ordered_json::array();
  for (const STuple& t : rep.quadruples) quads.push_back(tuple_json(t));
  j["quadruples"] = quads;
  j["millis"] = rep.millis;
  return j;
}

ordered_json state_json(const CampaignState& st) {
  return {{"criteria", st.criteria.canonical_string()},
          {"criteria_hash", st.criteria.hash_hex()},
          {"cursor", st.cursor},
          {"counts",
           {{"seen", st.counts.seen},
            {"sampled", st.counts.sampled},
            {"searched", st.counts.searched},
            {"quadruples", st.counts.quadruples}}},
          {"output_path", st.output_path},
          {"complete", st.complete}};
}

void emit(const ordered_json& j, const std::string& format) {
  if (format == "jsonl")
    std::cout << j.dump() << "\n";
  else
    std::cout << j.dump(2) << "\n";
}

struct CriteriaFlags {
  std::string variant = "custom";
  unsigned long p_min = 2, p_max = 700393;
  int p_mod4 = -1, q_mod4 = -1;
  bool q_below = false, q_above = false;
  unsigned long q_min = 0, q_max = 700393;
  bool wieferich = false;
};

void add_criteria_flags(CLI::App* sub, CriteriaFlags& f) {
  sub->add_option("--variant", f.variant, "main, residual, or custom")
      ->check(CLI::IsMember({"main", "residual", "custom"}));
  sub->add_option("--p-min", f.p_min, "custom: smallest p");
  sub->add_option("--p-max", f.p_max, "custom: largest p");
  sub->add_option("--p-mod4", f.p_mod4, "custom: require p = this mod 4");
  sub->add_option("--q-mod4", f.q_mod4, "custom: require q = this mod 4");
  sub->add_flag("--q-below-threshold", f.q_below,
                "custom: require q < 52038*log p");
  sub->add_flag("--q-above-threshold", f.q_above,
                "custom: require q >= 52038*log p");
  sub->add_option("--q-min", f.q_min, "custom: smallest q");
  sub->add_option("--q-max", f.q_max, "custom: largest q");
  sub->add_flag("--wieferich-filter", f.wieferich,
                "custom: search only pairs with p^2 | q^(p-1)-1");
}

CampaignCriteria to_criteria(const CriteriaFlags& f) {
  if (f.variant == "main") return CampaignCriteria::main_scan();
  if (f.variant == "residual") return CampaignCriteria::residual_scan();
  CampaignCriteria c;
  c.variant = Variant::CUSTOM;
  c.p_min = f.p_min;
  c.p_max = f.p_max;
  c.p_mod4 = f.p_mod4;
  c.q_mod4 = f.q_mod4;
  c.q_below_threshold = f.q_below;
  c.q_above_threshold = f.q_above;
  c.q_min = f.q_min;
  c.q_max = f.q_max;
  c.wieferich_filter = f.wieferich;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verify, search for, and scan for {p,q}-Diophantine tuples"};
  app.require_subcommand(1);

  app.fallthrough();
  unsigned precision_bits = 0;
  std::string format = "json";
  bool quiet = false;
  app.add_option("--precision-bits", precision_bits,
                 "minimum certified-arithmetic precision (default 128)");
  app.add_option("--format", format, "json, jsonl, or human")
      ->check(CLI::IsMember({"json", "jsonl", "human"}));
  app.add_flag("--quiet", quiet, "suppress progress output");

  int exit_code = 0;
  auto apply_globals = [&] {
    if (precision_bits > 0) set_min_precision(precision_bits);
  };

  // verify (--primes P,Q | --p P --q Q) --tuple a,b,c[,d]
  auto* c_verify = app.add_subcommand("verify", "certify one tuple");
  std::string v_p, v_q, v_tuple, v_primes;
  auto* v_p_opt = c_verify->add_option("--p", v_p, "smaller prime");
  auto* v_q_opt = c_verify->add_option("--q", v_q, "larger prime");
  auto* v_primes_opt =
      c_verify->add_option("--primes", v_primes, "both primes as p,q");
  v_primes_opt->excludes(v_p_opt)->excludes(v_q_opt);
  c_verify->add_option("--tuple", v_tuple, "comma-separated entries")
      ->required();
  c_verify->callback([&] {
    apply_globals();
    PrimePair pair = [&] {
      if (*v_primes_opt) {
        std::vector<mpz_class> ps = parse_mpz_list(v_primes);
        if (ps.size() != 2)
          throw std::invalid_argument("--primes wants exactly two values");
        return PrimePair{ps[0], ps[1]};
      }
      if (!*v_p_opt || !*v_q_opt)
        throw std::invalid_argument("pass --primes p,q or both --p and --q");
      return PrimePair{mpz_class(v_p), mpz_class(v_q)};
    }();
    std::vector<mpz_class> entries = parse_mpz_list(v_tuple);
    VerifyOutcome out = verify_tuple(entries, pair);
    ordered_json j;
    j["p"] = pair.p.get_str();
    j["q"] = pair.q.get_str();
    j["certified"] = out.certified;
    if (out.certified) {
      j.update(tuple_json(*out.tuple));
      if (out.tuple->entries.size() == 4) {
        ExponentMatrix m = exponent_matrix(*out.tuple);
        j["exponent_matrix"] = {{"alpha", m.alpha}, {"beta", m.beta}};
        if (pair.p % 4 == 3 || pair.p == 2) {
          auto tag = check_mod4_pattern(m, pair);
          j["mod4_pattern"] = tag ? ordered_json(*tag) : ordered_json(nullptr);
          auto tc = classify_table_case(m, pair);
          j["table_case"] =
              tc ? ordered_json(table_case_name(*tc)) : ordered_json(nullptr);
        }
      }
    } else {
      j["bad_i"] = out.bad_i;
      j["bad_j"] = out.bad_j;
      j["bad_product"] = out.bad_product.get_str();
    }
    if (format == "human") {
      if (out.certified)
        std::cout << "certified: every pairwise product + 1 is a "
                  << "p^a*q^b number\n";
      else
        std::cout << "NOT certified: entries " << out.bad_i << "," << out.bad_j
                  << " give " << out.bad_product.get_str()
                  << " which is not p^a*q^b\n";
    } else {
      emit(j, format);
    }
  });

  // search --p P --q Q [--override-c0 X]
  auto* c_search = app.add_subcommand("search", "run the full pipeline on one pair");
  std::string s_p, s_q;
  double s_c0 = 0;
  c_search->add_option("--p", s_p, "smaller prime")->required();
  c_search->add_option("--q", s_q, "larger prime")->required();
  auto* s_c0_opt = c_search->add_option(
      "--override-c0", s_c0, "explicit starting bound (needed when both primes are 1 mod 4)");
  c_search->callback([&] {
    apply_globals();
    PrimePair pair{mpz_class(s_p), mpz_class(s_q)};
    std::optional<double> c0;
    if (*s_c0_opt) c0 = s_c0;
    SearchReport rep = search_pair(pair, c0);
    if (format == "human") {
      std::printf("pair (%s, %s): u_p=%lu u_q=%lu%s%s\n",
                  pair.p.get_str().c_str(), pair.q.get_str().c_str(),
                  rep.wieferich.u_p, rep.wieferich.u_q,
                  rep.wieferich.ordinary ? ", ordinary" : "",
                  rep.wieferich.extreme ? ", extreme" : "");
      std::printf("C0 = %.6f\n", rep.bounds.C0);
      std::printf("%4s %16s %16s %16s\n", "iter", "C", "C1", "delta");
      for (const ReductionStep& s : rep.trace)
        std::printf("%4u %16.6f %16.6f %16.10f\n", s.iteration, s.C, s.C1,
                    s.delta);
      std::printf("final: C = %.6f, C1 = %.6f after %u iterations\n",
                  rep.bounds.C, rep.bounds.C1, rep.bounds.iterations);
      std::printf("exponent caps: triples %lu/%lu, quadruples %lu/%lu\n",
                  rep.alpha_cap_triples, rep.beta_cap_triples,
                  rep.alpha_cap_quads, rep.beta_cap_quads);
      std::printf("triples: %zu\n", rep.triples_count);
      if (rep.quadruples.empty()) {
        std::printf("quadruples: none\n");
      } else {
        for (const STuple& t : rep.quadruples) {
          std::string line = "quadruple:";
          for (const mpz_class& e : t.entries) line += " " + e.get_str();
          std::printf("%s\n", line.c_str());
        }
      }
      std::printf("elapsed: %.1f ms\n", rep.millis);
    } else {
      emit(report_json(rep), format);
    }
    if (!rep.quadruples.empty()) exit_code = 2;
  });

  // wieferich --p P --q Q | --limit N [--only-ordinary|--only-extreme]
  auto* c_wief = app.add_subcommand("wieferich", "lifted-exponent profiles");
  std::string w_p, w_q;
  unsigned long w_limit = 0;
  bool only_ord = false, only_ext = false;
  c_wief->add_option("--p", w_p, "smaller prime");
  c_wief->add_option("--q", w_q, "larger prime");
  c_wief->add_option("--limit", w_limit, "scan all pairs p < q <= limit");
  c_wief->add_flag("--only-ordinary", only_ord, "print only ordinary pairs");
  c_wief->add_flag("--only-extreme", only_ext, "print only extreme pairs");
  c_wief->callback([&] {
    apply_globals();
    auto show = [&](const WieferichProfile& w) {
      if (only_ord && !w.ordinary) return;
      if (only_ext && !w.extreme) return;
      if (format == "human")
        std::printf("(%s, %s): u_p=%lu u_q=%lu ord_p(q)=%s ord_q(p)=%s%s%s\n",
                    w.pair.p.get_str().c_str(), w.pair.q.get_str().c_str(),
                    w.u_p, w.u_q, w.ord_p_of_q.get_str().c_str(),
                    w.ord_q_of_p.get_str().c_str(),
                    w.ordinary ? " ordinary" : "",
                    w.extreme ? " extreme" : "");
      else
        std::cout << profile_json(w).dump() << "\n";
    };
    if (w_limit > 0) {
      std::vector<uint32_t> primes = sieve_primes((uint32_t)w_limit);
      for (size_t i = 0; i < primes.size(); ++i)
        for (size_t j = i + 1; j < primes.size(); ++j)
          show(wieferich_profile(PrimePair(primes[i], primes[j])));
    } else if (!w_p.empty() && !w_q.empty()) {
      show(wieferich_profile(PrimePair(mpz_class(w_p), mpz_class(w_q))));
    } else {
      throw CLI::ValidationError("wieferich needs --p/--q or --limit");
    }
  });

  // bounds --p P --q Q [--u-p N --u-q N] [--override-c0 X]
  auto* c_bounds = app.add_subcommand("bounds", "bound reduction trace");
  std::string b_p, b_q;
  unsigned long b_up = 0, b_uq = 0;
  double b_c0 = 0;
  c_bounds->add_option("--p", b_p, "smaller prime")->required();
  c_bounds->add_option("--q", b_q, "larger prime")->required();
  auto* b_up_opt = c_bounds->add_option("--u-p", b_up, "override u_p");
  auto* b_uq_opt = c_bounds->add_option("--u-q", b_uq, "override u_q");
  auto* b_c0_opt = c_bounds->add_option("--override-c0", b_c0, "explicit starting bound");
  c_bounds->callback([&] {
    apply_globals();
    PrimePair pair{mpz_class(b_p), mpz_class(b_q)};
    unsigned long u_p, u_q;
    if (*b_up_opt && *b_uq_opt) {
      u_p = b_up;
      u_q = b_uq;
    } else {
      WieferichProfile w = wieferich_profile(pair);
      u_p = *b_up_opt ? b_up : w.u_p;
      u_q = *b_uq_opt ? b_uq : w.u_q;
    }
    std::optional<double> c0;
    if (*b_c0_opt) c0 = b_c0;
    std::vector<ReductionStep> trace;
    BoundState st = reduce_fixpoint(pair, u_p, u_q, &trace, c0);
    if (format == "human") {
      std::printf("C0 = %.6f   (u_p = %lu, u_q = %lu)\n", st.C0, u_p, u_q);
      std::printf("%4s %16s %16s %16s\n", "iter", "C", "C1", "delta");
      for (const ReductionStep& s : trace)
        std::printf("%4u %16.6f %16.6f %16.10f\n", s.iteration, s.C, s.C1,
                    s.delta);
      std::printf("final: C = %.6f, C1 = %.6f after %u iterations\n", st.C,
                  st.C1, st.iterations);
    } else if (format == "jsonl") {
      for (const ReductionStep& s : trace) {
        ordered_json j{{"p", pair.p.get_str()}, {"q", pair.q.get_str()},
                       {"iteration", s.iteration},
                       {"c", s.C},
                       {"c1", s.C1},
                       {"delta", s.delta}};
        std::cout << j.dump() << "\n";
      }
    } else {
      auto steps = ordered_json::array();
      for (const ReductionStep& s : trace)
        steps.push_back({{"iteration", s.iteration},
                         {"c", s.C},
                         {"c1", s.C1},
                         {"delta", s.delta}});
      ordered_json j{{"p", pair.p.get_str()},
                     {"q", pair.q.get_str()},
                     {"u_p", u_p},
                     {"u_q", u_q},
                     {"c0", st.C0},
                     {"steps", steps},
                     {"final",
                      {{"c", st.C},
                       {"c1", st.C1},
                       {"delta", st.delta},
                       {"iterations", st.iterations}}}};
      emit(j, format);
    }
  });

  // scan: the two campaign presets plus custom sub-ranges
  auto* c_scan = app.add_subcommand("scan", "run a prime-pair campaign");
  CriteriaFlags scan_flags;
  add_criteria_flags(c_scan, scan_flags);
  unsigned scan_workers = 0;
  std::string scan_checkpoint, scan_out;
  uint64_t scan_sample = 1, scan_bs = 4096, scan_max_blocks = 0;
  bool scan_count_only = false;
  c_scan->add_option("--workers", scan_workers, "worker threads (default: all cores)");
  c_scan->add_option("--checkpoint", scan_checkpoint, "checkpoint file for resume");
  c_scan->add_option("--out", scan_out, "JSONL results file");
  c_scan->add_option("--sample-every", scan_sample, "search every k-th pair");
  c_scan->add_option("--block-size", scan_bs, "pairs per work unit");
  c_scan->add_option("--max-blocks", scan_max_blocks,
                     "stop after this many fresh blocks (testing)");
  c_scan->add_flag("--count-only", scan_count_only, "count pairs, search nothing");
  c_scan->callback([&] {
    apply_globals();
    CampaignOptions opt;
    opt.workers = scan_workers ? scan_workers
                               : std::max(1u, std::thread::hardware_concurrency());
    opt.checkpoint_path = scan_checkpoint;
    opt.output_path = scan_out;
    opt.sample_every = scan_sample;
    opt.block_size = scan_bs;
    opt.max_blocks = scan_max_blocks;
    opt.count_only = scan_count_only;
    opt.progress = !quiet;
    CampaignState st = run_campaign(to_criteria(scan_flags), opt);
    if (format == "human") {
      std::printf("campaign: %s\n", st.criteria.canonical_string().c_str());
      if (scan_count_only) {
        std::printf("pairs in range: %llu\n", (unsigned long long)st.counts.seen);
      } else if (st.complete) {
        std::printf("pairs: %llu in range, %llu sampled, %llu searched\n",
                    (unsigned long long)st.counts.seen,
                    (unsigned long long)st.counts.sampled,
                    (unsigned long long)st.counts.searched);
        std::printf("quadruples: %llu\n",
                    (unsigned long long)st.counts.quadruples);
        if (!st.output_path.empty())
          std::printf("results: %s\n", st.output_path.c_str());
      } else {
        std::printf(
            "interrupted at pair %llu of %llu; rerun with the same "
            "checkpoint to finish\n",
            (unsigned long long)st.cursor, (unsigned long long)st.counts.seen);
      }
    } else {
      emit(state_json(st), format);
    }
    if (st.counts.quadruples > 0) exit_code = 2;
  });

  // count-pairs
  auto* c_count = app.add_subcommand("count-pairs", "exact pair count for criteria");
  CriteriaFlags count_flags;
  add_criteria_flags(c_count, count_flags);
  c_count->callback([&] {
    apply_globals();
    CampaignCriteria crit = to_criteria(count_flags);
    // An explicit --wieferich-filter asks for the searched count, not the
    // enumeration size (the presets carry the filter implicitly).
    if (c_count->count("--wieferich-filter") > 0) {
      crit.wieferich_filter = true;
      std::cout << count_searchable_pairs(crit) << "\n";
    } else {
      std::cout << count_pairs(crit) << "\n";
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);       // prints usage / help text
    return code == 0 ? 0 : 1;     // --help stays 0, any flag error is 1
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
