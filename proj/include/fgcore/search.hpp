#ifndef FGCORE_SEARCH_HPP
#define FGCORE_SEARCH_HPP

// Searches for pairs H, K of rank-m subgroups with rank(H ∩ K) >= m and
// rank(H ∨ K) > m. Subgroups are identified with their based core graphs, so
// conjugates with different cores count as different subgroups.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "fgcore/serialize.hpp"

namespace fgcore {

enum class SearchMode { exhaustive, random };

inline const char* to_string(SearchMode m) { return m == SearchMode::exhaustive ? "exhaustive" : "random"; }

inline SearchMode parse_mode(std::string_view s) {
  if (s == "exhaustive") return SearchMode::exhaustive;
  if (s == "random") return SearchMode::random;
  throw ParseError("mode must be 'exhaustive' or 'random', got '" + std::string(s) + "'");
}

class RetryCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SearchConfig {
  unsigned m = 2;
  unsigned n = 2;
  SearchMode mode = SearchMode::random;
  unsigned max_word_length = 6;
  std::uint64_t sample_count = 1000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::uint64_t retry_cap = 100000;
  std::string witness_path;  // empty: keep witnesses in the report only

  void validate() const {
    if (m < 2) throw PreconditionError("m must be >= 2");
    if (n < 2 || n > kMaxAlphabetRank) throw PreconditionError("n must be in [2, 26]");
    if (max_word_length < 1) throw PreconditionError("max word length must be >= 1");
    if (retry_cap < 1) throw PreconditionError("retry cap must be >= 1");
    if (mode == SearchMode::exhaustive) {
      // Words up to inversion, raised to the m-th power, must stay small.
      double words = 0.0;
      double c = 2.0 * n;
      for (unsigned len = 1; len <= max_word_length; ++len, c *= 2.0 * n - 1.0) words += c / 2.0;
      double combos = 1.0;
      for (unsigned i = 0; i < m; ++i) combos *= words;
      if (combos > 1e9) throw PreconditionError("exhaustive search space too large; lower L, m or n");
    }
  }
};

/// Flat `key = value` lines; `#` starts a comment. Keys mirror SearchConfig.
inline void apply_config_text(SearchConfig& cfg, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto first = s.find_first_not_of(" \t\r");
      if (first == std::string::npos) return std::string();
      return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto number = [&]() -> std::uint64_t {
      std::size_t used = 0;
      std::uint64_t v = 0;
      try {
        v = std::stoull(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != value.size() || value.empty() || value[0] == '-') {
        throw ParseError("config line " + std::to_string(lineno) + ": '" + key + "' needs a nonnegative integer");
      }
      return v;
    };
    if (key == "m") {
      cfg.m = static_cast<unsigned>(number());
    } else if (key == "n" || key == "alphabet_rank") {
      cfg.n = static_cast<unsigned>(number());
    } else if (key == "mode") {
      cfg.mode = parse_mode(value);
    } else if (key == "max_word_length" || key == "L") {
      cfg.max_word_length = static_cast<unsigned>(number());
    } else if (key == "sample_count" || key == "samples") {
      cfg.sample_count = number();
    } else if (key == "rng_seed" || key == "seed") {
      cfg.seed = number();
    } else if (key == "parallelism" || key == "workers") {
      cfg.workers = static_cast<unsigned>(number());
    } else if (key == "retry_cap") {
      cfg.retry_cap = number();
    } else if (key == "witness_path") {
      cfg.witness_path = value;
    } else {
      throw ParseError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
}

/// A subgroup together with the generator list it was built from.
struct Subgroup {
  std::vector<Word> gens;
  CoreGraph core;
  CanonicalForm form;
};

inline Subgroup make_subgroup(std::vector<Word> gens, unsigned n) {
  CoreGraph core = from_generators(gens, n);
  CanonicalForm form = canonical_form(core);
  return {std::move(gens), std::move(core), std::move(form)};
}

/// Reduced words of length 1..L, one from each {w, w^-1}, shortlex.
inline std::vector<Word> words_up_to_inversion(unsigned n, unsigned max_length) {
  std::vector<Word> out;
  std::vector<std::vector<Letter>> layer{{}};
  for (unsigned len = 1; len <= max_length; ++len) {
    std::vector<std::vector<Letter>> next;
    for (const auto& prefix : layer) {
      for (unsigned c = 0; c < 2 * n; ++c) {
        const Letter l = Letter::from_code(c);
        if (!prefix.empty() && prefix.back().cancels(l)) continue;
        next.push_back(prefix);
        next.back().push_back(l);
      }
    }
    for (const auto& letters : next) {
      Word w = Word::reduce(n, letters);
      if (!(w.inverse() < w)) out.push_back(std::move(w));
    }
    layer = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Every subgroup generated by m words of length <= L whose core has rank
/// exactly m, once each, in order of first discovery over generator lists
/// taken as shortlex-ordered m-subsets.
inline std::vector<Subgroup> enumerate_subgroups(unsigned m, unsigned n, unsigned max_length) {
  if (m < 1) throw PreconditionError("m must be >= 1");
  const std::vector<Word> words = words_up_to_inversion(n, max_length);
  std::vector<Subgroup> out;
  std::unordered_map<CanonicalForm, std::size_t> seen;
  if (words.size() < m) return out;
  std::vector<std::size_t> pick(m);
  for (unsigned i = 0; i < m; ++i) pick[i] = i;
  while (true) {
    std::vector<Word> gens;
    for (std::size_t i : pick) gens.push_back(words[i]);
    Subgroup s = make_subgroup(std::move(gens), n);
    if (rank(s.core) == static_cast<long>(m) && !seen.contains(s.form)) {
      seen.emplace(s.form, out.size());
      out.push_back(std::move(s));
    }
    // Next m-subset in lexicographic order.
    int i = static_cast<int>(m) - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == words.size() - m + static_cast<std::size_t>(i)) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (std::size_t j = static_cast<std::size_t>(i) + 1; j < m; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

/// m uniform reduced words of length <= L, redrawn until the core has rank m.
inline Subgroup sample_subgroup(unsigned m, unsigned n, unsigned max_length, Rng& rng, std::uint64_t retry_cap = 100000) {
  for (std::uint64_t attempt = 0; attempt < retry_cap; ++attempt) {
    std::vector<Word> gens;
    for (unsigned i = 0; i < m; ++i) gens.push_back(random_reduced_word(rng, n, max_length));
    Subgroup s = make_subgroup(std::move(gens), n);
    if (rank(s.core) == static_cast<long>(m)) return s;
  }
  throw RetryCapExceeded("no rank-" + std::to_string(m) + " subgroup after " + std::to_string(retry_cap) + " draws");
}

struct PairVerdict {
  std::string h_id;
  std::string k_id;
  std::vector<Word> h_gens;
  std::vector<Word> k_gens;
  unsigned m = 0;
  long rank_h = 0;
  long rank_k = 0;
  long rank_intersection = 0;
  long rank_join = 0;
  bool qualifies = false;
  bool conjecture_ok = true;

  // Branch matrix data.
  bool trivalent = false;
  bool bound_applicable = false;
  std::size_t ones = 0;
  std::size_t l = 0;
  std::size_t p = 0;
  std::size_t q = 0;
  RankBounds bounds;
  bool bound_ok = true;  // rank_join <= integral bound
  std::size_t intersection_weighted_branch = 0;

  long chi_bar_join = 0;
  long chi_bar_T = 0;

  // Structural identities checked on the cores of H, K, H ∩ K and H ∨ K.
  unsigned branch_checked = 0;
  unsigned branch_failures = 0;
  unsigned nielsen_schreier_checked = 0;
  unsigned nielsen_schreier_failures = 0;

  bool violation() const { return qualifies && !conjecture_ok; }
  bool chi_ok() const { return chi_bar_join <= chi_bar_T; }
  bool ones_identity_ok() const { return !trivalent || ones == intersection_weighted_branch; }
};

namespace detail {

inline void check_identities(const CoreGraph& g, PairVerdict& v) {
  const long r = rank(g);
  const auto val = g.valences();
  const bool no_leaves = std::none_of(val.begin(), val.end(), [](std::size_t x) { return x == 1; });
  if (no_leaves && r >= 1) {
    ++v.branch_checked;
    if (static_cast<long>(branch_vertices(g).weighted_count) != 2 * (r - 1)) ++v.branch_failures;
  }
  if (const auto idx = index(g)) {
    ++v.nielsen_schreier_checked;
    if (r - 1 != static_cast<long>(*idx) * (static_cast<long>(g.alphabet_rank()) - 1)) ++v.nielsen_schreier_failures;
  }
}

}  // namespace detail

inline PairVerdict test_pair(const Subgroup& h, const Subgroup& k, unsigned m) {
  PairVerdict v;
  v.m = m;
  v.rank_h = rank(h.core);
  v.rank_k = rank(k.core);
  if (m < 2 || v.rank_h != static_cast<long>(m) || v.rank_k != static_cast<long>(m)) {
    throw PreconditionError("test_pair requires rank(H) = rank(K) = m >= 2");
  }
  v.h_id = canonical_id(h.core);
  v.k_id = canonical_id(k.core);
  v.h_gens = h.gens;
  v.k_gens = k.gens;

  const BranchMatrix bm = build_matrix(h.core, k.core);
  const CoreGraph inter = intersect(h.core, k.core);
  const CoreGraph joined = join(h.core, k.core);
  v.rank_intersection = bm.intersection_rank;
  v.rank_join = rank(joined);
  v.qualifies = v.rank_intersection >= static_cast<long>(m);
  v.conjecture_ok = !v.qualifies || v.rank_join <= static_cast<long>(m);

  const BlockDecomposition d = block_decompose(bm);
  v.trivalent = bm.trivalent;
  v.bound_applicable = bm.bound_applicable();
  v.ones = bm.ones.size();
  v.l = d.l;
  v.p = d.p;
  v.q = d.q;
  v.bounds = rank_bounds(v.rank_h, v.rank_k, d);
  v.bound_ok = v.rank_join <= v.bounds.integral_bound;
  v.intersection_weighted_branch = bm.intersection_weighted_branch;

  v.chi_bar_join = reduced_euler(joined).chi_bar;
  v.chi_bar_T = reduced_euler(pushout_T(h.core, k.core)).chi_bar;

  detail::check_identities(h.core, v);
  detail::check_identities(k.core, v);
  detail::check_identities(inter, v);
  detail::check_identities(joined, v);
  return v;
}

inline Json to_json(const PairVerdict& v) {
  return {{"h", v.h_id},
          {"k", v.k_id},
          {"h_gens", to_json(std::span<const Word>(v.h_gens))},
          {"k_gens", to_json(std::span<const Word>(v.k_gens))},
          {"rank_h", v.rank_h},
          {"rank_k", v.rank_k},
          {"rank_intersection", v.rank_intersection},
          {"rank_join", v.rank_join},
          {"qualifies", v.qualifies},
          {"conjecture_ok", v.conjecture_ok},
          {"trivalent", v.trivalent},
          {"bound_applicable", v.bound_applicable},
          {"ones", v.ones},
          {"l", v.l},
          {"p", v.p},
          {"q", v.q},
          {"bounds", to_json(v.bounds)},
          {"bound_ok", v.bound_ok},
          {"chi_bar_join", v.chi_bar_join},
          {"chi_bar_T", v.chi_bar_T}};
}

/// Everything needed to replay a violation.
inline Json witness_json(const Subgroup& h, const Subgroup& k, const PairVerdict& v) {
  return {{"verdict", to_json(v)},
          {"h_graph", to_json(h.core)},
          {"k_graph", to_json(k.core)},
          {"intersection_graph", to_json(intersect(h.core, k.core))},
          {"join_graph", to_json(join(h.core, k.core))},
          {"pushout", to_json(pushout_T(h.core, k.core))},
          {"matrix", to_json(build_matrix(h.core, k.core))}};
}

struct SearchReport {
  SearchConfig config;
  std::uint64_t pairs_drawn = 0;
  std::uint64_t pairs_tested = 0;
  std::uint64_t pairs_qualifying = 0;
  std::uint64_t violations = 0;
  std::vector<Json> witnesses;
  std::map<std::pair<long, long>, std::uint64_t> histogram;  // (rank∩, rank∨)

  std::uint64_t trivalent = 0;
  std::uint64_t bound_applicable = 0;
  std::uint64_t bound_violations = 0;       // among applicable pairs
  std::uint64_t bound_tight = 0;            // rank∨ == integral bound, applicable
  std::uint64_t degenerate_trivalent = 0;   // trivalent, rank∩ <= 1
  std::uint64_t degenerate_bound_failures = 0;
  std::uint64_t ones_identity_failures = 0;
  std::uint64_t chi_checked = 0;
  std::uint64_t chi_failures = 0;
  std::uint64_t branch_checked = 0;
  std::uint64_t branch_failures = 0;
  std::uint64_t nielsen_schreier_checked = 0;
  std::uint64_t nielsen_schreier_failures = 0;
  std::uint64_t subgroups = 0;  // exhaustive mode: distinct subgroups enumerated
  std::string verdict_digest;
  double wall_time_ms = 0.0;
  unsigned workers_used = 1;

  bool clean() const { return violations == 0; }
};

inline Json config_json(const SearchConfig& c) {
  return {{"m", c.m},
          {"n", c.n},
          {"mode", to_string(c.mode)},
          {"max_word_length", c.max_word_length},
          {"sample_count", c.sample_count},
          {"rng_seed", c.seed},
          {"retry_cap", c.retry_cap}};
}

/// Report JSON. Everything outside "runtime" depends only on the config
/// (worker count excluded), so two runs can be compared byte for byte after
/// dropping that key.
inline Json to_json(const SearchReport& r) {
  const Json cfg = config_json(r.config);
  Json hist = Json::array();
  for (const auto& [key, count] : r.histogram) {
    hist.push_back({{"rank_intersection", key.first}, {"rank_join", key.second}, {"count", count}});
  }
  return {{"config", cfg},
          {"config_hash", hex64(fnv1a(cfg.dump()))},
          {"pairs_drawn", r.pairs_drawn},
          {"pairs_tested", r.pairs_tested},
          {"pairs_qualifying", r.pairs_qualifying},
          {"violations", r.violations},
          {"witnesses", r.witnesses},
          {"histogram", hist},
          {"subgroups", r.subgroups},
          {"bound",
           {{"trivalent", r.trivalent},
            {"applicable", r.bound_applicable},
            {"violations", r.bound_violations},
            {"tight", r.bound_tight},
            {"degenerate_trivalent", r.degenerate_trivalent},
            {"degenerate_failures", r.degenerate_bound_failures},
            {"ones_identity_failures", r.ones_identity_failures}}},
          {"chi_bar", {{"checked", r.chi_checked}, {"failures", r.chi_failures}}},
          {"identities",
           {{"branch_checked", r.branch_checked},
            {"branch_failures", r.branch_failures},
            {"nielsen_schreier_checked", r.nielsen_schreier_checked},
            {"nielsen_schreier_failures", r.nielsen_schreier_failures}}},
          {"verdict_digest", r.verdict_digest},
          {"runtime", {{"wall_time_ms", r.wall_time_ms}, {"workers", r.workers_used}}}};
}

/// FGCORE_WORKERS if set to a positive integer, else 1.
inline unsigned default_workers() {
  if (const char* env = std::getenv("FGCORE_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 1024) return static_cast<unsigned>(v);
  }
  return 1;
}

namespace detail {

/// Runs job(i) for i in [0, count) on `workers` threads. Exceptions from any
/// job are rethrown after all threads finish.
template <class Job>
void parallel_for(std::size_t count, unsigned workers, Job&& job) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline SearchReport run_search(const SearchConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  SearchReport report;
  report.config = config;
  report.workers_used = std::max(1u, config.workers);

  // Pairs index into `pool`; in random mode draw i owns entries 2i, 2i+1.
  std::vector<Subgroup> pool;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::optional<PairVerdict>> verdicts;

  if (config.mode == SearchMode::exhaustive) {
    pool = enumerate_subgroups(config.m, config.n, config.max_word_length);
    report.subgroups = pool.size();
    if (pool.size() > 20000) throw PreconditionError("exhaustive search space too large; lower L, m or n");
    for (std::size_t i = 0; i < pool.size(); ++i) {
      for (std::size_t j = i + 1; j < pool.size(); ++j) pairs.emplace_back(i, j);
    }
    report.pairs_drawn = pairs.size();
    verdicts.resize(pairs.size());
    detail::parallel_for(pairs.size(), report.workers_used, [&](std::size_t i) {
      verdicts[i] = test_pair(pool[pairs[i].first], pool[pairs[i].second], config.m);
    });
  } else {
    pool.resize(2 * config.sample_count, Subgroup{{}, CoreGraph::trivial(config.n), {}});
    pairs.resize(config.sample_count);
    verdicts.resize(config.sample_count);
    report.pairs_drawn = config.sample_count;
    detail::parallel_for(pairs.size(), report.workers_used, [&](std::size_t i) {
      Rng rng = derive_rng(config.seed, i);
      Subgroup h = sample_subgroup(config.m, config.n, config.max_word_length, rng, config.retry_cap);
      Subgroup k = sample_subgroup(config.m, config.n, config.max_word_length, rng, config.retry_cap);
      if (k.form < h.form) std::swap(h, k);
      verdicts[i] = test_pair(h, k, config.m);
      pool[2 * i] = std::move(h);
      pool[2 * i + 1] = std::move(k);
      pairs[i] = {2 * i, 2 * i + 1};
    });
    // Unordered pairs are tested once; keep the lowest draw index.
    std::map<std::pair<CanonicalForm, CanonicalForm>, std::size_t> first;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (!first.emplace(std::pair{pool[pairs[i].first].form, pool[pairs[i].second].form}, i).second) {
        verdicts[i].reset();
      }
    }
  }

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (verdicts[i]) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(pool[pairs[a].first].form, pool[pairs[a].second].form) <
           std::tie(pool[pairs[b].first].form, pool[pairs[b].second].form);
  });
  std::uint64_t digest = 0xcbf29ce484222325ULL;
  for (std::size_t i : order) {
    const PairVerdict& v = *verdicts[i];
    ++report.pairs_tested;
    ++report.histogram[{v.rank_intersection, v.rank_join}];
    if (v.qualifies) ++report.pairs_qualifying;
    if (v.violation()) {
      ++report.violations;
      report.witnesses.push_back(witness_json(pool[pairs[i].first], pool[pairs[i].second], v));
    }
    if (v.trivalent) ++report.trivalent;
    if (v.bound_applicable) {
      ++report.bound_applicable;
      if (!v.bound_ok) ++report.bound_violations;
      if (v.rank_join == v.bounds.integral_bound) ++report.bound_tight;
    } else if (v.trivalent) {
      ++report.degenerate_trivalent;
      if (!v.bound_ok) ++report.degenerate_bound_failures;
    }
    if (!v.ones_identity_ok()) ++report.ones_identity_failures;
    ++report.chi_checked;
    if (!v.chi_ok()) ++report.chi_failures;
    report.branch_checked += v.branch_checked;
    report.branch_failures += v.branch_failures;
    report.nielsen_schreier_checked += v.nielsen_schreier_checked;
    report.nielsen_schreier_failures += v.nielsen_schreier_failures;
    const std::string line = to_json(v).dump();
    for (char c : line + "\n") {
      digest ^= static_cast<unsigned char>(c);
      digest *= 0x100000001b3ULL;
    }
  }
  report.verdict_digest = hex64(digest);

  if (!report.witnesses.empty() && !config.witness_path.empty()) {
    write_text_file(config.witness_path, Json(report.witnesses).dump(2) + "\n");
  }
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace fgcore

#endif  // FGCORE_SEARCH_HPP
