#ifndef FGCORE_CLI_HPP
#define FGCORE_CLI_HPP

// Command-line front end. dispatch() returns the process exit code:
// 0 success, 2 search found a violation, 64 usage or input errors,
// 74 file I/O errors, 1 anything else.

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fgcore/search.hpp"

namespace fgcore::cli {

inline constexpr int kExitViolation = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitIo = 74;

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string join_words(std::span<const Word> words) {
  std::string out;
  for (const Word& w : words) {
    if (!out.empty()) out += ",";
    out += w.str();
  }
  return out.empty() ? "(none)" : out;
}

inline PointH3 parse_point(const std::string& text) {
  std::vector<double> xs;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    try {
      std::size_t used = 0;
      xs.push_back(std::stod(piece, &used));
      if (piece.find_first_not_of(" \t", used) != std::string::npos) throw ParseError("bad number");
    } catch (const std::logic_error&) {
      throw ParseError("point must be three comma-separated numbers x,y,t");
    }
  }
  if (xs.size() != 3) throw ParseError("point must be three comma-separated numbers x,y,t");
  const PointH3 p{xs[0], xs[1], xs[2]};
  require_point(p);
  return p;
}

inline void print_subgroup(std::ostream& out, const CoreGraph& g) {
  out << "rank " << rank(g) << "\n";
  out << "generators " << join_words(free_basis(g)) << "\n";
  out << "vertices " << g.vertex_count() << "\n";
  out << "edges " << g.edge_count() << "\n";
}

inline Json subgroup_json(const CoreGraph& g) {
  const auto basis = free_basis(g);
  return {{"rank", rank(g)}, {"generators", to_json(std::span<const Word>(basis))}, {"graph", to_json(g)}};
}

}  // namespace detail

inline int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stallings core graphs, subgroup joins and intersections, and Schottky group sampling"};
  app.name("fgcore");
  app.require_subcommand(1);

  bool json = false;
  unsigned n = 2;
  std::string gens;
  std::string word;
  std::string h_text;
  std::string k_text;

  // Subcommands take --h for a subgroup, so help is long-form only there.
  auto add_common = [&](CLI::App* sub) {
    sub->set_help_flag("--help", "Print this help message and exit");
    sub->add_flag("--json", json, "Machine-readable JSON output");
  };
  auto add_alphabet = [&](CLI::App* sub) {
    sub->add_option("--n", n, "Rank of the ambient free group")->check(CLI::Range(1u, kMaxAlphabetRank));
  };

  CLI::App* rank_cmd = app.add_subcommand("rank", "Rank of the subgroup generated by a word list");
  add_common(rank_cmd);
  rank_cmd->add_option("--gens", gens, "Comma-separated generators, e.g. aa,ab,bb")->required();
  add_alphabet(rank_cmd);

  CLI::App* member_cmd = app.add_subcommand("member", "Membership of a word in a subgroup");
  add_common(member_cmd);
  member_cmd->add_option("--gens", gens, "Comma-separated generators")->required();
  member_cmd->add_option("--word", word, "Word to test")->required();
  add_alphabet(member_cmd);

  std::vector<CLI::App*> pair_cmds;
  for (const auto& [name, help] : {std::pair{"intersect", "Intersection H ∩ K"}, std::pair{"join", "Join H ∨ K"},
                                   std::pair{"matrix", "Branch-vertex matrix and rank bounds for H, K"}}) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub);
    sub->add_option("--h", h_text, "Generators of H")->required();
    sub->add_option("--k", k_text, "Generators of K")->required();
    add_alphabet(sub);
    pair_cmds.push_back(sub);
  }

  SearchConfig search_cfg;
  search_cfg.workers = default_workers();
  std::string mode_text = "random";
  std::string config_path;
  std::string report_path;
  std::string witness_path = "fgcore_witness.json";
  CLI::App* search_cmd = app.add_subcommand("search", "Search rank-m subgroup pairs for join-rank violations");
  add_common(search_cmd);
  search_cmd->add_option("--m", search_cfg.m, "Subgroup rank")->check(CLI::Range(2u, 64u));
  search_cmd->add_option("--n", search_cfg.n, "Rank of the ambient free group")->check(CLI::Range(2u, kMaxAlphabetRank));
  search_cmd->add_option("--mode", mode_text, "exhaustive or random")->check(CLI::IsMember({"exhaustive", "random"}));
  search_cmd->add_option("--L,--max-length", search_cfg.max_word_length, "Maximum generator length")
      ->check(CLI::Range(1u, 64u));
  search_cmd->add_option("--samples", search_cfg.sample_count, "Random pairs to draw");
  search_cmd->add_option("--seed", search_cfg.seed, "RNG seed");
  search_cmd->add_option("--workers", search_cfg.workers, "Worker threads (default: $FGCORE_WORKERS or 1)")
      ->check(CLI::Range(1u, 1024u));
  search_cmd->add_option("--retry-cap", search_cfg.retry_cap, "Draws per subgroup before giving up");
  search_cmd->add_option("--config", config_path, "key = value file; its entries override flags");
  search_cmd->add_option("--report", report_path, "Also write the JSON report here");
  search_cmd->add_option("--witness", witness_path, "Where to dump violation witnesses");

  unsigned schottky_k = 2;
  std::uint64_t schottky_seed = 1;
  std::string schottky_path;
  CLI::App* schottky_cmd = app.add_subcommand("schottky", "Sample a certified Schottky group");
  add_common(schottky_cmd);
  schottky_cmd->add_option("--k", schottky_k, "Number of generators")->check(CLI::Range(2u, kMaxAlphabetRank));
  schottky_cmd->add_option("--seed", schottky_seed, "RNG seed");

  std::string point_text = "0,0,1";
  double lambda = 0.0;
  bool lambda_set = false;
  unsigned gp_length = 8;
  CLI::App* gp_cmd = app.add_subcommand("gp-estimate", "Estimate rk G_P(lambda) at a point of a Schottky group");
  add_common(gp_cmd);
  gp_cmd->add_option("--k", schottky_k, "Number of generators")->check(CLI::Range(2u, kMaxAlphabetRank));
  gp_cmd->add_option("--seed", schottky_seed, "Seed of the sampled group");
  gp_cmd->add_option("--schottky", schottky_path, "Read the group from JSON instead of sampling");
  gp_cmd->add_option("--point", point_text, "x,y,t with t > 0");
  gp_cmd->add_option("--lambda", lambda, "Displacement threshold (default log(2k-1))")
      ->each([&](const std::string&) { lambda_set = true; });
  gp_cmd->add_option("--L,--max-length", gp_length, "Word length bound")->check(CLI::Range(1u, 16u));

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (rank_cmd->parsed()) {
      const CoreGraph g = from_generators(parse_word_list(gens, n), n);
      if (json) {
        out << Json{{"rank", rank(g)}, {"graph", to_json(g)}}.dump() << "\n";
      } else {
        out << rank(g) << "\n";
      }
      return 0;
    }
    if (member_cmd->parsed()) {
      const CoreGraph g = from_generators(parse_word_list(gens, n), n);
      const bool in = contains(g, parse_word(word, n));
      if (json) {
        out << Json{{"member", in}}.dump() << "\n";
      } else {
        out << (in ? "true" : "false") << "\n";
      }
      return 0;
    }
    for (CLI::App* sub : pair_cmds) {
      if (!sub->parsed()) continue;
      const CoreGraph h = from_generators(parse_word_list(h_text, n), n);
      const CoreGraph k = from_generators(parse_word_list(k_text, n), n);
      const std::string name = sub->get_name();
      if (name == "intersect" || name == "join") {
        const CoreGraph g = name == "intersect" ? intersect(h, k) : join(h, k);
        if (json) {
          out << detail::subgroup_json(g).dump() << "\n";
        } else {
          detail::print_subgroup(out, g);
        }
        return 0;
      }
      const BranchMatrix m = build_matrix(h, k);
      const Json j = to_json(m);
      if (json) {
        out << j.dump() << "\n";
        return 0;
      }
      out << "size " << m.row_count() << "x" << m.col_count() << "\n";
      for (std::size_t i = 0; i < m.row_count(); ++i) {
        for (std::size_t c = 0; c < m.col_count(); ++c) out << (c ? " " : "") << (m.at(i, c) ? 1 : 0);
        out << "\n";
      }
      out << "trivalent " << (m.trivalent ? "true" : "false") << "\n";
      out << "intersection_rank " << m.intersection_rank << "\n";
      out << "l " << j["l"] << "\np " << j["p"] << "\nq " << j["q"] << "\n";
      out << "kent_bound " << j["bounds"]["kent"] << "\n";
      out << "refined_bound " << j["bounds"]["refined"] << "\n";
      out << "integral_bound " << j["bounds"]["integral"] << "\n";
      out << "join_rank " << rank(join(h, k)) << "\n";
      return 0;
    }
    if (search_cmd->parsed()) {
      search_cfg.mode = parse_mode(mode_text);
      search_cfg.witness_path = witness_path;
      if (!config_path.empty()) apply_config_text(search_cfg, detail::read_file(config_path));
      const SearchReport report = run_search(search_cfg);
      const Json j = to_json(report);
      if (!report_path.empty()) write_text_file(report_path, j.dump(2) + "\n");
      if (json) {
        out << j.dump() << "\n";
      } else {
        out << "pairs_tested " << report.pairs_tested << "\n";
        out << "pairs_qualifying " << report.pairs_qualifying << "\n";
        out << "violations " << report.violations << "\n";
        out << "bound_applicable " << report.bound_applicable << "\n";
        out << "bound_violations " << report.bound_violations << "\n";
        out << "chi_failures " << report.chi_failures << "\n";
        for (const auto& [key, count] : report.histogram) {
          out << "histogram " << key.first << " " << key.second << " " << count << "\n";
        }
        if (!report.clean() && !search_cfg.witness_path.empty()) out << "witnesses " << search_cfg.witness_path << "\n";
      }
      return report.clean() ? 0 : kExitViolation;
    }
    if (schottky_cmd->parsed()) {
      const SchottkyConfig cfg = sample_schottky(schottky_k, schottky_seed);
      if (json) {
        out << to_json(cfg).dump() << "\n";
        return 0;
      }
      out << std::setprecision(17);
      for (unsigned j = 0; j < cfg.k; ++j) {
        const Classification c = classify(cfg.generators[j]);
        out << "generator " << static_cast<char>('a' + j) << " translation_length " << c.translation_length
            << " rotation_angle " << c.rotation_angle << "\n";
      }
      out << "certified " << (certify(cfg).ok ? "true" : "false") << "\n";
      return 0;
    }
    if (gp_cmd->parsed()) {
      const SchottkyConfig cfg = schottky_path.empty() ? sample_schottky(schottky_k, schottky_seed)
                                                       : schottky_from_json(Json::parse(detail::read_file(schottky_path)));
      if (!certify(cfg).ok) throw PreconditionError("Schottky group failed certification");
      const double lam = lambda_set ? lambda : std::log(2.0 * cfg.k - 1.0);
      const GPEstimate e = estimate_GP(detail::parse_point(point_text), cfg, lam, gp_length);
      if (json) {
        out << to_json(e).dump() << "\n";
        return 0;
      }
      out << std::setprecision(17);
      out << "rank_estimate " << e.rank_estimate << "\n";
      out << "words " << detail::join_words(e.words) << "\n";
      out << "roots " << detail::join_words(e.roots) << "\n";
      return 0;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}

}  // namespace fgcore::cli

#endif  // FGCORE_CLI_HPP
