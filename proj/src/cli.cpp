#include "jbd/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "jbd/bidiag_svd.hpp"
#include "jbd/csv.hpp"
#include "jbd/diagnostics.hpp"
#include "jbd/errors.hpp"
#include "jbd/gsvd.hpp"
#include "jbd/jbd.hpp"
#include "jbd/matrix_market.hpp"
#include "jbd/projector.hpp"
#include "jbd/testgen.hpp"

namespace jbd {
namespace {

struct CliOptions {
  std::string pair_a;
  std::string pair_l;
  std::string builtin;
  int steps = 0;
  std::string strategy = "partial";
  std::string eta = "auto";
  std::string projector = "qr";
  double lsqr_atol = 1e-14;
  std::uint64_t seed = 0;
  std::string out = ".";
  int repeat = 1;
};

std::vector<double> cs800_values() {
  std::vector<double> c(800);
  for (int j = 0; j < 800; ++j) c[j] = (1200.0 - j) / 1600.0;
  return c;
}

GeneratedPair make_builtin_pair(const std::string& name, std::uint64_t seed) {
  if (name == "cs800") return make_cs_pair(800, cs800_values(), seed);
  if (name == "mult800") return make_multiplicity_pair(seed);
  throw InvalidInputError("unknown builtin pair '" + name +
                          "' (expected cs800 or mult800)");
}

SparsePair load_pair(const CliOptions& o) {
  if (!o.builtin.empty()) {
    if (!o.pair_a.empty() || !o.pair_l.empty())
      throw InvalidInputError(
          "pass either --builtin or --pair-a/--pair-l, not both");
    GeneratedPair g = make_builtin_pair(o.builtin, o.seed);
    return SparsePair{std::move(g.a), std::move(g.l)};
  }
  if (o.pair_a.empty() || o.pair_l.empty())
    throw InvalidInputError("need both --pair-a and --pair-l, or --builtin");
  SparsePair pair{load_matrix_market(o.pair_a), load_matrix_market(o.pair_l)};
  pair.validate();
  return pair;
}

std::unique_ptr<ProjectionProvider> make_provider(const CliOptions& o,
                                                  const SparsePair& pair) {
  if (o.projector == "qr") return make_explicit_qr_provider(pair);
  if (o.projector == "lsqr") {
    LsqrOptions opts;
    opts.atol = o.lsqr_atol;
    if (!(opts.atol > 0.0) || opts.atol > 1e-8)
      throw InvalidInputError("--lsqr-atol must lie in (0, 1e-8]");
    return make_lsqr_provider(pair, opts);
  }
  throw InvalidInputError("unknown projector '" + o.projector +
                          "' (expected qr or lsqr)");
}

StrategyKind parse_strategy(const std::string& s) {
  if (s == "none") return StrategyKind::none;
  if (s == "full") return StrategyKind::full;
  if (s == "partial") return StrategyKind::partial;
  throw InvalidInputError("unknown strategy '" + s +
                          "' (expected none, full, or partial)");
}

StrategyConfig make_config(const CliOptions& o, StrategyKind kind) {
  StrategyConfig cfg;
  cfg.kind = kind;
  cfg.seed = o.seed;
  if (o.eta != "auto") {
    try {
      std::size_t used = 0;
      cfg.eta = std::stod(o.eta, &used);
      if (used != o.eta.size()) throw std::invalid_argument(o.eta);
    } catch (const std::exception&) {
      throw InvalidInputError("--eta must be a number or 'auto'");
    }
  }
  return cfg;
}

void make_out_dir(const std::string& out) {
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec)
    throw IoError("cannot create output directory " + out + ": " +
                  ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

TraceTable ritz_table(const std::vector<std::vector<double>>& history) {
  TraceTable t;
  t.columns = {"step", "index", "theta"};
  for (std::size_t k = 0; k < history.size(); ++k)
    for (std::size_t j = 0; j < history[k].size(); ++j)
      t.rows.push_back({static_cast<double>(k + 1), static_cast<double>(j + 1),
                        history[k][j]});
  return t;
}

void write_reorth_csv(const ReorthRecord& rec, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << "step,side,selected_count\n";
  for (std::size_t i = 0; i < rec.steps.size(); ++i) {
    const StepReorth& s = rec.steps[i];
    f << (i + 1) << ",u," << s.t_set.size() << "\n";
    f << (i + 1) << ",v," << s.s_set.size() << "\n";
    f << (i + 1) << ",uhat," << s.uhat_set.size() << "\n";
  }
  if (!f) throw IoError("failed while writing " + path);
}

// Singular values of both small matrices after every completed step, computed
// from the final coefficient arrays (which the steps only ever append to).
void theta_histories(const JbdState& state,
                     std::vector<std::vector<double>>& hist_b,
                     std::vector<std::vector<double>>& hist_bhat) {
  hist_b.clear();
  hist_bhat.clear();
  for (int k = 1; k <= state.k; ++k) {
    hist_b.push_back(
        bidiagonal_singular_values(state.coeffs, BidiagSide::b, k));
    hist_bhat.push_back(
        bidiagonal_singular_values(state.coeffs, BidiagSide::bhat, k));
  }
}

int report_breakdown(const BreakdownInfo& bd) {
  std::cerr << "breakdown at step " << bd.step << ": " << bd.coefficient
            << " = " << format_g17(bd.value)
            << " fell below the negligibility threshold\n";
  return 3;
}

int cmd_run(const CliOptions& o) {
  if (o.steps < 1) throw InvalidInputError("--steps must be >= 1");
  const SparsePair pair = load_pair(o);
  const std::unique_ptr<ProjectionProvider> provider = make_provider(o, pair);
  const std::vector<double> b(provider->m(), 1.0);
  const StrategyConfig cfg = make_config(o, parse_strategy(o.strategy));

  JbdState state = jbd_init(*provider, b, cfg, o.steps);
  DiagnosticsCollector collector(*provider, DiagnosticsOptions{});
  bool broke = state.breakdown.has_value();
  while (!broke && state.k < o.steps) {
    if (jbd_step(state, *provider) == StepResult::breakdown) {
      broke = true;
      break;
    }
    collector.step(state);
  }

  std::vector<std::vector<double>> hist_b, hist_bhat;
  theta_histories(state, hist_b, hist_bhat);

  make_out_dir(o.out);
  write_csv_trace(diagnostics_table(collector.rows()), join(o.out, "diag.csv"));
  write_csv_trace(ritz_table(hist_b), join(o.out, "ritz_b.csv"));
  write_csv_trace(ritz_table(hist_bhat), join(o.out, "ritz_bhat.csv"));
  write_reorth_csv(state.reorth, join(o.out, "reorth.csv"));

  if (broke) return report_breakdown(*state.breakdown);

  try {
    const double inv = inv_norm(state.coeffs, BidiagSide::b, state.k);
    if (inv > 1e3)
      std::cerr << "warning: ||inverse of the square B_k|| is about "
                << format_g17(inv)
                << "; the pair ordering is unfavorable, consider running on"
                   " the swapped pair {L, A}\n";
  } catch (const SingularMatrixError&) {
    std::cerr << "warning: the square B_k is numerically singular; consider"
                 " running on the swapped pair {L, A}\n";
  }

  std::cout << "completed " << state.k << " steps; artifacts written to "
            << o.out << "\n";
  return 0;
}

int cmd_compare(const CliOptions& o) {
  if (o.steps < 1) throw InvalidInputError("--steps must be >= 1");
  if (o.repeat < 1) throw InvalidInputError("--repeat must be >= 1");
  const SparsePair pair = load_pair(o);
  const std::unique_ptr<ProjectionProvider> provider = make_provider(o, pair);
  const std::vector<double> b(provider->m(), 1.0);

  struct Row {
    std::string name;
    double wall_s = 0.0;
    long long ops = 0;
    double kappa_u = 0.0;
    double kappa_vt = 0.0;
    std::size_t ghosts_b = 0;
    std::size_t ghosts_bhat = 0;
  };
  std::vector<Row> rows;
  bool broke = false;
  BreakdownInfo breakdown;

  const StrategyKind kinds[] = {StrategyKind::none, StrategyKind::partial,
                                StrategyKind::full};
  const char* names[] = {"none", "partial", "full"};
  for (int s = 0; s < 3 && !broke; ++s) {
    const StrategyConfig cfg = make_config(o, kinds[s]);
    std::vector<double> times;
    JbdState last;
    for (int r = 0; r < o.repeat; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      JbdState state = jbd_run(*provider, b, o.steps, cfg);
      const auto t1 = std::chrono::steady_clock::now();
      times.push_back(std::chrono::duration<double>(t1 - t0).count());
      last = std::move(state);
    }
    std::sort(times.begin(), times.end());
    const std::size_t nt = times.size();
    const double median = nt % 2 == 1
                              ? times[nt / 2]
                              : 0.5 * (times[nt / 2 - 1] + times[nt / 2]);

    Row row;
    row.name = names[s];
    row.wall_s = median;
    row.ops =
        last.reorth.ops_u + last.reorth.ops_v + last.reorth.ops_uhat;
    if (last.k >= 1) {
      row.kappa_u = ortho_levels(last.u_basis.leading_cols(last.k + 1)).first;
      row.kappa_vt = ortho_levels(last.vt_basis.leading_cols(last.k)).first;
      if (last.k >= 5) {
        std::vector<std::vector<double>> hist_b, hist_bhat;
        theta_histories(last, hist_b, hist_bhat);
        row.ghosts_b = ritz_trace(hist_b).ghosts.size();
        row.ghosts_bhat = ritz_trace(hist_bhat).ghosts.size();
      }
    }
    rows.push_back(row);
    if (last.breakdown) {
      broke = true;
      breakdown = *last.breakdown;
    }
  }

  make_out_dir(o.out);
  const std::string path = join(o.out, "compare.csv");
  {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << "strategy,wall_time_s,reorth_ops,final_kappa_u,final_kappa_vt,"
         "ghosts_b,ghosts_bhat\n";
    for (const Row& r : rows)
      f << r.name << ',' << format_g17(r.wall_s) << ',' << r.ops << ','
        << format_g17(r.kappa_u) << ',' << format_g17(r.kappa_vt) << ','
        << r.ghosts_b << ',' << r.ghosts_bhat << "\n";
    if (!f) throw IoError("failed while writing " + path);
  }

  if (broke) return report_breakdown(breakdown);
  std::cout << "compared 3 strategies over " << o.steps << " steps ("
            << o.repeat << " repetition" << (o.repeat == 1 ? "" : "s")
            << "); table written to " << path << "\n";
  return 0;
}

int cmd_gen(const CliOptions& o) {
  if (o.builtin.empty()) throw InvalidInputError("gen needs --builtin");
  const std::string& name = o.builtin;
  make_out_dir(o.out);

  if (name == "cs800" || name == "mult800") {
    const GeneratedPair g = make_builtin_pair(name, o.seed);
    const std::string a_path = join(o.out, name + "_a.mtx");
    const std::string l_path = join(o.out, name + "_l.mtx");
    const std::string truth_path = join(o.out, name + "_truth.csv");
    write_matrix_market(g.a, a_path);
    write_matrix_market(g.l, l_path);
    TraceTable t;
    t.columns = {"index", "c", "s", "multiplicity"};
    for (std::size_t i = 0; i < g.truth.c.size(); ++i)
      t.rows.push_back({static_cast<double>(i + 1), g.truth.c[i],
                        g.truth.s[i],
                        static_cast<double>(g.truth.multiplicities[i])});
    write_csv_trace(t, truth_path);
    std::cout << "wrote " << a_path << ", " << l_path << ", " << truth_path
              << "\n";
    return 0;
  }

  if (name.rfind("deriv:", 0) == 0) {
    int n = 0;
    try {
      const std::string tail = name.substr(6);
      std::size_t used = 0;
      n = std::stoi(tail, &used);
      if (used != tail.size()) throw std::invalid_argument(tail);
    } catch (const std::exception&) {
      throw InvalidInputError("deriv:<n> needs an integer size");
    }
    const CsrMatrix l = make_first_derivative(n);
    const std::string path = join(o.out, "deriv_" + std::to_string(n) + ".mtx");
    write_matrix_market(l, path);
    std::cout << "wrote " << path << "\n";
    return 0;
  }

  throw InvalidInputError("unknown builtin '" + name +
                          "' (expected cs800, mult800, or deriv:<n>)");
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Joint bidiagonalization of a matrix pair {A, L}"};
  app.require_subcommand(1);
  CliOptions o;

  const auto add_pair_flags = [&](CLI::App* cmd) {
    cmd->add_option("--pair-a", o.pair_a, "Matrix Market file for A");
    cmd->add_option("--pair-l", o.pair_l, "Matrix Market file for L");
    cmd->add_option("--builtin", o.builtin, "builtin pair (cs800 | mult800)");
    cmd->add_option("--steps", o.steps, "number of process steps to run");
    cmd->add_option("--strategy", o.strategy,
                    "reorthogonalization: none | full | partial");
    cmd->add_option("--eta", o.eta, "selection threshold, a number or 'auto'");
    cmd->add_option("--projector", o.projector, "projection backend: qr | lsqr");
    cmd->add_option("--lsqr-atol", o.lsqr_atol,
                    "LSQR stopping tolerance, in (0, 1e-8]");
    cmd->add_option("--seed", o.seed, "seed for builtin pairs and reset noise");
    cmd->add_option("--out", o.out, "output directory (default .)");
  };

  CLI::App* run = app.add_subcommand(
      "run", "run one strategy and write diag/ritz/reorth CSVs");
  add_pair_flags(run);

  CLI::App* cmp = app.add_subcommand(
      "compare", "run all three strategies and write compare.csv");
  add_pair_flags(cmp);
  cmp->add_option("--repeat", o.repeat,
                  "timing repetitions, median reported (default 1)");

  CLI::App* gen = app.add_subcommand(
      "gen", "write a builtin pair or operator to Matrix Market files");
  gen->add_option("--builtin", o.builtin,
                  "cs800 | mult800 | deriv:<n>")
      ->required();
  gen->add_option("--seed", o.seed, "seed for the orthogonal factor");
  gen->add_option("--out", o.out, "output directory (default .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(o);
    if (cmp->parsed()) return cmd_compare(o);
    return cmd_gen(o);
  } catch (const ConvergenceError& e) {
    std::cerr << "inner solver failed: " << e.what() << "\n";
    return 4;
  } catch (const ParseError& e) {
    std::cerr << "input file error: " << e.what() << "\n";
    return 5;
  } catch (const UnsupportedFormatError& e) {
    std::cerr << "input file error: " << e.what() << "\n";
    return 5;
  } catch (const SchemaError& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return 5;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 5;
  } catch (const InvalidInputError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ShapeError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace jbd
