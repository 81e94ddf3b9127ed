// tamebc: command-line driver for matching, descent and orbital campaigns.

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tamebc/tamebc.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> depth;
  std::string out;
  bool trace = false;
  bool timing = false;
  int threads = 0;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config_path, "flat JSON experiment config");
  sub->add_option("--seed", f.seed, "override the config seed");
  sub->add_option("--depth", f.depth, "override the enumeration depth");
  sub->add_option("--out", f.out, "directory for report.jsonl and summary.csv");
  sub->add_flag("--trace", f.trace, "include per-iteration descent traces");
  sub->add_flag("--timing", f.timing, "record wall time in file reports");
  sub->add_option("--threads", f.threads, "worker threads (default: hardware)");
}

void print_table(const tamebc::CampaignReport& r) {
  std::cout << std::left << std::setw(6) << "case" << std::setw(8) << "verdict" << std::setw(14) << "lhs"
            << std::setw(14) << "rhs" << std::setw(12) << "D" << std::setw(7) << "depth" << "certified\n";
  for (const auto& c : r.cases)
    std::cout << std::left << std::setw(6) << c.case_id << std::setw(8) << (c.pass ? "PASS" : "FAIL") << std::setw(14)
              << (c.lhs.empty() ? "-" : c.lhs) << std::setw(14) << (c.rhs.empty() ? "-" : c.rhs) << std::setw(12)
              << (c.D.empty() ? "-" : c.D) << std::setw(7) << c.depth << (c.certified ? "yes" : "no") << '\n';
  std::cout << r.passed() << "/" << r.cases.size() << " passed, " << r.certified() << " certified, max depth "
            << r.max_depth() << '\n';
}

int run_campaign(const CommonFlags& f, std::optional<tamebc::Mode> forced) {
  tamebc::ExperimentConfig cfg;
  if (!f.config_path.empty()) cfg = tamebc::load_config(f.config_path);
  if (forced) cfg.mode = *forced;
  if (f.seed) cfg.seed = *f.seed;
  if (f.depth) cfg.depth = *f.depth;
  if (!f.out.empty()) cfg.output_path = f.out;
  tamebc::validate(cfg);
  tamebc::RunOptions opt;
  opt.threads = f.threads;
  opt.timing = f.timing;
  opt.trace = f.trace;
  const auto report = tamebc::run_experiment(cfg, opt);
  print_table(report);
  if (!cfg.output_path.empty()) tamebc::write_report(report, cfg.output_path);
  return report.all_ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matching checks for tame base change of GL_n"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto* vm = app.add_subcommand("verify-matching", "compare both sides of the matching identity on sampled gamma");
  add_common(vm, flags);
  auto* ds = app.add_subcommand("descend", "run the descent iteration on sampled k in K_L");
  add_common(ds, flags);
  auto* ob = app.add_subcommand("orbital", "compute H-side orbital integrals on sampled gamma");
  add_common(ob, flags);
  auto* rn = app.add_subcommand("run", "run the mode named in the config");
  add_common(rn, flags);
  auto* sc = app.add_subcommand("selfcheck", "run the built-in invariant suite");
  bool corrupt = false;
  sc->add_flag("--corrupt-zeta", corrupt, "fault injection: perturb zeta_e in every tower");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sc->parsed()) {
      const auto rep = tamebc::selfcheck({corrupt});
      std::cout << rep.table();
      return rep.all_ok() ? 0 : 1;
    }
    if (vm->parsed()) return run_campaign(flags, tamebc::Mode::Matching);
    if (ds->parsed()) return run_campaign(flags, tamebc::Mode::Descent);
    if (ob->parsed()) return run_campaign(flags, tamebc::Mode::Orbital);
    return run_campaign(flags, std::nullopt);
  } catch (const tamebc::ConfigInvalid& ex) {
    std::cerr << "config invalid: " << ex.what() << '\n';
    return 2;
  } catch (const tamebc::Error& ex) {
    std::cerr << ex.kind() << ": " << ex.what() << '\n';
    return 3;
  }
}
