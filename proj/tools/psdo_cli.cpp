// psdo: run experiment suites and dump gallery items.
//
//   psdo <suite> [--config PATH] [--seed N] [--out DIR] [--json]
//                [--K N] [--F N] [--J N] [--rank N] [--n-theta N] [--n-phi N]
//                [--s LIST] [--m LIST] [--set key=value]...
//   psdo gallery <monopole|pullback|random-connection|random-symbol> [...]
//
// Exit status: 0 if every check passed, 1 if some check failed, 2 for usage
// or configuration errors (in which case nothing is written).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "psdo/gallery.hpp"
#include "psdo/harness/suites.hpp"
#include "psdo/symbol_io.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> K, F, J, rank, n_theta, n_phi;
  std::vector<int> s_values, m_values;
  std::vector<std::string> assignments;
  bool json = false;
};

void add_suite_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON configuration file");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--out", o.out, "directory for report.json and CSV tables");
  cmd->add_flag("--json", o.json, "print the report as JSON on stdout");
  cmd->add_option("--K", o.K, "truncation order");
  cmd->add_option("--F", o.F, "symbol mode cutoff");
  cmd->add_option("--J", o.J, "operator mode cutoff");
  cmd->add_option("--rank", o.rank, "fibre rank");
  cmd->add_option("--n-theta", o.n_theta, "sphere grid latitudes");
  cmd->add_option("--n-phi", o.n_phi, "sphere grid longitudes");
  cmd->add_option("--s", o.s_values, "loop-metric Sobolev orders");
  cmd->add_option("--m", o.m_values, "monopole degrees");
  cmd->add_option("--set", o.assignments, "override any config key: key=value");
}

psdo::harness::ExperimentConfig build_config(const std::string& suite,
                                             const Overrides& o) {
  using namespace psdo::harness;
  ExperimentConfig c;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw psdo::ConfigError("cannot read configuration file '" + o.config_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
      throw psdo::ConfigError(std::string("configuration is not valid JSON: ") + e.what());
    }
    apply_json(c, j);
  }
  c.suite = suite;
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.out_dir = *o.out;
  if (o.K) c.K = *o.K;
  if (o.F) c.F = *o.F;
  if (o.J) c.J = *o.J;
  if (o.rank) c.rank = *o.rank;
  if (o.n_theta) c.n_theta = *o.n_theta;
  if (o.n_phi) c.n_phi = *o.n_phi;
  if (!o.s_values.empty()) c.s_values = o.s_values;
  if (!o.m_values.empty()) c.m_values = o.m_values;
  for (const auto& a : o.assignments) apply_assignment(c, a);
  validate(c);
  return c;
}

struct GalleryArgs {
  std::string item;
  int m = 1;
  int n_theta = 16;
  int n_phi = 32;
  int K = 2;
  int F = 4;
  int rank = 2;
  std::uint64_t seed = 42;
  std::string out;
};

int run_gallery(const GalleryArgs& g) {
  using namespace psdo;
  std::ofstream file;
  if (!g.out.empty()) {
    file.open(g.out, std::ios::binary);
    if (!file) throw ConfigError("cannot write '" + g.out + "'");
  }
  std::ostream& out = g.out.empty() ? std::cout : file;
  auto sphere = std::make_shared<const Cycle>(sphere_cycle(g.n_theta, g.n_phi));
  if (g.item == "monopole") {
    write_field(out, monopole_field(g.m, sphere).materialize());
  } else if (g.item == "pullback") {
    write_field(out, pullback_gauge_field(monopole_field(g.m, sphere)).materialize());
  } else if (g.item == "random-connection") {
    write_field(out, random_negative_order_connection(g.seed, sphere, g.K, g.F, g.rank)
                         .materialize());
  } else if (g.item == "random-symbol") {
    Rng rng(g.seed);
    write_symbol(out, random_symbol(rng, g.rank, g.K, g.F));
  } else {
    throw ConfigError("unknown gallery item '" + g.item + "'");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudodifferential symbol calculus experiments"};
  app.require_subcommand(1);

  Overrides overrides;
  for (const auto& name : psdo::harness::suite_names()) {
    auto* cmd = app.add_subcommand(name, "run the " + name + " suite");
    add_suite_options(cmd, overrides);
  }

  GalleryArgs gallery;
  auto* gcmd = app.add_subcommand("gallery", "write a gallery item in dump format");
  gcmd->add_option("item", gallery.item,
                   "monopole | pullback | random-connection | random-symbol")
      ->required();
  gcmd->add_option("--m", gallery.m, "monopole degree");
  gcmd->add_option("--n-theta", gallery.n_theta, "sphere grid latitudes");
  gcmd->add_option("--n-phi", gallery.n_phi, "sphere grid longitudes");
  gcmd->add_option("--K", gallery.K, "truncation order");
  gcmd->add_option("--F", gallery.F, "symbol mode cutoff");
  gcmd->add_option("--rank", gallery.rank, "fibre rank");
  gcmd->add_option("--seed", gallery.seed, "random seed");
  gcmd->add_option("--out", gallery.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gcmd->parsed()) return run_gallery(gallery);
    std::string suite;
    for (const auto* sub : app.get_subcommands()) suite = sub->get_name();
    const auto cfg = build_config(suite, overrides);
    const auto report = psdo::harness::run_suite(cfg);
    if (overrides.json)
      std::cout << psdo::harness::report_json(report).dump(2) << '\n';
    else
      psdo::harness::print_summary(std::cout, report);
    return report.passed() ? 0 : 1;
  } catch (const psdo::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const psdo::ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
