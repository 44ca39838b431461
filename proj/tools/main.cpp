#include <cstdint>
#include <string>

#include <CLI11.hpp>
#include <ndcglab/ndcglab.h>

int main(int argc, char** argv) {
  CLI::App app{"NDCG ranking-measure laboratory"};
  app.require_subcommand(1);

  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  std::uint32_t threads = 1;

  const struct {
    const char* name;
    const char* help;
  } commands[] = {
      {"curve", "Monte Carlo NDCG convergence curve over a prefix grid"},
      {"limit", "closed-form asymptotic limit for the configured discount"},
      {"distinguish", "paired comparison of two scorers with flip rates"},
      {"nonconverge", "frequency test that a summable discount keeps fluctuating"},
      {"ingest", "split a click-log CSV into per-query dataset files"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config, "JSON config file (a manifest.json also works)")
        ->required();
    sub->add_option("--seed", seed, "master seed, overrides the config");
    sub->add_option("--out", out, "output directory (default: current)");
    sub->add_option("--threads", threads, "worker threads; results never depend on this");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // bad usage is a config error; --help is not
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::uint64_t* seed_ptr = sub->count("--seed") > 0 ? &seed : nullptr;
  if (threads == 0) threads = 1;
  return ndcglab_run(sub->get_name().c_str(), config.c_str(), out.c_str(), seed_ptr, threads);
}
