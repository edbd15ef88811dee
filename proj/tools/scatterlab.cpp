// scatterlab <kind> --config <path> [--threads N] [--out DIR]
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "scatterlab/scatterlab.h"

namespace {

// config 2, solver 3, contract 4; remaining library errors count as solver failures
int exit_code(sl_status s) {
  switch (s) {
    case SL_OK: return 0;
    case SL_ERR_CONFIG: return 2;
    case SL_ERR_CONTRACT: return 4;
    default: return 3;
  }
}

int report(sl_status s) {
  std::fprintf(stderr, "scatterlab: error: %s\n", sl_last_error());
  for (size_t i = 0; i < sl_last_violation_count(); ++i) std::fprintf(stderr, "  - %s\n", sl_last_violation(i));
  return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"penetrable polygonal scatterer experiments", "scatterlab"};
  std::string kind, config, out;
  int threads = 1;
  cli.add_option("kind", kind,
                 "solve | farfield | eta | profile | identity | stability | corner-bound | smallness | "
                 "herglotz-blowup | disk-eig")
      ->required();
  cli.add_option("--config", config, "experiment config (JSON)")->required();
  cli.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  cli.add_option("--out", out, "output directory (overrides the config)");
  cli.set_version_flag("--version", std::string(sl_version()));
  try {
    cli.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return 2;
  }

  sl_config* cfg = nullptr;
  if (sl_status s = sl_config_load(config.c_str(), &cfg); s != SL_OK) return report(s);
  sl_result* res = nullptr;
  const sl_status s = sl_run(cfg, kind.c_str(), threads, out.empty() ? nullptr : out.c_str(), &res);
  sl_config_free(cfg);
  if (s != SL_OK) return report(s);
  std::fputs(sl_result_summary(res), stdout);
  for (size_t i = 0; i < sl_result_file_count(res); ++i) std::printf("wrote %s\n", sl_result_file(res, i));
  sl_result_free(res);
  return 0;
}
