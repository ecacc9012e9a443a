#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "lyap/cli_io.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const lyap::cli::ExperimentConfig cfg = lyap::cli::parse_config(args);
    return lyap::cli::run(cfg);
  } catch (const lyap::cli::CliError& e) {
    std::fprintf(stderr, "lyap: %s\n", e.what());
    return e.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lyap: %s\n", e.what());
    return 1;
  }
}
