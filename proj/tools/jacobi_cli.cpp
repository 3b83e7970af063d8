// Batch front-end: runs a scenario config or the group-law self-test.
// Exit codes: 0 pass, 1 verification failure, 2 usage or config error.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "jacobi/jacobi.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol_omega;
  std::optional<double> tol_lambda;
  bool selftest = false;
  std::optional<double> fuzz;
  int n = 0;
};

int run_selftest(const Options& opt) {
  char* summary = nullptr;
  int passed = 0;
  const double* fuzz = opt.fuzz ? &*opt.fuzz : nullptr;
  const std::uint64_t seed = opt.seed.value_or(20240101);
  const jac_status status = jac_selftest(opt.n, seed, fuzz, &summary, &passed);
  if (status != JAC_OK) {
    std::cerr << "selftest: " << jac_status_name(status) << ": " << jac_last_error() << "\n";
    return status == JAC_INVALID_DIMENSION ? kExitConfig : kExitFail;
  }
  const std::string text(summary);
  jac_string_free(summary);

  if (opt.out == "-") {
    std::cout << text;
  } else {
    std::error_code ec;
    std::filesystem::create_directories(opt.out, ec);
    const auto path = std::filesystem::path(opt.out) / "selftest.json";
    std::ofstream file(path, std::ios::binary);
    if (!file || !(file << text)) {
      std::cerr << "selftest: cannot write " << path << "\n";
      return kExitConfig;
    }
    std::cout << "selftest: " << (passed ? "PASS" : "FAIL") << " (" << path.string() << ")\n";
  }
  return passed ? kExitPass : kExitFail;
}

int run_config(const Options& opt) {
  std::ifstream file(opt.config, std::ios::binary);
  if (!file) {
    std::cerr << "cannot read config '" << opt.config << "'\n";
    return kExitConfig;
  }
  std::ostringstream text;
  text << file.rdbuf();

  int exit_code = kExitConfig;
  const jac_status status = jac_run_scenario(text.str().c_str(), opt.out.c_str(), opt.seed ? &*opt.seed : nullptr,
                                             opt.tol_omega ? &*opt.tol_omega : nullptr,
                                             opt.tol_lambda ? &*opt.tol_lambda : nullptr, &exit_code);
  if (status != JAC_OK) {
    std::cerr << jac_status_name(status) << ": " << jac_last_error() << "\n";
    return status == JAC_CONFIG_ERROR ? kExitConfig : kExitFail;
  }
  std::cout << (exit_code == kExitPass ? "PASS: " : "FAIL: ") << jac_last_error() << "\n";
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jacobi-group invariance checks for Hamiltonian flows"};
  Options opt;
  app.set_version_flag("--version", std::string(jac_version()));
  app.add_option("--config", opt.config, "Scenario config file (key = value)")->check(CLI::ExistingFile);
  app.add_option("--out", opt.out, "Output directory ('-' prints the selftest summary to stdout)");
  app.add_option("--seed", opt.seed, "Override the config seed");
  app.add_option("--tol-omega", opt.tol_omega, "Override the symplectic residual tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tol-lambda", opt.tol_lambda, "Override the time-metric residual tolerance")
      ->check(CLI::PositiveNumber);
  app.add_flag("--selftest", opt.selftest, "Run the group-law self-test suites");
  app.add_option("--fuzz", opt.fuzz, "Perturb one factorization input by this amount (selftest only)");
  app.add_option("--n", opt.n, "Degrees of freedom for the selftest (default 1, 2, 3)")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  if (opt.selftest == !opt.config.empty()) {
    std::cerr << "exactly one of --config or --selftest is required\n";
    return kExitConfig;
  }
  if (!opt.selftest && (opt.fuzz || opt.n != 0)) {
    std::cerr << "--fuzz and --n apply to --selftest only\n";
    return kExitConfig;
  }
  return opt.selftest ? run_selftest(opt) : run_config(opt);
}
