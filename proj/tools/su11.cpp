#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "su11/errors.hpp"
#include "su11/sweep.hpp"
#include "su11/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kNumerical = 2;

int emit(const su11::Table& table, const std::string& path) {
  if (path.empty() || path == "-") {
    su11::write_csv(std::cout, table);
    return kOk;
  }
  std::ofstream out(path);
  if (!out) throw su11::ValidationError("cannot open output file '" + path + "'");
  su11::write_csv(out, table);
  if (!out) throw su11::ValidationError("failed writing '" + path + "'");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SU(1,1) interferometer with photon subtraction: sweeps, figures, verification"};
  app.require_subcommand(1);

  std::string config, out_path, figure_id, level = "full";
  int threads = 0;
  app.add_option("-j,--threads", threads, "worker threads (default: SU11_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  auto* sweep = app.add_subcommand("sweep", "run the sweeps described in a config file");
  sweep->add_option("config", config, "config file")->required();
  sweep->add_option("-o,--output", out_path, "CSV output path (default: stdout)");

  auto* figure = app.add_subcommand("figure", "regenerate the data behind one figure");
  figure->add_option("id", figure_id, "figure id")->required()->check(
      [](const std::string& id) {
        for (const auto& known : su11::figure_ids())
          if (known == id) return std::string{};
        std::string list;
        for (const auto& known : su11::figure_ids()) list += " " + known;
        return "unknown figure '" + id + "'; known:" + list;
      });
  figure->add_option("-o,--output", out_path, "CSV output path (default: stdout)");

  auto* verify = app.add_subcommand("verify", "run the acceptance checks");
  verify->add_option("--level", level, "fast or full")
      ->check(CLI::IsMember({"fast", "full"}));
  std::vector<int> only;
  verify->add_option("--only", only, "criterion ids to run (default: all)")
      ->delimiter(',')
      ->check(CLI::Range(1, 9));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (*sweep) return emit(su11::run_sweeps(su11::load_config(config), threads), out_path);
    if (*figure) return emit(su11::run_figure(figure_id, threads), out_path);

    su11::VerifyOptions opt;
    opt.level = level == "fast" ? su11::VerifyLevel::fast : su11::VerifyLevel::full;
    opt.threads = threads;
    opt.only = only;
    bool all = true;
    for (const auto& r : su11::run_verify(opt)) {
      std::cout << su11::format_result(r) << '\n' << std::flush;
      all = all && r.passed;
    }
    return all ? kOk : kNumerical;
  } catch (const su11::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  } catch (const su11::NumericalError& e) {
    std::fprintf(stderr, "numerical failure (%s): %s\n",
                 std::string(su11::to_string(e.code())).c_str(), e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumerical;
  }
}
