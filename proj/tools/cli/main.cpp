#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "stochastic mirror descent, gradient-free optimization, online "
      "regret, and traffic-equilibrium experiment runner"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);

  smdkit::cli::register_smd(app);
  smdkit::cli::register_zo(app);
  smdkit::cli::register_online(app);
  smdkit::cli::register_traffic(app);
  smdkit::cli::register_bench(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const smdkit::cli::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const smdkit::cli::CheckFailure& f) {
    return f.failed > 0 ? f.failed : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
