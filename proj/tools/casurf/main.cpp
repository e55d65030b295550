#include "commands.hpp"
#include "options.hpp"

#include "casurf/error.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"casurf: constant angle surfaces in products of space forms"};
  app.require_subcommand(1);
  std::function<int()> run;
  casurf::cli::add_generate(app, run);
  casurf::cli::add_backlund(app, run);
  casurf::cli::add_reconstruct(app, run);
  casurf::cli::add_verify(app, run);
  casurf::cli::add_constants(app, run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return run();
  } catch (const casurf::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const casurf::NumericalError& e) {
    std::cerr << "numerical error: " << e.what();
    if (e.has_location()) std::cerr << " at node (" << e.i() << ", " << e.j() << ")";
    std::cerr << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
