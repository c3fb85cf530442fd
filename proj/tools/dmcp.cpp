#include <iostream>
#include <string>
#include <vector>

#include "dmcp/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args.front() == "--help" || args.front() == "-h") {
    std::cout << "usage: dmcp <command> [options]\n"
                 "commands: design, scan-area, scan-2d, monte-carlo, waveguide-map, waveguide-sim, waveguide-scan\n"
                 "run 'dmcp <command> --help' for the options of one command\n";
    return args.empty() ? dmcp::cli::kValidation : dmcp::cli::kOk;
  }
  if (args.size() == 2 && (args[1] == "--help" || args[1] == "-h")) {
    dmcp::cli::JobConfig c;
    CLI::App app{"dmcp " + args.front()};
    dmcp::cli::detail::add_options(app, c, args.front());
    std::cout << app.help();
    return dmcp::cli::kOk;
  }
  return dmcp::cli::run(args, std::cout, std::cerr);
}
