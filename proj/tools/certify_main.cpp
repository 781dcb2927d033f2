#include "recert/cli_runner.hpp"

int main(int argc, char** argv) { return recert::run_cli(argc, argv); }
