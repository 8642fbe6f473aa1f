#include "simpx/cli.hpp"

int main(int argc, char** argv) { return simpx::cli::run(argc, argv); }
