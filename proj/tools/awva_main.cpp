#include "awva/cli.hpp"

int main(int argc, char** argv) { return awva::cli::cli_main(argc, argv); }
