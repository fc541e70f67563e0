#include "datadep/cli.hpp"

int main(int argc, char **argv) { return datadep::cli::run(argc, argv); }
