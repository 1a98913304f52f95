#include "levylab/cli.hpp"

int main(int argc, char **argv) { return levylab::run_cli(argc, argv); }
