#include "regions/cli.hpp"

int main(int argc, char** argv) { return regions::run_cli(argc, argv); }
