#include "polarity/cli.hpp"

int main(int argc, char** argv) { return polarity::run_cli(argc, argv); }
