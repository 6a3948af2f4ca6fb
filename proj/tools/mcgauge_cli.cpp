#include "mcgauge/cli.hpp"

int main(int argc, char** argv) { return mcg::cli::run(argc, argv); }
