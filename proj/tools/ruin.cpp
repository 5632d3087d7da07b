#include "ruin/cli.hpp"

int main(int argc, char** argv) { return ruin::cli::run(argc, argv); }
