#include "cli.hpp"

int main(int argc, char** argv) { return bass::cli::main(argc, argv); }
