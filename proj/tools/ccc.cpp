#include "ccc/cli.hpp"

int main(int argc, char** argv) { return ccc::cli::main_entry(argc, argv); }
