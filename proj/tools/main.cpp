#include "cli.hpp"

int main(int argc, char** argv) { return hpm::cli::main_entry(argc, argv); }
