#include "ordpoly/cli.hpp"

int main(int argc, char** argv) { return ordpoly::cli::main_entry(argc, argv); }
