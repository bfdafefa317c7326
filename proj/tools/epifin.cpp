#include "epifin/cli.hpp"

int main(int argc, char** argv) { return epifin::cli::main_entry(argc, argv); }
