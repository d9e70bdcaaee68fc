#include <indiff/cli.hpp>

int main(int argc, char** argv) { return indiff::cli_main(argc, argv); }
