#include "genremap/cli.hpp"

int main(int argc, char** argv) { return genremap::run_command(argc, argv); }
