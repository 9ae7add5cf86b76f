#include "tmot/cli.hpp"

int main(int argc, char** argv) { return tmot::cli_main(argc, argv); }
