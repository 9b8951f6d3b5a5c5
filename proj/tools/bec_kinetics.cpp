#include "bec/cli.hpp"

int main(int argc, char** argv) { return bec::cli_main(argc, argv); }
