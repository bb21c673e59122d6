#include "koszul/harness.hpp"

int main(int argc, char** argv) { return koszul::cli_main(argc, argv); }
