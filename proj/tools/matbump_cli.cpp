#include "matbump/cli.hpp"

int main(int argc, char** argv) { return matbump::run_cli(argc, argv); }
