#include "tilefix/cli.hpp"

int main(int argc, char** argv) { return tilefix::run_cli(argc, argv); }
