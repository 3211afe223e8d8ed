#include "curvelab/cli.hpp"

int main(int argc, char** argv) { return curvelab::run_cli(argc, argv); }
