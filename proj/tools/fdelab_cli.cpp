#include "fdelab/cli/app.hpp"

int main(int argc, char** argv) { return fdelab::run_cli(argc, argv); }
