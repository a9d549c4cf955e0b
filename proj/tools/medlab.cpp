#include "medlab/cli.hpp"

int main(int argc, char** argv) { return medlab::cli::run(argc, argv); }
