#include "qctrans/cli.hpp"

int main(int argc, char** argv) { return qct::cli::run(argc, argv); }
