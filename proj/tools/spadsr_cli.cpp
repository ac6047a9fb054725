#include "spadsr/cli.hpp"

int main(int argc, char** argv) { return spadsr::cli::run(argc, argv); }
